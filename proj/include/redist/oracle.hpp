#pragma once

// Ground-truth distances: closed forms for the builtin 1D and 2D scenes, the
// 1D p-Poisson solution, and a brute-force oracle that samples the zero set
// on a grid and measures distance to the nearest sample point.

#include "redist/implicit.hpp"
#include "redist/jet_network.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redist {

/// True for scenes with a closed-form signed distance (segment1d, circle2d).
bool has_analytic_sdf(std::string_view name);

/// Exact signed distance, positive inside. Throws std::invalid_argument for
/// scenes without a closed form.
double analytic_sdf(std::string_view name, const Point& x);

/// Solution of (|u'|^{p-2} u')' = -1 on (0,1) with u(0) = u(1) = 0.
double analytic_ppoisson_1d(double p, double x);

struct ZeroSetSample {
    int dim = 1;
    double h = 0.0;
    std::vector<Point> points;
};

class EmptyZeroSetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Samples {f = 0} on a grid of spacing at most h: every grid node where f is
/// exactly zero, plus one root per grid edge with a strict sign change. Edge
/// roots are bracketed and bisected until |f| < 1e-12 or the bracket cannot
/// be split further. Throws EmptyZeroSetError if nothing is found.
ZeroSetSample extract_zero_set(const Scene& scene, double h);

/// Writes the points as CSV with a header naming the coordinates.
void write_points_csv(std::ostream& os, const ZeroSetSample& sample);

/// Nearest-sample distance with the sign of f. The spatial hash and the
/// exhaustive scan compare the same squared distances, so both return
/// bit-identical results.
class DistanceOracle {
public:
    DistanceOracle(const Scene& scene, ZeroSetSample sample);

    double operator()(const Point& x) const { return signed_distance(x); }
    double signed_distance(const Point& x) const;
    double unsigned_distance(const Point& x) const;
    double unsigned_distance_exhaustive(const Point& x) const;

    const ZeroSetSample& sample() const { return sample_; }

private:
    double squared(const Point& x, std::size_t i) const;

    Scene scene_;
    ZeroSetSample sample_;
    double cell_ = 1.0;
    std::array<double, 3> origin_{};
    std::array<int, 3> cells_{1, 1, 1};
    std::vector<std::size_t> start_;  // CSR offsets into order_, one per cell plus one
    std::vector<std::size_t> order_;  // point indices grouped by cell
};

/// Exhaustive signed distance to the sample.
double brute_force_sdf(const Scene& scene, const ZeroSetSample& sample, const Point& x);

}  // namespace redist
