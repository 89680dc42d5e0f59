#pragma once

// Assessment of a field: grid dumps, residual histograms, error metrics
// against a reference, the zero-set audit, and SVG/CSV/JSON output.

#include "redist/dual.hpp"
#include "redist/jet_network.hpp"
#include "redist/network.hpp"
#include "redist/oracle.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace redist {

/// A scalar field that can report value, gradient and Hessian at points.
class Field {
public:
    virtual ~Field() = default;
    virtual int dim() const = 0;
    /// order 0: value only, 1: + gradient, 2: + Hessian.
    virtual std::vector<Jet> jets(std::span<const Point> points, int order) const = 0;

    std::vector<double> values(std::span<const Point> points) const;
};

/// The trained ansatz d(x; theta).
class NetworkField : public Field {
public:
    explicit NetworkField(AnsatzField field) : field_(std::move(field)) {}
    int dim() const override { return field_.scene.dim; }
    std::vector<Jet> jets(std::span<const Point> points, int order) const override;
    const AnsatzField& ansatz() const { return field_; }

private:
    AnsatzField field_;
};

/// A closed-form field written against second-order duals.
class FunctionField : public Field {
public:
    using D = Dual2<double, 3>;
    using Fn = std::function<D(const std::array<D, 3>&)>;

    FunctionField(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
    int dim() const override { return dim_; }
    std::vector<Jet> jets(std::span<const Point> points, int order) const override;

private:
    int dim_;
    Fn fn_;
};

/// Value-only field from a plain function; asking for derivatives throws.
class ValueField : public Field {
public:
    ValueField(int dim, std::function<double(const Point&)> fn) : dim_(dim), fn_(std::move(fn)) {}
    int dim() const override { return dim_; }
    std::vector<Jet> jets(std::span<const Point> points, int order) const override;

private:
    int dim_;
    std::function<double(const Point&)> fn_;
};

/// The scene's implicit function f.
std::unique_ptr<Field> expr_field(const Scene& scene);

/// Regular grid of node values. Nodes are x_i = lo + i (hi - lo) / (res - 1)
/// per axis, flattened row-major (first axis slowest).
struct GridDump {
    Box box;
    std::array<int, 3> res{1, 1, 1};
    std::vector<double> values;

    std::size_t size() const { return static_cast<std::size_t>(res[0]) * res[1] * res[2]; }
    double coord(int axis, int i) const;
    Point node(std::size_t flat) const;
    double at(int i, int j = 0, int k = 0) const { return values[(static_cast<std::size_t>(i) * res[1] + j) * res[2] + k]; }
};

/// res applies to every axis of the box; must be at least 2.
GridDump grid_eval(const Field& field, const Box& box, int res);

/// 2D grid on the plane x_axis = value of a 3D field. The resulting box holds
/// the two remaining axes in order.
GridDump grid_eval_slice(const Field& field, const Box& box, int axis, double value, int res);

/// Header "# dim=<n> res=<r1,..> box=<a1,b1;..> order=row-major", then one
/// line of comma-separated values per last-axis row.
void write_grid(std::ostream& os, const GridDump& grid);
GridDump read_grid(std::istream& is);

enum class ResidualKind { grad_norm, p_laplacian };
std::string to_string(ResidualKind kind);

struct ResidualSamples {
    ResidualKind kind = ResidualKind::grad_norm;
    double p = 2.0;
    std::vector<double> values;  // non-degenerate samples only
    int degenerate = 0;
};

/// Fraction of the non-degenerate samples inside [lo, hi].
double fraction_in(const ResidualSamples& samples, double lo, double hi);

/// |grad d| or Delta_p d at n uniform points of the box.
ResidualSamples residual_samples(const Field& field, const Box& box, ResidualKind kind, double p, int n,
                                 std::mt19937_64& rng);

struct ResidualHistogram {
    ResidualKind kind = ResidualKind::grad_norm;
    double p = 2.0;
    std::vector<double> edges;  // bins + 1
    std::vector<int> counts;
    int samples = 0;  // histogrammed samples (excludes degenerate)
    int degenerate = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Uniform bins over [mean - 5 sd, mean + 5 sd]; samples outside are clamped
/// into the end bins. A zero spread uses [mean - 0.5, mean + 0.5].
ResidualHistogram residual_histogram(const ResidualSamples& samples, int bins = 101);

struct ErrorMetrics {
    double mae = 0.0;
    double max_abs = 0.0;
    std::size_t count = 0;
};

using Reference = std::function<double(const Point&)>;
using Mask = std::function<bool(const Point&)>;

/// Error of the field against the reference over the points kept by the mask.
ErrorMetrics compare_to_oracle(const Field& field, const Reference& reference, std::span<const Point> points,
                               const Mask& keep = {});

/// Largest |d| over the sample points.
double audit_zero_set(const Field& field, const ZeroSetSample& sample);

/// Region excluded from error metrics: the segment midpoint band and the
/// circle's centre disk.
Mask default_mask(const Scene& scene);

/// Writers for the plot types. Each SVG has a CSV twin at the same path with
/// extension .csv. I/O errors throw std::runtime_error naming the path.
void write_line_plot(const std::filesystem::path& svg, const GridDump& grid, const std::string& title,
                     const GridDump* reference = nullptr);
void write_heatmap(const std::filesystem::path& svg, const GridDump& grid, const std::string& title);
void write_histogram_plot(const std::filesystem::path& svg, const ResidualHistogram& hist, const std::string& title);

/// Marching-squares segments of the zero contour of a 2D grid.
std::vector<std::array<double, 4>> zero_contour(const GridDump& grid);

nlohmann::json to_json(const ErrorMetrics& m);
nlohmann::json to_json(const ResidualHistogram& h);

}  // namespace redist
