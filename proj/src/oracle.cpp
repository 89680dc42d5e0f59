#include "redist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace redist {

bool has_analytic_sdf(std::string_view name)
{
    return name == "segment1d" || name == "circle2d";
}

double analytic_sdf(std::string_view name, const Point& x)
{
    if (name == "segment1d") {
        return std::min(x[0], 1.0 - x[0]);
    }
    if (name == "circle2d") {
        return 1.0 - std::sqrt(x[0] * x[0] + x[1] * x[1]);
    }
    throw std::invalid_argument("no closed-form distance for scene '" + std::string(name) + "'");
}

double analytic_ppoisson_1d(double p, double x)
{
    if (!(p >= 2.0)) {
        throw std::invalid_argument("p-Poisson solution requires p >= 2");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::out_of_range("p-Poisson closed form is defined on [0, 1] only");
    }
    const double q = p / (p - 1.0);
    return (p - 1.0) / p * (std::pow(0.5, q) - std::pow(std::abs(x - 0.5), q));
}

namespace {

constexpr double kRootTolerance = 1e-12;

struct Grid {
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> step{};
    const Box* box = nullptr;

    double coord(int axis, int i) const
    {
        return i == n[axis] - 1 ? box->hi[axis] : box->lo[axis] + i * step[axis];
    }
};

Grid make_grid(const Box& box, double h)
{
    Grid g;
    g.box = &box;
    for (int a = 0; a < box.dim; ++a) {
        const double width = box.hi[a] - box.lo[a];
        const double cells = std::ceil(width / h * (1.0 - 1e-12));
        g.n[a] = std::max(2, static_cast<int>(cells) + 1);
        g.step[a] = width / (g.n[a] - 1);
    }
    return g;
}

// Root of f on the segment [a, b] given f(a), f(b) of strictly opposite sign.
Point refine_root(const Scene& scene, Point a, double fa, Point b, double fb)
{
    const double t = fa / (fa - fb);
    Point m;
    for (int i = 0; i < 3; ++i) {
        m[i] = a[i] + t * (b[i] - a[i]);
    }
    for (int step = 0; step < 200; ++step) {
        const double fm = scene.f(m);
        if (std::abs(fm) < kRootTolerance) {
            return m;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        Point next;
        for (int i = 0; i < 3; ++i) {
            next[i] = 0.5 * (a[i] + b[i]);
        }
        if (next == a || next == b) {
            break;
        }
        m = next;
    }
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

}  // namespace

ZeroSetSample extract_zero_set(const Scene& scene, double h)
{
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("zero-set resolution must be positive");
    }
    const Grid grid = make_grid(scene.domain, h);
    const int ny = grid.n[1];
    const int nz = grid.n[2];
    const std::size_t plane = static_cast<std::size_t>(ny) * nz;
    auto node = [&](int i, int j, int k) { return Point{grid.coord(0, i), grid.coord(1, j), grid.coord(2, k)}; };
    auto fill = [&](int i, std::vector<double>& vals) {
        for (int j = 0; j < ny; ++j) {
            for (int k = 0; k < nz; ++k) {
                vals[static_cast<std::size_t>(j) * nz + k] = scene.f(node(i, j, k));
            }
        }
    };

    ZeroSetSample out;
    out.dim = scene.dim;
    out.h = h;
    auto edge = [&](const Point& a, double fa, const Point& b, double fb) {
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
            out.points.push_back(refine_root(scene, a, fa, b, fb));
        }
    };

    std::vector<double> cur(plane);
    std::vector<double> next(plane);
    fill(0, cur);
    for (int i = 0; i < grid.n[0]; ++i) {
        const bool has_next = i + 1 < grid.n[0];
        if (has_next) {
            fill(i + 1, next);
        }
        for (int j = 0; j < ny; ++j) {
            for (int k = 0; k < nz; ++k) {
                const std::size_t idx = static_cast<std::size_t>(j) * nz + k;
                const double f0 = cur[idx];
                const Point p0 = node(i, j, k);
                if (f0 == 0.0) {
                    out.points.push_back(p0);
                    continue;
                }
                if (has_next) {
                    edge(p0, f0, node(i + 1, j, k), next[idx]);
                }
                if (j + 1 < ny) {
                    edge(p0, f0, node(i, j + 1, k), cur[idx + nz]);
                }
                if (k + 1 < nz) {
                    edge(p0, f0, node(i, j, k + 1), cur[idx + 1]);
                }
            }
        }
        cur.swap(next);
    }
    if (out.points.empty()) {
        throw EmptyZeroSetError("zero set of scene '" + scene.name + "' not found in the domain at resolution "
                                + std::to_string(h));
    }
    return out;
}

void write_points_csv(std::ostream& os, const ZeroSetSample& sample)
{
    static const char* names[] = {"x", "y", "z"};
    for (int i = 0; i < sample.dim; ++i) {
        os << (i ? "," : "") << names[i];
    }
    os << '\n';
    const auto old = os.precision(17);
    for (const Point& p : sample.points) {
        for (int i = 0; i < sample.dim; ++i) {
            os << (i ? "," : "") << p[i];
        }
        os << '\n';
    }
    os.precision(old);
}

DistanceOracle::DistanceOracle(const Scene& scene, ZeroSetSample sample)
    : scene_(scene)
    , sample_(std::move(sample))
{
    if (sample_.points.empty()) {
        throw std::invalid_argument("distance oracle needs a non-empty zero-set sample");
    }
    const int dim = sample_.dim;
    std::array<double, 3> hi{};
    origin_ = sample_.points.front();
    hi = origin_;
    for (const Point& p : sample_.points) {
        for (int a = 0; a < dim; ++a) {
            origin_[a] = std::min(origin_[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    double volume = 1.0;
    for (int a = 0; a < dim; ++a) {
        volume *= std::max(hi[a] - origin_[a], sample_.h);
    }
    const double per_point = volume / static_cast<double>(sample_.points.size());
    cell_ = std::max(sample_.h, 2.0 * std::pow(per_point, 1.0 / dim));
    for (int a = 0; a < 3; ++a) {
        if (a >= dim) {
            origin_[a] = 0.0;
            cells_[a] = 1;
        } else {
            cells_[a] = static_cast<int>(std::floor((hi[a] - origin_[a]) / cell_)) + 1;
        }
    }

    const std::size_t ncell = static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
    std::vector<std::size_t> cell_of(sample_.points.size());
    start_.assign(ncell + 1, 0);
    for (std::size_t i = 0; i < sample_.points.size(); ++i) {
        std::size_t c = 0;
        for (int a = 0; a < 3; ++a) {
            int idx = 0;
            if (a < dim) {
                idx = std::clamp(static_cast<int>(std::floor((sample_.points[i][a] - origin_[a]) / cell_)), 0,
                                 cells_[a] - 1);
            }
            c = c * cells_[a] + idx;
        }
        cell_of[i] = c;
        ++start_[c + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) {
        start_[c + 1] += start_[c];
    }
    order_.resize(sample_.points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < sample_.points.size(); ++i) {
        order_[fill[cell_of[i]]++] = i;
    }
}

double DistanceOracle::squared(const Point& x, std::size_t i) const
{
    const Point& p = sample_.points[i];
    double s = 0.0;
    for (int a = 0; a < sample_.dim; ++a) {
        const double d = x[a] - p[a];
        s += d * d;
    }
    return s;
}

double DistanceOracle::unsigned_distance_exhaustive(const Point& x) const
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample_.points.size(); ++i) {
        best = std::min(best, squared(x, i));
    }
    return std::sqrt(best);
}

double DistanceOracle::unsigned_distance(const Point& x) const
{
    const int dim = sample_.dim;
    std::array<long long, 3> q{0, 0, 0};
    long long reach = 0;
    for (int a = 0; a < dim; ++a) {
        q[a] = static_cast<long long>(std::floor((x[a] - origin_[a]) / cell_));
        reach = std::max({reach, q[a], cells_[a] - 1 - q[a]});
    }
    double best = std::numeric_limits<double>::infinity();
    auto visit = [&](long long i, long long j, long long k) {
        const std::size_t c = (static_cast<std::size_t>(i) * cells_[1] + static_cast<std::size_t>(j)) * cells_[2]
                              + static_cast<std::size_t>(k);
        for (std::size_t s = start_[c]; s < start_[c + 1]; ++s) {
            best = std::min(best, squared(x, order_[s]));
        }
    };
    for (long long r = 0; r <= reach; ++r) {
        const long long i0 = std::max(0LL, q[0] - r);
        const long long i1 = std::min<long long>(cells_[0] - 1, q[0] + r);
        const long long j0 = std::max(0LL, q[1] - r);
        const long long j1 = std::min<long long>(cells_[1] - 1, q[1] + r);
        for (long long i = i0; i <= i1; ++i) {
            for (long long j = j0; j <= j1; ++j) {
                if (std::abs(i - q[0]) == r || std::abs(j - q[1]) == r) {
                    const long long k0 = std::max(0LL, q[2] - r);
                    const long long k1 = std::min<long long>(cells_[2] - 1, q[2] + r);
                    for (long long k = k0; k <= k1; ++k) {
                        visit(i, j, k);
                    }
                } else {
                    if (q[2] - r >= 0 && q[2] - r < cells_[2]) {
                        visit(i, j, q[2] - r);
                    }
                    if (r > 0 && q[2] + r >= 0 && q[2] + r < cells_[2]) {
                        visit(i, j, q[2] + r);
                    }
                }
            }
        }
        // Cells beyond ring r are at least r cell widths away.
        const double bound = static_cast<double>(r) * cell_ * (1.0 - 1e-9);
        if (best <= bound * bound) {
            break;
        }
    }
    return std::sqrt(best);
}

double DistanceOracle::signed_distance(const Point& x) const
{
    const double f = scene_.f(x);
    if (f == 0.0) {
        return 0.0;
    }
    const double d = unsigned_distance(x);
    return f > 0.0 ? d : -d;
}

double brute_force_sdf(const Scene& scene, const ZeroSetSample& sample, const Point& x)
{
    if (sample.points.empty()) {
        throw std::invalid_argument("distance oracle needs a non-empty zero-set sample");
    }
    const double f = scene.f(x);
    if (f == 0.0) {
        return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : sample.points) {
        double s = 0.0;
        for (int a = 0; a < sample.dim; ++a) {
            const double d = x[a] - p[a];
            s += d * d;
        }
        best = std::min(best, s);
    }
    const double d = std::sqrt(best);
    return f > 0.0 ? d : -d;
}

}  // namespace redist
