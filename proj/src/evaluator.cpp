#include "redist/evaluator.hpp"

#include "redist/losses.hpp"
#include "redist/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace redist {

std::vector<double> Field::values(std::span<const Point> points) const
{
    const auto j = jets(points, 0);
    std::vector<double> out(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out[i] = j[i].value;
    }
    return out;
}

std::vector<Jet> NetworkField::jets(std::span<const Point> points, int order) const
{
    return ansatz_jets(field_, points, order);
}

std::vector<Jet> FunctionField::jets(std::span<const Point> points, int order) const
{
    std::vector<Jet> out(points.size());
    for (std::size_t s = 0; s < points.size(); ++s) {
        std::array<D, 3> x;
        for (int i = 0; i < 3; ++i) {
            x[i] = i < dim_ ? D::variable(points[s][i], i) : D(points[s][i]);
        }
        const D d = fn_(x);
        Jet& jet = out[s];
        jet.value = d.val;
        if (order >= 1) {
            jet.grad = d.grad;
        }
        if (order >= 2) {
            jet.hess = d.hess;
        }
    }
    return out;
}

std::vector<Jet> ValueField::jets(std::span<const Point> points, int order) const
{
    if (order > 0) {
        throw std::logic_error("value-only field has no derivatives");
    }
    std::vector<Jet> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i].value = fn_(points[i]);
    }
    return out;
}

std::unique_ptr<Field> expr_field(const Scene& scene)
{
    const Expr e = scene.expr;
    return std::make_unique<FunctionField>(scene.dim, [e](const std::array<FunctionField::D, 3>& x) {
        return eval<FunctionField::D>(e, std::span<const FunctionField::D>(x.data(), 3));
    });
}

double GridDump::coord(int axis, int i) const
{
    if (res[axis] == 1) {
        return box.lo[axis];
    }
    if (i == res[axis] - 1) {
        return box.hi[axis];
    }
    return box.lo[axis] + i * ((box.hi[axis] - box.lo[axis]) / (res[axis] - 1));
}

Point GridDump::node(std::size_t flat) const
{
    const int k = static_cast<int>(flat % res[2]);
    flat /= res[2];
    const int j = static_cast<int>(flat % res[1]);
    const int i = static_cast<int>(flat / res[1]);
    Point p{0.0, 0.0, 0.0};
    p[0] = coord(0, i);
    if (box.dim > 1) {
        p[1] = coord(1, j);
    }
    if (box.dim > 2) {
        p[2] = coord(2, k);
    }
    return p;
}

GridDump grid_eval(const Field& field, const Box& box, int res)
{
    if (res < 2) {
        throw std::invalid_argument("grid resolution must be at least 2");
    }
    GridDump g;
    g.box = box;
    for (int a = 0; a < box.dim; ++a) {
        g.res[a] = res;
    }
    std::vector<Point> pts(g.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = g.node(i);
    }
    g.values = field.values(pts);
    return g;
}

GridDump grid_eval_slice(const Field& field, const Box& box, int axis, double value, int res)
{
    if (box.dim != 3 || axis < 0 || axis > 2) {
        throw std::invalid_argument("slices are taken from 3D boxes along axis 0, 1 or 2");
    }
    if (res < 2) {
        throw std::invalid_argument("grid resolution must be at least 2");
    }
    std::array<int, 2> keep{};
    for (int a = 0, n = 0; a < 3; ++a) {
        if (a != axis) {
            keep[n++] = a;
        }
    }
    GridDump g;
    g.box.dim = 2;
    for (int n = 0; n < 2; ++n) {
        g.box.lo[n] = box.lo[keep[n]];
        g.box.hi[n] = box.hi[keep[n]];
        g.res[n] = res;
    }
    std::vector<Point> pts(g.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point q = g.node(i);
        Point p{};
        p[axis] = value;
        p[keep[0]] = q[0];
        p[keep[1]] = q[1];
        pts[i] = p;
    }
    g.values = field.values(pts);
    return g;
}

void write_grid(std::ostream& os, const GridDump& grid)
{
    const int dim = grid.box.dim;
    os << "# dim=" << dim << " res=";
    for (int a = 0; a < dim; ++a) {
        os << (a ? "," : "") << grid.res[a];
    }
    const auto old = os.precision(17);
    os << " box=";
    for (int a = 0; a < dim; ++a) {
        os << (a ? ";" : "") << grid.box.lo[a] << ',' << grid.box.hi[a];
    }
    os << " order=row-major\n";
    const int row = grid.res[dim - 1];
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        os << grid.values[i] << ((i + 1) % row == 0 ? '\n' : ',');
    }
    os.precision(old);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        out.push_back(item);
    }
    return out;
}

}  // namespace

GridDump read_grid(std::istream& is)
{
    std::string header;
    if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
        throw std::runtime_error("grid: missing header line");
    }
    GridDump g;
    std::string dim_s;
    std::string res_s;
    std::string box_s;
    for (const std::string& field : split(header.substr(2), ' ')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "dim") {
            dim_s = val;
        } else if (key == "res") {
            res_s = val;
        } else if (key == "box") {
            box_s = val;
        } else if (key == "order" && val != "row-major") {
            throw std::runtime_error("grid: unsupported order '" + val + "'");
        }
    }
    try {
        g.box.dim = std::stoi(dim_s);
        if (g.box.dim < 1 || g.box.dim > 3) {
            throw std::runtime_error("grid: dimension must be 1, 2 or 3");
        }
        const auto r = split(res_s, ',');
        const auto b = split(box_s, ';');
        if (static_cast<int>(r.size()) != g.box.dim || static_cast<int>(b.size()) != g.box.dim) {
            throw std::runtime_error("grid: header sizes do not match dim");
        }
        for (int a = 0; a < g.box.dim; ++a) {
            g.res[a] = std::stoi(r[a]);
            const auto lohi = split(b[a], ',');
            if (lohi.size() != 2 || g.res[a] < 1) {
                throw std::runtime_error("grid: malformed header");
            }
            g.box.lo[a] = std::stod(lohi[0]);
            g.box.hi[a] = std::stod(lohi[1]);
        }
    } catch (const std::logic_error&) {
        throw std::runtime_error("grid: malformed header");
    }
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        for (const std::string& v : split(line, ',')) {
            try {
                g.values.push_back(std::stod(v));
            } catch (const std::logic_error&) {
                throw std::runtime_error("grid: bad value '" + v + "'");
            }
        }
    }
    if (g.values.size() != g.size()) {
        throw std::runtime_error("grid: expected " + std::to_string(g.size()) + " values, found "
                                 + std::to_string(g.values.size()));
    }
    return g;
}

std::string to_string(ResidualKind kind)
{
    return kind == ResidualKind::grad_norm ? "grad_norm" : "p_laplacian";
}

namespace {

std::optional<double> p_laplacian_of_jet(const Jet& j, int dim, double p)
{
    double trace = 0.0;
    double n2 = 0.0;
    double quad = 0.0;
    for (int i = 0; i < dim; ++i) {
        trace += j.h(i, i);
        n2 += j.grad[i] * j.grad[i];
        for (int k = 0; k < dim; ++k) {
            quad += j.grad[i] * j.h(i, k) * j.grad[k];
        }
    }
    if (p == 2.0) {
        return trace;
    }
    if (!(std::sqrt(n2) >= kGradientGuard)) {
        return std::nullopt;
    }
    return std::pow(n2, 0.5 * (p - 2.0)) * trace + (p - 2.0) * std::pow(n2, 0.5 * (p - 4.0)) * quad;
}

}  // namespace

double fraction_in(const ResidualSamples& samples, double lo, double hi)
{
    if (samples.values.empty()) {
        return 0.0;
    }
    const auto n = std::count_if(samples.values.begin(), samples.values.end(),
                                 [&](double v) { return v >= lo && v <= hi; });
    return static_cast<double>(n) / static_cast<double>(samples.values.size());
}

ResidualSamples residual_samples(const Field& field, const Box& box, ResidualKind kind, double p, int n,
                                 std::mt19937_64& rng)
{
    if (n <= 0) {
        throw std::invalid_argument("residual sample count must be positive");
    }
    if (kind == ResidualKind::p_laplacian && !(p >= 2.0)) {
        throw std::invalid_argument("p-Laplacian requires p >= 2");
    }
    const Batch pts = sample_uniform(box, n, rng);
    const auto jets = field.jets(pts, kind == ResidualKind::grad_norm ? 1 : 2);
    ResidualSamples out;
    out.kind = kind;
    out.p = p;
    out.values.reserve(jets.size());
    for (const Jet& j : jets) {
        if (kind == ResidualKind::grad_norm) {
            double n2 = 0.0;
            for (int i = 0; i < field.dim(); ++i) {
                n2 += j.grad[i] * j.grad[i];
            }
            out.values.push_back(std::sqrt(n2));
        } else if (const auto lap = p_laplacian_of_jet(j, field.dim(), p)) {
            out.values.push_back(*lap);
        } else {
            ++out.degenerate;
        }
    }
    return out;
}

ResidualHistogram residual_histogram(const ResidualSamples& samples, int bins)
{
    if (bins < 1) {
        throw std::invalid_argument("histogram needs at least one bin");
    }
    ResidualHistogram h;
    h.kind = samples.kind;
    h.p = samples.p;
    h.degenerate = samples.degenerate;
    h.samples = static_cast<int>(samples.values.size());
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const auto& v = samples.values;
    if (!v.empty()) {
        h.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) {
            ss += (x - h.mean) * (x - h.mean);
        }
        h.stddev = std::sqrt(ss / static_cast<double>(v.size()));
    }
    const double half = h.stddev > 0.0 ? 5.0 * h.stddev : 0.5;
    const double lo = h.mean - half;
    const double width = 2.0 * half / bins;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) {
        h.edges[b] = lo + b * width;
    }
    h.edges.back() = h.mean + half;
    for (double x : v) {
        const int b = std::clamp(static_cast<int>(std::floor((x - lo) / width)), 0, bins - 1);
        ++h.counts[b];
    }
    return h;
}

ErrorMetrics compare_to_oracle(const Field& field, const Reference& reference, std::span<const Point> points,
                               const Mask& keep)
{
    std::vector<Point> kept;
    kept.reserve(points.size());
    for (const Point& p : points) {
        if (!keep || keep(p)) {
            kept.push_back(p);
        }
    }
    ErrorMetrics m;
    const auto d = field.values(kept);
    double sum = 0.0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const double e = std::abs(d[i] - reference(kept[i]));
        sum += e;
        m.max_abs = std::max(m.max_abs, e);
    }
    m.count = kept.size();
    m.mae = kept.empty() ? 0.0 : sum / static_cast<double>(kept.size());
    return m;
}

double audit_zero_set(const Field& field, const ZeroSetSample& sample)
{
    if (sample.points.empty()) {
        throw std::invalid_argument("zero-set audit needs a non-empty sample");
    }
    double worst = 0.0;
    for (double d : field.values(sample.points)) {
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

Mask default_mask(const Scene& scene)
{
    if (scene.name == "segment1d") {
        return [](const Point& x) { return std::abs(x[0] - 0.5) >= 0.05; };
    }
    if (scene.name == "circle2d") {
        return [](const Point& x) { return x[0] * x[0] + x[1] * x[1] >= 0.01; };
    }
    return {};
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 50.0;

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return os;
}

void close_out(std::ofstream& os, const std::filesystem::path& path)
{
    os.close();
    if (!os) {
        throw std::runtime_error("error writing " + path.string());
    }
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void svg_open(std::ostream& os, const std::string& title)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << escape(title) << "</text>\n";
}

void svg_axes(std::ostream& os, double x0, double x1, double y0, double y1, double left, double right, double top,
              double bottom)
{
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left) << "\" height=\""
       << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto text = [&](double x, double y, const char* anchor, double v) {
        os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << label(v) << "</text>\n";
    };
    text(left, bottom + 16, "middle", x0);
    text(right, bottom + 16, "middle", x1);
    text(left - 6, bottom, "end", y0);
    text(left - 6, top + 8, "end", y1);
}

std::filesystem::path twin(const std::filesystem::path& svg)
{
    std::filesystem::path p = svg;
    return p.replace_extension(".csv");
}

std::string colour(double v, double scale)
{
    const double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
    const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
    char buf[16];
    if (t >= 0.0) {
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
    } else {
        std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
    }
    return buf;
}

}  // namespace

void write_line_plot(const std::filesystem::path& svg, const GridDump& grid, const std::string& title,
                     const GridDump* reference)
{
    if (grid.box.dim != 1) {
        throw std::invalid_argument("line plots need a 1D grid");
    }
    if (reference && reference->values.size() != grid.values.size()) {
        throw std::invalid_argument("reference grid does not match the plotted grid");
    }
    const int n = grid.res[0];
    double ymin = *std::min_element(grid.values.begin(), grid.values.end());
    double ymax = *std::max_element(grid.values.begin(), grid.values.end());
    if (reference) {
        ymin = std::min(ymin, *std::min_element(reference->values.begin(), reference->values.end()));
        ymax = std::max(ymax, *std::max_element(reference->values.begin(), reference->values.end()));
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double left = kMargin;
    const double right = kWidth - 20.0;
    const double top = 40.0;
    const double bottom = kHeight - kMargin;
    const double x0 = grid.box.lo[0];
    const double x1 = grid.box.hi[0];
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
    auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    auto os = open_out(svg);
    svg_open(os, title);
    svg_axes(os, x0, x1, ymin, ymax, left, right, top, bottom);
    if (ymin < 0.0 && ymax > 0.0) {
        os << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(0.0)) << "\" x2=\"" << num(right) << "\" y2=\""
           << num(py(0.0)) << "\" stroke=\"#999999\" stroke-dasharray=\"3,3\"/>\n";
    }
    auto polyline = [&](const GridDump& g, const char* stroke, const char* extra) {
        os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"" << extra << " points=\"";
        for (int i = 0; i < n; ++i) {
            os << (i ? " " : "") << num(px(g.coord(0, i))) << ',' << num(py(g.values[i]));
        }
        os << "\"/>\n";
    };
    if (reference) {
        polyline(*reference, "#888888", " stroke-dasharray=\"6,4\"");
    }
    polyline(grid, "#1f4e9a", "");
    os << "</svg>\n";
    close_out(os, svg);

    const auto csv_path = twin(svg);
    auto csv = open_out(csv_path);
    csv.precision(17);
    csv << "x,value" << (reference ? ",reference" : "") << '\n';
    for (int i = 0; i < n; ++i) {
        csv << grid.coord(0, i) << ',' << grid.values[i];
        if (reference) {
            csv << ',' << reference->values[i];
        }
        csv << '\n';
    }
    close_out(csv, csv_path);
}

std::vector<std::array<double, 4>> zero_contour(const GridDump& grid)
{
    if (grid.box.dim != 2) {
        throw std::invalid_argument("zero contour needs a 2D grid");
    }
    std::vector<std::array<double, 4>> segs;
    const int nx = grid.res[0];
    const int ny = grid.res[1];
    for (int i = 0; i + 1 < nx; ++i) {
        for (int j = 0; j + 1 < ny; ++j) {
            // corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
            const std::array<std::array<int, 2>, 4> c{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
            std::vector<std::array<double, 2>> cross;
            for (int e = 0; e < 4; ++e) {
                const auto& a = c[e];
                const auto& b = c[(e + 1) % 4];
                const double va = grid.at(a[0], a[1]);
                const double vb = grid.at(b[0], b[1]);
                if ((va > 0.0) != (vb > 0.0)) {
                    const double t = va / (va - vb);
                    const double xa = grid.coord(0, a[0]);
                    const double ya = grid.coord(1, a[1]);
                    const double xb = grid.coord(0, b[0]);
                    const double yb = grid.coord(1, b[1]);
                    cross.push_back({xa + t * (xb - xa), ya + t * (yb - ya)});
                }
            }
            for (std::size_t k = 0; k + 1 < cross.size(); k += 2) {
                segs.push_back({cross[k][0], cross[k][1], cross[k + 1][0], cross[k + 1][1]});
            }
        }
    }
    return segs;
}

void write_heatmap(const std::filesystem::path& svg, const GridDump& grid, const std::string& title)
{
    if (grid.box.dim != 2) {
        throw std::invalid_argument("heatmaps need a 2D grid");
    }
    const int nx = grid.res[0];
    const int ny = grid.res[1];
    double scale = 0.0;
    for (double v : grid.values) {
        scale = std::max(scale, std::abs(v));
    }
    const double side = kHeight - 40.0 - kMargin;
    const double left = (kWidth - side) / 2.0;
    const double top = 40.0;
    const double x0 = grid.box.lo[0];
    const double x1 = grid.box.hi[0];
    const double y0 = grid.box.lo[1];
    const double y1 = grid.box.hi[1];
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * side; };
    auto py = [&](double y) { return top + side - (y - y0) / (y1 - y0) * side; };
    const double cw = side / nx;
    const double ch = side / ny;

    auto os = open_out(svg);
    svg_open(os, title);
    os << "<g shape-rendering=\"crispEdges\">\n";
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            os << "<rect x=\"" << num(left + i * cw) << "\" y=\"" << num(top + side - (j + 1) * ch) << "\" width=\""
               << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << colour(grid.at(i, j), scale) << "\"/>\n";
        }
    }
    os << "</g>\n";
    const auto segs = zero_contour(grid);
    if (!segs.empty()) {
        os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"";
        for (const auto& s : segs) {
            os << 'M' << num(px(s[0])) << ',' << num(py(s[1])) << 'L' << num(px(s[2])) << ',' << num(py(s[3]));
        }
        os << "\"/>\n";
    }
    svg_axes(os, x0, x1, y0, y1, left, left + side, top, top + side);
    os << "<text x=\"" << num(left + side + 8) << "\" y=\"" << num(top + 12)
       << "\" font-family=\"sans-serif\" font-size=\"11\">max |v| " << label(scale) << "</text>\n";
    os << "</svg>\n";
    close_out(os, svg);

    const auto csv_path = twin(svg);
    auto csv = open_out(csv_path);
    csv.precision(17);
    csv << "x,y,value\n";
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            csv << grid.coord(0, i) << ',' << grid.coord(1, j) << ',' << grid.at(i, j) << '\n';
        }
    }
    close_out(csv, csv_path);
}

void write_histogram_plot(const std::filesystem::path& svg, const ResidualHistogram& hist, const std::string& title)
{
    if (hist.counts.empty() || hist.edges.size() != hist.counts.size() + 1) {
        throw std::invalid_argument("malformed histogram");
    }
    const int peak = std::max(1, *std::max_element(hist.counts.begin(), hist.counts.end()));
    const double left = kMargin;
    const double right = kWidth - 20.0;
    const double top = 40.0;
    const double bottom = kHeight - kMargin;
    const double bw = (right - left) / static_cast<double>(hist.counts.size());

    auto os = open_out(svg);
    svg_open(os, title);
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        const double h = (bottom - top) * hist.counts[b] / peak;
        os << "<rect x=\"" << num(left + b * bw) << "\" y=\"" << num(bottom - h) << "\" width=\"" << num(bw)
           << "\" height=\"" << num(h) << "\" fill=\"#4a7bc8\" data-count=\"" << hist.counts[b] << "\"/>\n";
    }
    svg_axes(os, hist.edges.front(), hist.edges.back(), 0.0, peak, left, right, top, bottom);
    os << "</svg>\n";
    close_out(os, svg);

    const auto csv_path = twin(svg);
    auto csv = open_out(csv_path);
    csv.precision(17);
    csv << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        csv << hist.edges[b] << ',' << hist.edges[b + 1] << ',' << hist.counts[b] << '\n';
    }
    close_out(csv, csv_path);
}

nlohmann::json to_json(const ErrorMetrics& m)
{
    return {{"mae", m.mae}, {"max_abs_error", m.max_abs}, {"count", m.count}};
}

nlohmann::json to_json(const ResidualHistogram& h)
{
    return {{"kind", to_string(h.kind)}, {"p", h.p},           {"samples", h.samples}, {"degenerate", h.degenerate},
            {"mean", h.mean},            {"stddev", h.stddev}, {"edges", h.edges},     {"counts", h.counts}};
}

}  // namespace redist
