#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "redist/evaluator.hpp"
#include "redist/trainer.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

using namespace redist;

namespace {

using D = FunctionField::D;

FunctionField segment_distance()
{
    return FunctionField(1, [](const std::array<D, 3>& x) { return x[0].val < 0.5 ? x[0] : D(1.0) - x[0]; });
}

FunctionField parabola()
{
    return FunctionField(1, [](const std::array<D, 3>& x) { return D(0.5) * (x[0] * (D(1.0) - x[0])); });
}

Box box1(double lo, double hi)
{
    Box b;
    b.dim = 1;
    b.lo = {lo, 0.0, 0.0};
    b.hi = {hi, 0.0, 0.0};
    return b;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("field adapters")
{
    const Scene circle = builtin_scene("circle2d");
    const auto f = expr_field(circle);
    CHECK(f->dim() == 2);
    const std::vector<Point> pts{{0.0, 0.0, 0.0}, {1.0, 2.0, 0.0}};
    const auto jets = f->jets(pts, 2);
    CHECK(jets[0].value == 1.0);
    CHECK(jets[1].value == -4.0);
    CHECK(jets[1].grad[0] == -2.0);
    CHECK(jets[1].grad[1] == -4.0);
    CHECK(jets[1].h(0, 0) == -2.0);
    CHECK(jets[1].h(0, 1) == 0.0);
    const auto order0 = f->jets(pts, 0);
    CHECK(order0[1].grad[0] == 0.0);

    const ValueField v(2, [](const Point& p) { return p[0] + p[1]; });
    CHECK(v.values(pts)[1] == 3.0);
    CHECK_THROWS_AS(v.jets(pts, 1), std::logic_error);

    const AnsatzField a = test::small_field("circle2d", 3);
    const NetworkField nf(a);
    CHECK(nf.values(pts)[1] == doctest::Approx(ansatz_eval(a, pts[1])).epsilon(1e-13));
}

TEST_CASE("grid evaluation examples")
{
    const ValueField c(2, [](const Point&) { return 2.5; });
    const Box square = builtin_scene("circle2d").domain;
    const GridDump g = grid_eval(c, square, 7);
    CHECK(g.values.size() == 49);
    CHECK(g.size() == 49);
    for (double v : g.values) {
        CHECK(v == 2.5);
    }

    const GridDump e = grid_eval(*expr_field(builtin_scene("circle2d")), square, 5);
    CHECK(e.coord(0, 2) == 0.0);
    CHECK(e.at(2, 2) == 1.0);
    CHECK(e.at(0, 0) == -7.0);

    const AnsatzField seg = test::small_field("segment1d", 4);
    const GridDump s = grid_eval(NetworkField(seg), seg.scene.domain, 6);
    CHECK(s.coord(0, 2) == 0.0);
    CHECK(s.coord(0, 3) == 1.0);
    CHECK(s.at(2) == 0.0);
    CHECK(s.at(3) == 0.0);
    CHECK(s.at(0) != 0.0);

    const GridDump minimal = grid_eval(c, square, 2);
    CHECK(minimal.size() == 4);
    CHECK(minimal.coord(1, 1) == 2.0);
    CHECK_THROWS_AS(grid_eval(c, square, 1), std::invalid_argument);
}

TEST_CASE("grid layout is row-major with the first axis slowest")
{
    const Box cube = builtin_scene("csg3d").domain;
    const ValueField f(3, [](const Point& p) { return 100.0 * p[0] + 10.0 * p[1] + p[2]; });
    const GridDump g = grid_eval(f, cube, 3);
    REQUIRE(g.size() == 27);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                const double expect = 100.0 * g.coord(0, i) + 10.0 * g.coord(1, j) + g.coord(2, k);
                CHECK(g.at(i, j, k) == expect);
                CHECK(g.values[(i * 3 + j) * 3 + k] == expect);
            }
        }
    }
    const GridDump slice = grid_eval_slice(f, cube, 2, 0.5, 4);
    CHECK(slice.box.dim == 2);
    CHECK(slice.at(1, 3) == 100.0 * slice.coord(0, 1) + 10.0 * slice.coord(1, 3) + 0.5);
    const GridDump sx = grid_eval_slice(f, cube, 0, -1.0, 4);
    CHECK(sx.at(3, 0) == -100.0 + 10.0 * 2.0 - 2.0);
    CHECK_THROWS_AS(grid_eval_slice(f, box1(0, 1), 0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("grid evaluation is repeatable")
{
    const AnsatzField a = test::small_field("csg3d", 12);
    const NetworkField f(a);
    const GridDump g1 = grid_eval(f, a.scene.domain, 9);
    const GridDump g2 = grid_eval(f, a.scene.domain, 9);
    CHECK(g1.values == g2.values);
}

TEST_CASE("grid files round-trip exactly")
{
    const AnsatzField a = test::small_field("circle2d", 5);
    const GridDump g = grid_eval(NetworkField(a), a.scene.domain, 11);
    std::stringstream ss;
    write_grid(ss, g);
    std::string header;
    std::getline(std::istringstream(ss.str()) >> std::ws, header);
    CHECK(header == "# dim=2 res=11,11 box=-2,2;-2,2 order=row-major");
    CHECK(count(ss.str(), "\n") == 12);
    const GridDump back = read_grid(ss);
    CHECK(back.box.dim == 2);
    CHECK(back.res == g.res);
    CHECK(back.box.lo == g.box.lo);
    CHECK(back.box.hi == g.box.hi);
    CHECK(back.values == g.values);

    std::istringstream bad1("1,2,3\n");
    CHECK_THROWS_AS(read_grid(bad1), std::runtime_error);
    std::istringstream bad2("# dim=1 res=3 box=0,1 order=row-major\n1,2\n");
    CHECK_THROWS_AS(read_grid(bad2), std::runtime_error);
    std::istringstream bad3("# dim=1 res=2 box=0,1 order=column-major\n1,2\n");
    CHECK_THROWS_AS(read_grid(bad3), std::runtime_error);
    std::istringstream bad4("# dim=1 res=2 box=0,1 order=row-major\n1,abc\n");
    CHECK_THROWS_AS(read_grid(bad4), std::runtime_error);
}

TEST_CASE("residual histograms on exact stubs")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::mt19937_64 rng(seed);
        const ResidualSamples s = residual_samples(segment_distance(), box1(-2, 3), ResidualKind::grad_norm, 2.0,
                                                   1000, rng);
        const ResidualHistogram h = residual_histogram(s);
        CHECK(h.counts.size() == 101);
        CHECK(h.edges.size() == 102);
        CHECK(h.mean == 1.0);
        CHECK(h.stddev == 0.0);
        int holding_one = -1;
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            if (h.edges[b] <= 1.0 && 1.0 < h.edges[b + 1]) {
                holding_one = static_cast<int>(b);
            }
        }
        REQUIRE(holding_one >= 0);
        CHECK(h.counts[holding_one] == 1000);
        CHECK(fraction_in(s, 0.9, 1.1) == 1.0);

        const ResidualSamples p = residual_samples(parabola(), box1(0, 1), ResidualKind::p_laplacian, 2.0, 500, rng);
        for (double v : p.values) {
            CHECK(v == -1.0);
        }
        const ResidualHistogram hp = residual_histogram(p);
        CHECK(hp.mean == -1.0);
        CHECK(hp.counts[50] == 500);
    }
}

TEST_CASE("histogram bookkeeping")
{
    ResidualSamples s;
    s.values = {0.0, 1.0, 2.0, 3.0, 100.0};
    s.degenerate = 3;
    const ResidualHistogram h = residual_histogram(s, 10);
    int total = 0;
    for (int c : h.counts) {
        total += c;
    }
    CHECK(total == 5);
    CHECK(h.samples == 5);
    CHECK(h.degenerate == 3);
    CHECK(h.edges.front() == doctest::Approx(h.mean - 5.0 * h.stddev));
    CHECK(h.edges.back() == h.mean + 5.0 * h.stddev);
    CHECK(fraction_in(s, 0.5, 2.5) == doctest::Approx(0.4));
    CHECK_THROWS_AS(residual_histogram(s, 0), std::invalid_argument);
    const nlohmann::json j = to_json(h);
    CHECK(j["kind"] == "grad_norm");
    CHECK(j["counts"].size() == 10);
    CHECK(j["degenerate"] == 3);
}

TEST_CASE("degenerate p-Laplacian samples are counted")
{
    const FunctionField flat(1, [](const std::array<D, 3>&) { return D(0.25); });
    std::mt19937_64 rng(1);
    const ResidualSamples s = residual_samples(flat, box1(0, 1), ResidualKind::p_laplacian, 8.0, 100, rng);
    CHECK(s.degenerate == 100);
    CHECK(s.values.empty());
    CHECK(residual_histogram(s).samples == 0);
    CHECK_THROWS_AS(residual_samples(flat, box1(0, 1), ResidualKind::p_laplacian, 1.0, 10, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(residual_samples(flat, box1(0, 1), ResidualKind::grad_norm, 2.0, 0, rng), std::invalid_argument);
}

TEST_CASE("comparison against an oracle")
{
    const Scene circle = builtin_scene("circle2d");
    const FunctionField exact(2, [](const std::array<D, 3>& x) { return D(1.0) - sqrt(x[0] * x[0] + x[1] * x[1]); });
    std::mt19937_64 rng(4);
    const Batch pts = sample_uniform(circle.domain, 2000, rng);
    const Reference ref = [](const Point& x) { return analytic_sdf("circle2d", x); };
    const ErrorMetrics self = compare_to_oracle(exact, ref, pts, default_mask(circle));
    CHECK(self.mae == 0.0);
    CHECK(self.max_abs == 0.0);
    CHECK(self.count < pts.size());
    CHECK(self.count > pts.size() * 9 / 10);
    const ErrorMetrics all = compare_to_oracle(exact, ref, pts);
    CHECK(all.count == pts.size());

    const ValueField off(2, [](const Point& x) { return analytic_sdf("circle2d", x) + 0.25; });
    const ErrorMetrics shifted = compare_to_oracle(off, ref, pts);
    CHECK(shifted.mae == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(shifted.max_abs == doctest::Approx(0.25).epsilon(1e-12));
    const nlohmann::json j = to_json(shifted);
    CHECK(j["count"] == pts.size());
}

TEST_CASE("training improves on the untrained circle field")
{
    const Scene circle = builtin_scene("circle2d");
    MlpConfig mlp;
    mlp.input_dim = 2;
    TrainConfig cfg;
    cfg.iterations = 300;
    cfg.checkpoint_every = 0;
    cfg.batch_size = 256;
    cfg.learning_rate = 1e-3;
    AnsatzField init{circle, mlp, geometric_init(mlp, init_stream(cfg.seed)()), {}};
    const TrainResult trained = train(circle, mlp, {}, cfg);
    std::mt19937_64 rng(6);
    const Batch pts = sample_uniform(circle.domain, 4000, rng);
    const Reference ref = [](const Point& x) { return analytic_sdf("circle2d", x); };
    const double before = compare_to_oracle(NetworkField(init), ref, pts, default_mask(circle)).mae;
    const double after = compare_to_oracle(NetworkField(trained.field), ref, pts, default_mask(circle)).mae;
    CHECK(after < before);
}

TEST_CASE("zero-set audit")
{
    const AnsatzField seg = test::small_field("segment1d", 3);
    ZeroSetSample exact;
    exact.dim = 1;
    exact.points = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    CHECK(audit_zero_set(NetworkField(seg), exact) == 0.0);

    for (AnsatzMode mode : {AnsatzMode::smoothed_sign, AnsatzMode::product}) {
        const AnsatzField c = test::small_field("circle2d", 3, mode);
        const ZeroSetSample s = extract_zero_set(c.scene, 0.02);
        double gmax = 0.0;
        for (const Point& p : s.points) {
            gmax = std::max(gmax, std::abs(forward<double, double>(c.mlp, std::span<const double>(c.params.values),
                                                                   std::span<const double>(p.data(), 3))));
        }
        CHECK(audit_zero_set(NetworkField(c), s) < 1e-10 * (1.0 + gmax));
    }
    CHECK_THROWS_AS(audit_zero_set(NetworkField(seg), ZeroSetSample{}), std::invalid_argument);
}

TEST_CASE("default masks")
{
    const Mask seg = default_mask(builtin_scene("segment1d"));
    CHECK_FALSE(seg({0.5, 0.0, 0.0}));
    CHECK_FALSE(seg({0.54, 0.0, 0.0}));
    CHECK(seg({0.56, 0.0, 0.0}));
    const Mask circ = default_mask(builtin_scene("circle2d"));
    CHECK_FALSE(circ({0.05, 0.05, 0.0}));
    CHECK(circ({0.1, 0.05, 0.0}));
    CHECK_FALSE(static_cast<bool>(default_mask(builtin_scene("csg3d"))));
}

TEST_CASE("line plot has one vertex per node")
{
    const auto dir = test::scratch_dir("line");
    const GridDump g = grid_eval(segment_distance(), box1(-2, 3), 57);
    write_line_plot(dir / "seg.svg", g, "segment & <distance>", &g);
    const std::string svg = slurp(dir / "seg.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("segment &amp; &lt;distance&gt;") != std::string::npos);
    std::smatch m;
    const std::regex last(R"re(stroke="#1f4e9a" stroke-width="1.5" points="([^"]*)")re");
    REQUIRE(std::regex_search(svg, m, last));
    const std::string points = m[1];
    CHECK(count(points, ",") == 57);
    CHECK(count(svg, "<polyline") == 2);
    const std::string csv = slurp(dir / "seg.csv");
    CHECK(csv.rfind("x,value,reference\n", 0) == 0);
    CHECK(count(csv, "\n") == 58);
    CHECK_THROWS_AS(write_line_plot(dir / "x.svg", grid_eval(*expr_field(builtin_scene("circle2d")),
                                                            builtin_scene("circle2d").domain, 3),
                                    "t"),
                    std::invalid_argument);
}

TEST_CASE("heatmap has one cell per node and a zero contour")
{
    const auto dir = test::scratch_dir("heat");
    const Scene circle = builtin_scene("circle2d");
    const GridDump g = grid_eval(*expr_field(circle), circle.domain, 23);
    write_heatmap(dir / "circle.svg", g, "circle");
    const std::string svg = slurp(dir / "circle.svg");
    const auto open = svg.find("<g shape-rendering");
    const auto close = svg.find("</g>");
    REQUIRE(open != std::string::npos);
    CHECK(count(svg.substr(open, close - open), "<rect") == 23 * 23);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(count(slurp(dir / "circle.csv"), "\n") == 23 * 23 + 1);

    const auto segs = zero_contour(grid_eval(*expr_field(circle), circle.domain, 81));
    CHECK(segs.size() > 40);
    for (const auto& s : segs) {
        CHECK(std::hypot(s[0], s[1]) == doctest::Approx(1.0).epsilon(0.01));
        CHECK(std::hypot(s[2], s[3]) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("histogram bars are proportional to counts")
{
    const auto dir = test::scratch_dir("hist");
    ResidualHistogram h;
    h.counts = {4, 0, 10, 7, 1};
    h.edges = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    write_histogram_plot(dir / "h.svg", h, "hist");
    const std::string svg = slurp(dir / "h.svg");
    const std::regex bar(R"re(height="([0-9.eE+-]+)" fill="#4a7bc8" data-count="([0-9]+)")re");
    std::vector<std::pair<double, int>> bars;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), bar); it != std::sregex_iterator(); ++it) {
        bars.emplace_back(std::stod((*it)[1]), std::stoi((*it)[2]));
    }
    REQUIRE(bars.size() == 5);
    const double unit = bars[2].first / 10.0;
    for (int b : {0, 3, 4}) {
        CHECK(bars[b].first == doctest::Approx(unit * bars[b].second).epsilon(1e-3));
    }
    CHECK(bars[1].first == 0.0);
    CHECK(count(slurp(dir / "h.csv"), "\n") == 6);
}

TEST_CASE("plot I/O errors name the path")
{
    const GridDump g = grid_eval(segment_distance(), box1(0, 1), 5);
    const std::filesystem::path bad = "/nonexistent-dir/plot.svg";
    try {
        write_line_plot(bad, g, "t");
        FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/plot.svg") != std::string::npos);
    }
}
