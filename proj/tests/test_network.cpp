#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "redist/activation.hpp"
#include "redist/jet_network.hpp"
#include "redist/network.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace redist;

namespace {

double g_at(const MlpConfig& cfg, const std::vector<double>& theta, const Point& x)
{
    return forward<double, double>(cfg, std::span<const double>(theta), std::span<const double>(x.data(), 3));
}

}  // namespace

TEST_CASE("softplus examples")
{
    CHECK(softplus(0.0, 100.0) == doctest::Approx(std::log(2.0) / 100.0).epsilon(1e-15));
    CHECK(softplus(0.0, 100.0) == doctest::Approx(0.00693147).epsilon(1e-6));
    CHECK(std::abs(softplus(1.0, 100.0) - 1.0) < 1e-15);
    const double tiny = softplus(-1.0, 100.0);
    CHECK(std::isfinite(tiny));
    CHECK(tiny >= 0.0);
    CHECK(tiny == doctest::Approx(std::exp(-100.0) / 100.0).epsilon(1e-12));
    CHECK(softplus(1e4, 100.0) == 1e4);
    CHECK(softplus(-1e4, 100.0) == 0.0);
    CHECK(sigmoid(1e4, 100.0) == 1.0);
    CHECK(sigmoid(-1e4, 100.0) == 0.0);
    CHECK(sigmoid(0.0, 100.0) == 0.5);
}

TEST_CASE("forward examples")
{
    MlpConfig cfg;
    cfg.layers = 4;
    cfg.width = 8;
    cfg.input_dim = 2;
    cfg.skip_layer = 2;
    const std::vector<double> zero(parameter_count(cfg), 0.0);
    std::mt19937_64 rng(1);
    Box box;
    box.dim = 2;
    box.lo = {-2.0, -2.0, 0.0};
    box.hi = {2.0, 2.0, 0.0};
    for (int i = 0; i < 20; ++i) {
        CHECK(g_at(cfg, zero, test::random_point(box, rng)) == 0.0);
    }

    MlpConfig affine;
    affine.layers = 1;
    affine.width = 1;
    affine.input_dim = 1;
    affine.skip_layer = 0;
    REQUIRE(parameter_count(affine) == 2);
    const std::vector<double> wb{1.0, 0.5};
    for (double x : {-2.0, 0.0, 0.25, 3.0}) {
        CHECK(g_at(affine, wb, {x, 0.0, 0.0}) == x + 0.5);
    }
}

TEST_CASE("layer shapes with and without skip")
{
    MlpConfig cfg;
    cfg.layers = 4;
    cfg.width = 64;
    cfg.input_dim = 3;
    cfg.skip_layer = 2;
    const auto shapes = layer_shapes(cfg);
    REQUIRE(shapes.size() == 4);
    CHECK(shapes[0].in == 3);
    CHECK(shapes[1].in == 64);
    CHECK(shapes[2].in == 67);
    CHECK(shapes[2].skip);
    CHECK(shapes[3].out == 1);
    CHECK(parameter_count(cfg) == (3 * 64 + 64) + (64 * 64 + 64) + (67 * 64 + 64) + (64 + 1));
    CHECK(MlpConfig::middle(4) == 2);
    CHECK(MlpConfig::middle(8) == 4);
    CHECK(MlpConfig::middle(5) == 3);
    cfg.skip_layer = 0;
    CHECK(parameter_count(cfg) == (3 * 64 + 64) + 2 * (64 * 64 + 64) + (64 + 1));
}

TEST_CASE("config validation")
{
    MlpConfig cfg;
    cfg.input_dim = 2;
    cfg.validate();
    cfg.skip_layer = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.skip_layer = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.skip_layer = 2;
    cfg.width = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.width = 64;
    cfg.beta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.beta = 100.0;
    cfg.input_dim = 4;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    AnsatzConfig a;
    a.validate();
    a.alpha = 0.0;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    a.alpha = INFINITY;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);

    CHECK(ansatz_mode_from_string("sign") == AnsatzMode::smoothed_sign);
    CHECK(ansatz_mode_from_string("product") == AnsatzMode::product);
    CHECK(to_string(AnsatzMode::smoothed_sign) == "sign");
    CHECK_THROWS_AS(ansatz_mode_from_string("relu"), std::invalid_argument);

    AnsatzField f = test::small_field("circle2d", 1);
    f.validate();
    f.mlp.input_dim = 3;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f = test::small_field("circle2d", 1);
    f.params.values.pop_back();
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("ansatz examples")
{
    AnsatzConfig sign;
    CHECK(ansatz_factor(sign, 10.0) * 1.0 == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(std::tanh(1.0) == doctest::Approx(0.7615941).epsilon(1e-7));
    AnsatzConfig prod;
    prod.mode = AnsatzMode::product;
    CHECK(ansatz_factor(prod, 2.0) * 3.0 == 6.0);
}

TEST_CASE("exact zero-set preservation for any parameters")
{
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (const std::string& name : builtin_names()) {
        for (AnsatzMode mode : {AnsatzMode::smoothed_sign, AnsatzMode::product}) {
            AnsatzField f = test::small_field(name, 5, mode);
            for (int trial = 0; trial < 10; ++trial) {
                for (double& v : f.params.values) {
                    v = normal(rng);
                }
                for (const Point& z : exact_zero_points(f.scene)) {
                    CHECK(ansatz_eval(f, z) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("forward with duals matches finite differences")
{
    const AnsatzField field = test::small_field("csg3d", 3);
    const std::span<const double> theta(field.params.values);
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        const Point x = test::random_point(field.scene.domain, rng);
        auto g = [&](const auto& p) {
            using S = std::decay_t<decltype(p[0])>;
            return forward<double, S>(field.mlp, theta, std::span<const S>(p.data(), 3));
        };
        const auto gx = grad_x<3>(g, x);
        CHECK(gx.value == g_at(field.mlp, field.params.values, x));
        std::array<double, 3> fd{};
        const double h = 1e-6;
        for (int i = 0; i < 3; ++i) {
            Point xp = x;
            Point xm = x;
            xp[i] += h;
            xm[i] -= h;
            fd[i] = (g_at(field.mlp, field.params.values, xp) - g_at(field.mlp, field.params.values, xm)) / (2.0 * h);
        }
        worst = std::max(worst, test::rel_err(gx.grad, fd));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("geometric initialisation")
{
    MlpConfig cfg;
    cfg.input_dim = 2;
    cfg.width = 32;
    const NetworkParams a = geometric_init(cfg, 42);
    const NetworkParams b = geometric_init(cfg, 42);
    const NetworkParams c = geometric_init(cfg, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);

    const auto shapes = layer_shapes(cfg);
    const LayerShape& last = shapes.back();
    for (int k = 0; k < last.in; ++k) {
        CHECK(a.values[last.weights + k] == std::sqrt(std::numbers::pi / last.in));
    }
    CHECK(a.values[last.bias] == -1.0);
    for (std::size_t l = 0; l + 1 < shapes.size(); ++l) {
        for (int r = 0; r < shapes[l].out; ++r) {
            CHECK(a.values[shapes[l].bias + r] == 0.0);
        }
    }

    // Sample moments of the 32 x 32 hidden weights of layer 1.
    const LayerShape& s1 = shapes[1];
    const std::size_t n = static_cast<std::size_t>(s1.in) * s1.out;
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mean += a.values[s1.weights + k];
        sq += a.values[s1.weights + k] * a.values[s1.weights + k];
    }
    mean /= static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - mean * mean;
    const double sigma2 = 2.0 / s1.out;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(sigma2 / static_cast<double>(n)));
    CHECK(std::abs(var / sigma2 - 1.0) < 4.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("initial network grows with radius")
{
    for (int dim = 1; dim <= 3; ++dim) {
        MlpConfig cfg;
        cfg.input_dim = dim;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const NetworkParams p = geometric_init(cfg, seed);
            const double g0 = g_at(cfg, p.values, {0.0, 0.0, 0.0});
            std::mt19937_64 rng(seed * 101);
            std::normal_distribution<double> normal;
            int larger = 0;
            for (int k = 0; k < 100; ++k) {
                Point dir{0.0, 0.0, 0.0};
                double norm = 0.0;
                for (int i = 0; i < dim; ++i) {
                    dir[i] = normal(rng);
                    norm += dir[i] * dir[i];
                }
                norm = std::sqrt(norm);
                for (int i = 0; i < dim; ++i) {
                    dir[i] *= 2.0 / norm;
                }
                larger += g_at(cfg, p.values, dir) > g0 ? 1 : 0;
            }
            INFO("dim " << dim << " seed " << seed);
            CHECK(larger == 100);
        }
    }
}

TEST_CASE("zeroed skip columns reduce to a network without skip")
{
    AnsatzField with = test::small_field("csg3d", 8);
    const auto shapes = layer_shapes(with.mlp);
    const LayerShape& s = shapes[with.mlp.skip_layer];
    REQUIRE(s.skip);
    for (int r = 0; r < s.out; ++r) {
        for (int c = with.mlp.width; c < s.in; ++c) {
            with.params.values[s.weights + static_cast<std::size_t>(r) * s.in + c] = 0.0;
        }
    }
    MlpConfig plain = with.mlp;
    plain.skip_layer = 0;
    std::vector<double> theta;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const LayerShape& sh = shapes[l];
        for (int r = 0; r < sh.out; ++r) {
            const int keep = sh.skip ? with.mlp.width : sh.in;
            for (int c = 0; c < keep; ++c) {
                theta.push_back(with.params.values[sh.weights + static_cast<std::size_t>(r) * sh.in + c]);
            }
        }
        for (int r = 0; r < sh.out; ++r) {
            theta.push_back(with.params.values[sh.bias + r]);
        }
    }
    REQUIRE(theta.size() == parameter_count(plain));
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        const Point x = test::random_point(with.scene.domain, rng);
        CHECK(g_at(with.mlp, with.params.values, x) == g_at(plain, theta, x));
    }
}

TEST_CASE("sign consistency in smoothed-sign mode")
{
    std::mt19937_64 rng(12);
    for (const std::string& name : builtin_names()) {
        const AnsatzField f = test::small_field(name, 31);
        for (int i = 0; i < 500; ++i) {
            const Point x = test::random_point(f.scene.domain, rng);
            const double fx = f.scene.f(x);
            const double g = g_at(f.mlp, f.params.values, x);
            const double d = ansatz_eval(f, x);
            auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
            CHECK(sgn(d) == sgn(fx) * sgn(g));
        }
    }
}

TEST_CASE("forward is pure")
{
    const AnsatzField f = test::small_field("circle2d", 2);
    const Point x{0.3, -0.4, 0.0};
    const double first = ansatz_eval(f, x);
    for (int i = 0; i < 5; ++i) {
        CHECK(ansatz_eval(f, x) == first);
    }
}

TEST_CASE("batched jets agree with the scalar duals")
{
    for (const std::string& name : builtin_names()) {
        for (int skip : {0, 2}) {
            AnsatzField f = test::small_field(name, 23);
            f.mlp.skip_layer = skip;
            f.params = geometric_init(f.mlp, 23);
            JetNetwork net(f.mlp, f.params.values);
            std::mt19937_64 rng(1);
            std::vector<Point> pts;
            for (int i = 0; i < 37; ++i) {
                pts.push_back(test::random_point(f.scene.domain, rng));
            }
            for (int order = 0; order <= 2; ++order) {
                net.forward(pts, order);
                CHECK(net.channels() == JetNetwork::channels_for(f.scene.dim, order));
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    auto g = [&](const auto& p) {
                        using S = std::decay_t<decltype(p[0])>;
                        return forward<double, S>(f.mlp, std::span<const double>(f.params.values),
                                                  std::span<const S>(p.data(), 3));
                    };
                    const auto ref = hessian_x<3>(g, pts[i]);
                    const Jet j = net.output_jet(static_cast<int>(i));
                    CHECK(j.value == doctest::Approx(ref.value).epsilon(1e-12));
                    if (order >= 1) {
                        for (int a = 0; a < f.scene.dim; ++a) {
                            CHECK(j.grad[a] == doctest::Approx(ref.grad[a]).epsilon(1e-10).scale(1.0));
                        }
                    }
                    if (order == 2) {
                        for (int a = 0; a < f.scene.dim; ++a) {
                            for (int b = 0; b < f.scene.dim; ++b) {
                                CHECK(j.h(a, b) == doctest::Approx(ref.hess[a * 3 + b]).epsilon(1e-9).scale(1.0));
                            }
                        }
                    }
                }
            }
        }
    }
}
