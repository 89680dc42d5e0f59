#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "redist/oracle.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace redist;

namespace {

std::uint64_t bits(double v)
{
    std::uint64_t u = 0;
    std::memcpy(&u, &v, sizeof u);
    return u;
}

// Fourth-order centered differences on the staggered half-step grid.
template <class F>
double staggered(F&& f, double c, double h)
{
    return (f(c - 1.5 * h) - 27.0 * f(c - 0.5 * h) + 27.0 * f(c + 0.5 * h) - f(c + 1.5 * h)) / (24.0 * h);
}

double flux_residual(double p, double x, double h)
{
    auto u = [&](double t) { return analytic_ppoisson_1d(p, t); };
    auto flux = [&](double c) {
        const double g = staggered(u, c, h);
        return std::pow(std::abs(g), p - 2.0) * g;
    };
    return staggered(flux, x, h) + 1.0;
}

}  // namespace

TEST_CASE("analytic distance examples")
{
    CHECK(analytic_sdf("segment1d", {0.5, 0.0, 0.0}) == 0.5);
    CHECK(analytic_sdf("circle2d", {2.0, 0.0, 0.0}) == -1.0);
    CHECK(analytic_sdf("segment1d", {-1.0, 0.0, 0.0}) == -1.0);
    CHECK(analytic_sdf("segment1d", {0.0, 0.0, 0.0}) == 0.0);
    CHECK(analytic_sdf("circle2d", {0.0, 0.0, 0.0}) == 1.0);
    CHECK(has_analytic_sdf("segment1d"));
    CHECK(has_analytic_sdf("circle2d"));
    CHECK_FALSE(has_analytic_sdf("csg3d"));
    CHECK_THROWS_AS(analytic_sdf("csg3d", {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("analytic distances have unit gradient away from medial points")
{
    std::mt19937_64 rng(1);
    const double h = 1e-6;
    for (const char* name : {"segment1d", "circle2d"}) {
        const Scene s = builtin_scene(name);
        int checked = 0;
        while (checked < 500) {
            const Point x = test::random_point(s.domain, rng);
            if (s.dim == 1 ? std::abs(x[0] - 0.5) < 1e-3 : std::hypot(x[0], x[1]) < 1e-3) {
                continue;
            }
            double norm2 = 0.0;
            for (int i = 0; i < s.dim; ++i) {
                Point xp = x;
                Point xm = x;
                xp[i] += h;
                xm[i] -= h;
                const double g = (analytic_sdf(name, xp) - analytic_sdf(name, xm)) / (2.0 * h);
                norm2 += g * g;
            }
            CHECK(std::sqrt(norm2) == doctest::Approx(1.0).epsilon(1e-6));
            ++checked;
        }
    }
}

TEST_CASE("1D p-Poisson solution examples")
{
    CHECK(analytic_ppoisson_1d(2.0, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(analytic_ppoisson_1d(8.0, 0.5) == doctest::Approx(7.0 / 8.0 * std::pow(0.5, 8.0 / 7.0)).epsilon(1e-15));
    CHECK(analytic_ppoisson_1d(8.0, 0.5) == doctest::Approx(0.3962541031).epsilon(1e-9));
    for (double p : {2.0, 3.0, 8.0, 50.0}) {
        CHECK(std::abs(analytic_ppoisson_1d(p, 0.0)) < 1e-15);
        CHECK(std::abs(analytic_ppoisson_1d(p, 1.0)) < 1e-15);
    }
    for (double x : {0.1, 0.3, 0.77}) {
        CHECK(analytic_ppoisson_1d(2.0, x) == doctest::Approx(x * (1.0 - x) / 2.0).epsilon(1e-14));
    }
    // Approaches the distance as p grows.
    CHECK(std::abs(analytic_ppoisson_1d(1000.0, 0.3) - 0.3) < 2e-3);
    CHECK_THROWS_AS(analytic_ppoisson_1d(2.0, -0.1), std::out_of_range);
    CHECK_THROWS_AS(analytic_ppoisson_1d(2.0, 1.1), std::out_of_range);
    CHECK_THROWS_AS(analytic_ppoisson_1d(1.5, 0.5), std::invalid_argument);
}

TEST_CASE("1D p-Poisson solution satisfies its ODE")
{
    const double h = 1e-3;
    for (double p : {2.0, 8.0}) {
        double worst = 0.0;
        for (int i = 3; i <= 997; ++i) {
            const double x = i * h;
            if (std::abs(x - 0.5) < 0.05) {
                continue;
            }
            worst = std::max(worst, std::abs(flux_residual(p, x, h)));
        }
        INFO("p = " << p);
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("zero set of the circle")
{
    const ZeroSetSample s = extract_zero_set(builtin_scene("circle2d"), 0.01);
    CHECK(s.dim == 2);
    CHECK(s.h == 0.01);
    CHECK(s.points.size() > 500);
    for (const Point& p : s.points) {
        CHECK(std::abs(std::hypot(p[0], p[1]) - 1.0) < 1e-6);
        CHECK(std::abs(1.0 - p[0] * p[0] - p[1] * p[1]) < 1e-12);
    }
}

TEST_CASE("zero set of the segment")
{
    const ZeroSetSample s = extract_zero_set(builtin_scene("segment1d"), 0.01);
    REQUIRE(s.points.size() == 2);
    CHECK(std::abs(s.points[0][0]) < 1e-12);
    CHECK(std::abs(s.points[1][0] - 1.0) < 1e-12);
    // A grid that misses both exact roots still finds them by bisection.
    const ZeroSetSample coarse = extract_zero_set(builtin_scene("segment1d"), 0.3);
    REQUIRE(coarse.points.size() == 2);
    CHECK(std::abs(coarse.points[0][0]) < 1e-12);
    CHECK(std::abs(coarse.points[1][0] - 1.0) < 1e-12);
}

TEST_CASE("zero set of the CSG scene")
{
    const Scene scene = builtin_scene("csg3d");
    const ZeroSetSample s = extract_zero_set(scene, 0.05);
    CHECK(s.points.size() > 1000);
    for (const Point& p : s.points) {
        CHECK(std::abs(scene.f(p)) < 1e-12);
        CHECK(scene.domain.contains(p));
    }
}

TEST_CASE("empty zero set")
{
    const Scene one = parse_scene("dim 2; domain [-1,1]x[-1,1]; f = 1", "one");
    CHECK_THROWS_AS(extract_zero_set(one, 0.1), EmptyZeroSetError);
    const Scene far = parse_scene("dim 1; domain [0,1]; f = x - 5", "far");
    CHECK_THROWS_AS(extract_zero_set(far, 0.1), EmptyZeroSetError);
    CHECK_THROWS_AS(extract_zero_set(builtin_scene("circle2d"), 0.0), std::invalid_argument);
}

TEST_CASE("brute-force distance examples")
{
    const double h = 0.01;
    const Scene circle = builtin_scene("circle2d");
    const ZeroSetSample s = extract_zero_set(circle, h);
    CHECK(brute_force_sdf(circle, s, {0.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(h));
    CHECK(std::abs(brute_force_sdf(circle, s, s.points[17])) < 1e-9);
    const DistanceOracle oracle(circle, s);
    CHECK(std::abs(oracle(s.points[123])) < 1e-9);
    CHECK(oracle({0.0, 0.0, 0.0}) > 0.0);
    CHECK(oracle({1.5, 1.5, 0.0}) < 0.0);
    CHECK(oracle({1.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("brute force against the analytic circle distance")
{
    const double h = 0.02;
    const Scene circle = builtin_scene("circle2d");
    const DistanceOracle oracle(circle, extract_zero_set(circle, h));
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Point x = test::random_point(circle.domain, rng);
        worst = std::max(worst, std::abs(oracle(x) - analytic_sdf("circle2d", x)));
    }
    CHECK(worst <= 2.0 * h);
}

TEST_CASE("spatial hash is bit-identical to the exhaustive scan")
{
    std::mt19937_64 rng(5);
    for (const char* name : {"segment1d", "circle2d", "csg3d"}) {
        const Scene scene = builtin_scene(name);
        const ZeroSetSample sample = extract_zero_set(scene, name == std::string("csg3d") ? 0.05 : 0.01);
        const DistanceOracle oracle(scene, sample);
        int mismatches = 0;
        for (int i = 0; i < 10000; ++i) {
            const Point x = test::random_point(scene.domain, rng);
            const double fast = oracle.unsigned_distance(x);
            if (bits(fast) != bits(oracle.unsigned_distance_exhaustive(x))) {
                ++mismatches;
            }
            if (i % 50 == 0) {
                CHECK(bits(std::abs(oracle(x))) == bits(std::abs(brute_force_sdf(scene, sample, x))));
            }
        }
        INFO(name);
        CHECK(mismatches == 0);
    }
}

TEST_CASE("brute-force sign follows f")
{
    const Scene scene = builtin_scene("csg3d");
    const ZeroSetSample sample = extract_zero_set(scene, 0.05);
    const DistanceOracle oracle(scene, sample);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        const Point x = test::random_point(scene.domain, rng);
        const double f = scene.f(x);
        const double d = oracle(x);
        CHECK((f > 0.0) == (d > 0.0));
        CHECK((f < 0.0) == (d < 0.0));
    }
}

TEST_CASE("zero-set CSV")
{
    ZeroSetSample s;
    s.dim = 2;
    s.points = {{0.5, -0.25, 0.0}, {1.0, 0.0, 0.0}};
    std::ostringstream os;
    write_points_csv(os, s);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,y");
    std::getline(is, line);
    CHECK(line == "0.5,-0.25");
    std::getline(is, line);
    CHECK(line == "1,0");
    s.dim = 3;
    std::ostringstream os3;
    write_points_csv(os3, s);
    CHECK(os3.str().rfind("x,y,z\n", 0) == 0);
}
