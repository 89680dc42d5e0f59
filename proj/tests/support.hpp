#pragma once

#include "redist/implicit.hpp"
#include "redist/jet_network.hpp"
#include "redist/network.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <span>
#include <string>

namespace test {

using redist::Point;

// ||a - b|| / ||b||, falling back to the absolute error when b vanishes.
inline double rel_err(std::span<const double> a, std::span<const double> b)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

inline double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-12);
}

inline Point random_point(const redist::Box& box, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point p{0.0, 0.0, 0.0};
    for (int i = 0; i < box.dim; ++i) {
        p[i] = box.lo[i] + u(rng) * (box.hi[i] - box.lo[i]);
    }
    return p;
}

// Small network on a builtin scene, cheap enough for finite differences.
inline redist::AnsatzField small_field(const std::string& scene, std::uint64_t seed,
                                       redist::AnsatzMode mode = redist::AnsatzMode::smoothed_sign, int width = 12,
                                       double beta = 100.0)
{
    redist::AnsatzField f;
    f.scene = redist::builtin_scene(scene);
    f.mlp.layers = 4;
    f.mlp.width = width;
    f.mlp.input_dim = f.scene.dim;
    f.mlp.skip_layer = 2;
    f.mlp.beta = beta;
    f.ansatz.mode = mode;
    f.params = redist::geometric_init(f.mlp, seed);
    return f;
}

inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("redist_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace test
