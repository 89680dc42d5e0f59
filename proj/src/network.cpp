#include "redist/network.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace redist {

void MlpConfig::validate() const
{
    if (layers < 1) {
        throw std::invalid_argument("network needs at least one layer");
    }
    if (input_dim < 1 || input_dim > 3) {
        throw std::invalid_argument("network input dimension must be 1, 2 or 3");
    }
    if (layers > 1 && width < input_dim) {
        throw std::invalid_argument("network width must be at least the input dimension");
    }
    if (skip_layer != 0 && (skip_layer < 1 || skip_layer >= layers)) {
        throw std::invalid_argument("skip layer must lie strictly between 0 and the layer count");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("softplus beta must be positive");
    }
}

std::vector<LayerShape> layer_shapes(const MlpConfig& cfg)
{
    std::vector<LayerShape> shapes;
    shapes.reserve(static_cast<std::size_t>(cfg.layers));
    std::size_t offset = 0;
    for (int l = 0; l < cfg.layers; ++l) {
        LayerShape s;
        s.skip = cfg.skip_layer != 0 && l == cfg.skip_layer;
        s.in = l == 0 ? cfg.input_dim : cfg.width + (s.skip ? cfg.input_dim : 0);
        s.out = l == cfg.layers - 1 ? 1 : cfg.width;
        s.weights = offset;
        offset += static_cast<std::size_t>(s.in) * static_cast<std::size_t>(s.out);
        s.bias = offset;
        offset += static_cast<std::size_t>(s.out);
        shapes.push_back(s);
    }
    return shapes;
}

std::size_t parameter_count(const MlpConfig& cfg)
{
    const auto shapes = layer_shapes(cfg);
    return shapes.back().bias + static_cast<std::size_t>(shapes.back().out);
}

void AnsatzConfig::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("ansatz alpha must be positive and finite");
    }
}

std::string to_string(AnsatzMode mode)
{
    return mode == AnsatzMode::product ? "product" : "sign";
}

AnsatzMode ansatz_mode_from_string(const std::string& s)
{
    if (s == "product") {
        return AnsatzMode::product;
    }
    if (s == "sign" || s == "smoothed_sign") {
        return AnsatzMode::smoothed_sign;
    }
    throw std::invalid_argument("unknown ansatz mode '" + s + "' (expected product or sign)");
}

void AnsatzField::validate() const
{
    mlp.validate();
    ansatz.validate();
    if (mlp.input_dim != scene.dim) {
        throw std::invalid_argument("network input dimension " + std::to_string(mlp.input_dim)
                                    + " does not match scene dimension " + std::to_string(scene.dim));
    }
    if (params.values.size() != parameter_count(mlp)) {
        throw std::invalid_argument("parameter vector has " + std::to_string(params.values.size())
                                    + " entries, network expects " + std::to_string(parameter_count(mlp)));
    }
}

double ansatz_eval(const AnsatzField& field, const std::array<double, 3>& x)
{
    return ansatz_eval<double, double>(field, field.params.values, std::span<const double>(x.data(), 3));
}

NetworkParams geometric_init(const MlpConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    std::mt19937_64 rng(seed);
    const auto shapes = layer_shapes(cfg);
    NetworkParams p;
    p.values.assign(parameter_count(cfg), 0.0);
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const LayerShape& s = shapes[l];
        const std::size_t n = static_cast<std::size_t>(s.in) * static_cast<std::size_t>(s.out);
        if (l + 1 == shapes.size()) {
            const double w = std::sqrt(std::numbers::pi / s.in);
            for (std::size_t k = 0; k < n; ++k) {
                p.values[s.weights + k] = w;
            }
            p.values[s.bias] = -1.0;
        } else {
            std::normal_distribution<double> normal(0.0, std::sqrt(2.0) / std::sqrt(static_cast<double>(s.out)));
            for (std::size_t k = 0; k < n; ++k) {
                p.values[s.weights + k] = normal(rng);
            }
        }
    }
    return p;
}

}  // namespace redist
