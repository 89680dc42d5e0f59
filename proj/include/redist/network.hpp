#pragma once

// Fully connected softplus network g(x; theta) with a skip connection that
// concatenates the raw input to the activation entering one hidden layer,
// and the ansatz d(x; theta) = s(f(x)) g(x; theta) built on top of it.

#include "redist/dual.hpp"
#include "redist/implicit.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace redist {

struct MlpConfig {
    int layers = 4;
    int width = 64;
    int input_dim = 1;
    int skip_layer = 2;  // 0 disables the skip connection
    double beta = 100.0;

    /// Default skip position: the middle layer, ceil(layers / 2).
    static int middle(int layers) { return layers / 2 + layers % 2; }

    void validate() const;
};

struct LayerShape {
    int in = 0;
    int out = 0;
    bool skip = false;     // input = [activation; x]
    std::size_t weights = 0;  // offset of the row-major out x in weight block
    std::size_t bias = 0;     // offset of the bias vector
};

std::vector<LayerShape> layer_shapes(const MlpConfig& cfg);
std::size_t parameter_count(const MlpConfig& cfg);

/// Flat parameter vector: per layer, row-major weights followed by bias.
struct NetworkParams {
    std::vector<double> values;

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

enum class AnsatzMode { product, smoothed_sign };

struct AnsatzConfig {
    AnsatzMode mode = AnsatzMode::smoothed_sign;
    double alpha = 0.1;

    void validate() const;
};

std::string to_string(AnsatzMode mode);
AnsatzMode ansatz_mode_from_string(const std::string& s);

struct AnsatzField {
    Scene scene;
    MlpConfig mlp;
    NetworkParams params;
    AnsatzConfig ansatz;

    /// Throws if the network input dimension differs from the scene's.
    void validate() const;
};

/// g(x; theta). W is the parameter scalar type, S the input/output scalar
/// type (plain, Dual1/Dual2, tape-tracked, or duals over tape-tracked).
template <class W, class S>
S forward(const MlpConfig& cfg, std::span<const W> theta, std::span<const S> x)
{
    const auto shapes = layer_shapes(cfg);
    std::vector<S> in(x.begin(), x.begin() + cfg.input_dim);
    std::vector<S> out;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const LayerShape& s = shapes[l];
        if (s.skip) {
            in.insert(in.end(), x.begin(), x.begin() + cfg.input_dim);
        }
        out.assign(static_cast<std::size_t>(s.out), S{});
        for (int r = 0; r < s.out; ++r) {
            S acc = S(theta[s.bias + r]);
            const std::size_t row = s.weights + static_cast<std::size_t>(r) * s.in;
            for (int c = 0; c < s.in; ++c) {
                acc = acc + theta[row + c] * in[c];
            }
            out[r] = acc;
        }
        if (l + 1 < shapes.size()) {
            for (S& v : out) {
                v = softplus(v, cfg.beta);
            }
        }
        in.swap(out);
    }
    return in[0];
}

/// The smoothed sign s(f): f itself in product mode, tanh(alpha f) otherwise.
template <class S>
S ansatz_factor(const AnsatzConfig& a, const S& f)
{
    using std::tanh;
    if (a.mode == AnsatzMode::product) {
        return f;
    }
    return tanh(S(a.alpha) * f);
}

/// d(x; theta) with generic scalars; theta defaults to the field's own values.
template <class W, class S>
S ansatz_eval(const AnsatzField& field, std::span<const W> theta, std::span<const S> x)
{
    const S f = eval<S>(field.scene.expr, x);
    const S g = forward<W, S>(field.mlp, theta, x);
    return ansatz_factor(field.ansatz, f) * g;
}

double ansatz_eval(const AnsatzField& field, const std::array<double, 3>& x);

/// Hidden weights ~ N(0, 2 / fan_out), zero hidden biases, final weights
/// sqrt(pi / fan_in) and final bias -1. Deterministic in seed.
NetworkParams geometric_init(const MlpConfig& cfg, std::uint64_t seed);

}  // namespace redist
