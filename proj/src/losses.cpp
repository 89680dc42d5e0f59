#include "redist/losses.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace redist {

std::string to_string(LossKind kind)
{
    return kind == LossKind::eikonal ? "eikonal" : "ppoisson";
}

LossKind loss_kind_from_string(const std::string& s)
{
    if (s == "eikonal") {
        return LossKind::eikonal;
    }
    if (s == "ppoisson") {
        return LossKind::ppoisson;
    }
    throw std::invalid_argument("unknown loss '" + s + "' (expected eikonal or ppoisson)");
}

void LossConfig::validate() const
{
    if (kind == LossKind::ppoisson && !(p >= 2.0 && std::isfinite(p))) {
        throw std::invalid_argument("p must be a finite value >= 2");
    }
    if (!(penalty_weight >= 0.0) || !std::isfinite(penalty_weight)) {
        throw std::invalid_argument("penalty weight must be >= 0");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be positive and finite");
    }
}

namespace {

using Jet2 = Dual2<double, 3>;

/// s(f) and its derivatives at each point; no dependence on theta.
std::vector<Jet2> factor_jets(const AnsatzField& field, std::span<const Point> points)
{
    std::vector<Jet2> out;
    out.reserve(points.size());
    for (const Point& x : points) {
        std::array<Jet2, 3> p;
        for (int i = 0; i < 3; ++i) {
            p[i] = Jet2::variable(x[i], i);
        }
        const Jet2 f = eval<Jet2>(field.scene.expr, std::span<const Jet2>(p.data(), 3));
        out.push_back(ansatz_factor(field.ansatz, f));
    }
    return out;
}

/// d = s g with its derivatives, from jets of s and g.
Jet compose(const Jet2& s, const Jet& g, int n)
{
    Jet d;
    d.value = s.val * g.value;
    for (int i = 0; i < n; ++i) {
        d.grad[i] = s.val * g.grad[i] + g.value * s.grad[i];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            d.hess[i * 3 + j] = s.val * g.h(i, j) + s.grad[i] * g.grad[j] + g.grad[i] * s.grad[j]
                + g.value * s.hess[i * 3 + j];
        }
    }
    return d;
}

/// Pulls an adjoint of d's jet back to an adjoint of g's jet.
Jet compose_adjoint(const Jet2& s, const Jet& dbar, int n)
{
    Jet gbar;
    gbar.value = s.val * dbar.value;
    for (int i = 0; i < n; ++i) {
        gbar.value += s.grad[i] * dbar.grad[i];
        gbar.grad[i] = s.val * dbar.grad[i];
        for (int j = 0; j < n; ++j) {
            gbar.value += s.hess[i * 3 + j] * dbar.h(i, j);
            gbar.grad[i] += (dbar.h(i, j) + dbar.h(j, i)) * s.grad[j];
            gbar.hess[i * 3 + j] = s.val * dbar.h(i, j);
        }
    }
    return gbar;
}

struct Chunk {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<Chunk> split(std::size_t n, int threads)
{
    const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1))));
    std::vector<Chunk> chunks;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < parts; ++k) {
        const std::size_t len = n / parts + (k < n % parts ? 1 : 0);
        chunks.push_back({begin, begin + len});
        begin += len;
    }
    return chunks;
}

template <class F>
void for_each_chunk(std::size_t count, F&& fn)
{
    if (count == 1) {
        fn(std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        pool.emplace_back([&fn, k] { fn(k); });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace

std::vector<Jet> ansatz_jets(const AnsatzField& field, std::span<const Point> points, int order)
{
    const int n = field.scene.dim;
    std::vector<Jet> out;
    out.reserve(points.size());
    constexpr std::size_t kBlock = 2048;
    JetNetwork net(field.mlp, field.params.values);
    for (std::size_t begin = 0; begin < points.size(); begin += kBlock) {
        const auto part = points.subspan(begin, std::min(kBlock, points.size() - begin));
        net.forward(part, order);
        const auto s = factor_jets(field, part);
        for (std::size_t j = 0; j < part.size(); ++j) {
            Jet d = compose(s[j], net.output_jet(static_cast<int>(j)), n);
            if (order < 2) {
                d.hess.fill(0.0);
            }
            if (order < 1) {
                d.grad.fill(0.0);
            }
            out.push_back(d);
        }
    }
    return out;
}

LossEval evaluate_loss(const AnsatzField& field, const Batch& batch, const LossConfig& cfg, int threads)
{
    LossEvaluator evaluator(threads);
    return evaluator(field, batch, cfg);
}

LossEval LossEvaluator::operator()(const AnsatzField& field, const Batch& batch, const LossConfig& cfg)
{
    cfg.validate();
    if (batch.empty()) {
        throw std::invalid_argument("loss needs a non-empty batch");
    }
    const int n = field.scene.dim;
    const int order = cfg.kind == LossKind::eikonal ? 1 : 2;
    const double N = static_cast<double>(batch.size());
    const std::span<const Point> points(batch);

    const auto chunks = split(batch.size(), threads_);
    std::vector<JetNetwork>& nets = nets_;
    if (nets.size() != chunks.size()) {
        nets.clear();
        for (std::size_t k = 0; k < chunks.size(); ++k) {
            nets.emplace_back(field.mlp, field.params.values);
        }
    }
    for (JetNetwork& net : nets) {
        net.rebind(field.params.values);
    }
    std::vector<Jet2> factors;
    for_each_chunk(chunks.size(), [&](std::size_t k) {
        nets[k].forward(points.subspan(chunks[k].begin, chunks[k].end - chunks[k].begin), order);
    });
    factors = factor_jets(field, points);

    // Per-sample jets of d and the residual bookkeeping.
    std::vector<Jet> d(batch.size());
    std::vector<double> lap(batch.size(), 0.0);
    std::vector<char> usable(batch.size(), 1);
    LossEval result;
    for (std::size_t k = 0; k < chunks.size(); ++k) {
        for (std::size_t j = chunks[k].begin; j < chunks[k].end; ++j) {
            d[j] = compose(factors[j], nets[k].output_jet(static_cast<int>(j - chunks[k].begin)), n);
        }
    }

    const double p = cfg.p;
    auto norm2_of = [n](const Jet& jet) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += jet.grad[i] * jet.grad[i];
        }
        return s;
    };
    std::size_t used = batch.size();
    if (cfg.kind == LossKind::ppoisson) {
        used = 0;
        for (std::size_t j = 0; j < batch.size(); ++j) {
            const double n2 = norm2_of(d[j]);
            if (p != 2.0 && !(std::sqrt(n2) >= kGradientGuard)) {
                usable[j] = 0;
                ++result.degenerate;
                continue;
            }
            ++used;
        }
        if (used == 0) {
            throw DegenerateBatchError("all " + std::to_string(batch.size()) + " p-Poisson samples are degenerate");
        }
    }
    const double M = static_cast<double>(used);

    std::vector<Jet> dbar(batch.size());
    double main_sum = 0.0;
    double penalty_sum = 0.0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const Jet& dj = d[j];
        Jet& adj = dbar[j];
        if (cfg.kind == LossKind::eikonal) {
            const double norm = std::sqrt(norm2_of(dj));
            const double r = norm - 1.0;
            main_sum += r * r;
            if (norm > 0.0) {
                const double w = 2.0 * r / (N * norm);
                for (int i = 0; i < n; ++i) {
                    adj.grad[i] = w * dj.grad[i];
                }
            }
        } else if (usable[j]) {
            double trace = 0.0;
            for (int i = 0; i < n; ++i) {
                trace += dj.h(i, i);
            }
            if (p == 2.0) {
                const double rho = trace + 1.0;
                main_sum += rho * rho;
                for (int i = 0; i < n; ++i) {
                    adj.hess[i * 3 + i] = 2.0 * rho / M;
                }
            } else {
                const double n2 = norm2_of(dj);
                std::array<double, 3> hq{};
                std::array<double, 3> hTq{};
                double quad = 0.0;
                for (int i = 0; i < n; ++i) {
                    for (int k = 0; k < n; ++k) {
                        hq[i] += dj.h(i, k) * dj.grad[k];
                        hTq[i] += dj.h(k, i) * dj.grad[k];
                    }
                    quad += dj.grad[i] * hq[i];
                }
                const double a = std::pow(n2, 0.5 * (p - 2.0));
                const double b = (p - 2.0) * std::pow(n2, 0.5 * (p - 4.0));
                const double c = p == 4.0 ? 0.0 : (p - 2.0) * (p - 4.0) * std::pow(n2, 0.5 * (p - 6.0));
                lap[j] = a * trace + b * quad;
                const double rho = lap[j] + 1.0;
                main_sum += rho * rho;
                const double w = 2.0 * rho / M;
                for (int i = 0; i < n; ++i) {
                    adj.grad[i] = w * (b * dj.grad[i] * trace + c * dj.grad[i] * quad + b * (hq[i] + hTq[i]));
                    for (int k = 0; k < n; ++k) {
                        adj.hess[i * 3 + k] = w * ((i == k ? a : 0.0) + b * dj.grad[i] * dj.grad[k]);
                    }
                }
            }
        }
        if (field.scene.f(batch[j]) != 0.0) {
            const double e = std::exp(-cfg.gamma * std::abs(dj.value));
            penalty_sum += e;
            if (cfg.penalty_weight != 0.0 && dj.value != 0.0) {
                const double sign = dj.value > 0.0 ? 1.0 : -1.0;
                adj.value += cfg.penalty_weight * (-cfg.gamma * sign * e) / N;
            }
        }
    }
    result.main = main_sum / (cfg.kind == LossKind::eikonal ? N : M);
    result.penalty = penalty_sum / N;
    result.value = result.main;
    if (cfg.penalty_weight != 0.0) {
        result.value += cfg.penalty_weight * result.penalty;
    }

    // Adjoint sweep per chunk; partial gradients summed in chunk order.
    std::vector<std::vector<double>> partial(chunks.size(), std::vector<double>(field.params.values.size(), 0.0));
    for_each_chunk(chunks.size(), [&](std::size_t k) {
        const Chunk& ch = chunks[k];
        const Eigen::Index B = static_cast<Eigen::Index>(ch.end - ch.begin);
        const int C = nets[k].channels();
        Eigen::MatrixXd gbar = Eigen::MatrixXd::Zero(1, C * B);
        for (std::size_t j = ch.begin; j < ch.end; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(j - ch.begin);
            const Jet g = compose_adjoint(factors[j], dbar[j], n);
            gbar(0, col) = g.value;
            for (int i = 0; i < n; ++i) {
                gbar(0, (1 + i) * B + col) = g.grad[i];
            }
            if (order >= 2) {
                for (int i = 0; i < n; ++i) {
                    for (int m = 0; m < n; ++m) {
                        gbar(0, (1 + n + i * n + m) * B + col) = g.h(i, m);
                    }
                }
            }
        }
        nets[k].backward(gbar, partial[k]);
    });
    result.gradient = std::move(partial[0]);
    for (std::size_t k = 1; k < partial.size(); ++k) {
        for (std::size_t i = 0; i < result.gradient.size(); ++i) {
            result.gradient[i] += partial[k][i];
        }
    }
    return result;
}

}  // namespace redist
