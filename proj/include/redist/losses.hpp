#pragma once

// Batch loss functionals over the ansatz field.
//
//   eikonal     mean (|grad d| - 1)^2
//   p-Poisson   mean over non-degenerate samples of (Delta_p d + 1)^2
//   penalty     mean of 1{f != 0} exp(-gamma |d|)
//
// Two routes compute the same quantities. The templates below evaluate one
// sample at a time with generic scalars; instantiated with tape-tracked
// parameters they give exact parameter gradients through the scalar tape.
// evaluate_loss() is the batched route used for training: it carries jets
// through whole layers as matrix products and runs a hand-derived adjoint.

#include "redist/dual.hpp"
#include "redist/jet_network.hpp"
#include "redist/network.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace redist {

enum class LossKind { eikonal, ppoisson };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);

struct LossConfig {
    LossKind kind = LossKind::eikonal;
    double p = 2.0;
    double penalty_weight = 0.0;
    double gamma = 100.0;

    void validate() const;
};

using Batch = std::vector<Point>;

/// Every sample of a p-Poisson batch hit the gradient guard.
class DegenerateBatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class W, template <class, int> class D>
D<W, 3> ansatz_jet(const AnsatzField& field, std::span<const W> theta, const Point& x)
{
    std::array<D<W, 3>, 3> p;
    for (int i = 0; i < 3; ++i) {
        p[i] = D<W, 3>::variable(W(x[i]), i);
    }
    return ansatz_eval<W, D<W, 3>>(field, theta, std::span<const D<W, 3>>(p.data(), 3));
}

template <class W>
W sum(const std::vector<W>& terms)
{
    W acc(0.0);
    for (const W& t : terms) {
        acc = acc + t;
    }
    return acc;
}

}  // namespace detail

template <class W>
W eikonal_loss(const AnsatzField& field, std::span<const W> theta, const Batch& batch)
{
    using std::sqrt;
    if (batch.empty()) {
        throw std::invalid_argument("eikonal loss needs a non-empty batch");
    }
    std::vector<W> terms;
    terms.reserve(batch.size());
    for (const Point& x : batch) {
        const auto d = detail::ansatz_jet<W, Dual1>(field, theta, x);
        const W norm = sqrt(d.grad[0] * d.grad[0] + d.grad[1] * d.grad[1] + d.grad[2] * d.grad[2]);
        const W r = norm - W(1.0);
        terms.push_back(r * r);
    }
    return detail::sum(terms) * W(1.0 / static_cast<double>(batch.size()));
}

template <class W>
struct PPoissonValue {
    W value{};
    int degenerate = 0;
};

template <class W>
PPoissonValue<W> ppoisson_loss(const AnsatzField& field, std::span<const W> theta, const Batch& batch, double p)
{
    if (batch.empty()) {
        throw std::invalid_argument("p-Poisson loss needs a non-empty batch");
    }
    if (!(p >= 2.0)) {
        throw std::invalid_argument("p-Poisson loss requires p >= 2");
    }
    std::vector<W> terms;
    int degenerate = 0;
    for (const Point& x : batch) {
        const auto d = detail::ansatz_jet<W, Dual2>(field, theta, x);
        const auto lap = p_laplacian_of(d, p);
        if (!lap) {
            ++degenerate;
            continue;
        }
        const W r = *lap + W(1.0);
        terms.push_back(r * r);
    }
    if (terms.empty()) {
        throw DegenerateBatchError("all " + std::to_string(batch.size()) + " p-Poisson samples are degenerate");
    }
    return {detail::sum(terms) * W(1.0 / static_cast<double>(terms.size())), degenerate};
}

template <class W>
W zero_penalty(const AnsatzField& field, std::span<const W> theta, const Batch& batch, double gamma)
{
    using std::exp;
    if (batch.empty()) {
        return W(0.0);
    }
    std::vector<W> terms;
    for (const Point& x : batch) {
        if (field.scene.f(x) == 0.0) {
            continue;
        }
        const std::array<W, 3> pt{W(x[0]), W(x[1]), W(x[2])};
        const W d = ansatz_eval<W, W>(field, theta, std::span<const W>(pt.data(), 3));
        const W mag = value_of(d) < 0.0 ? -d : d;
        terms.push_back(exp(W(-gamma) * mag));
    }
    return detail::sum(terms) * W(1.0 / static_cast<double>(batch.size()));
}

template <class W>
struct TotalLossValue {
    W value{};
    int degenerate = 0;
};

/// Selected loss plus penalty_weight times the zero penalty.
template <class W>
TotalLossValue<W> total_loss(const AnsatzField& field, std::span<const W> theta, const Batch& batch,
                             const LossConfig& cfg)
{
    TotalLossValue<W> out;
    if (cfg.kind == LossKind::eikonal) {
        out.value = eikonal_loss<W>(field, theta, batch);
    } else {
        const auto pp = ppoisson_loss<W>(field, theta, batch, cfg.p);
        out.value = pp.value;
        out.degenerate = pp.degenerate;
    }
    if (cfg.penalty_weight != 0.0) {
        out.value = out.value + W(cfg.penalty_weight) * zero_penalty<W>(field, theta, batch, cfg.gamma);
    }
    return out;
}

/// Batched loss value and exact parameter gradient.
struct LossEval {
    double value = 0.0;       // total
    double main = 0.0;        // eikonal or p-Poisson term
    double penalty = 0.0;     // unweighted zero penalty
    int degenerate = 0;
    std::vector<double> gradient;
};

/// Batched loss route. Keeps per-chunk network workspaces alive between
/// calls. threads > 1 splits the batch into contiguous chunks evaluated
/// concurrently; partial gradients are summed in chunk order, so results
/// depend on the thread count but not on scheduling.
class LossEvaluator {
public:
    explicit LossEvaluator(int threads = 1) : threads_(threads < 1 ? 1 : threads) {}

    LossEval operator()(const AnsatzField& field, const Batch& batch, const LossConfig& cfg);

private:
    int threads_;
    std::vector<JetNetwork> nets_;
};

LossEval evaluate_loss(const AnsatzField& field, const Batch& batch, const LossConfig& cfg, int threads = 1);

/// Jets of d(x; theta) for a set of points (order 0, 1 or 2).
std::vector<Jet> ansatz_jets(const AnsatzField& field, std::span<const Point> points, int order);

}  // namespace redist
