#include "redist/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace redist {

void TrainConfig::validate() const
{
    loss.validate();
    if (iterations <= 0) {
        throw std::invalid_argument("iterations must be positive");
    }
    if (batch_size <= 0) {
        throw std::invalid_argument("batch size must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0)) {
        throw std::invalid_argument("invalid ADAM hyperparameters");
    }
    if (checkpoint_every < 0 || log_every <= 0) {
        throw std::invalid_argument("checkpoint and log cadence must be positive");
    }
    if (threads < 1) {
        throw std::invalid_argument("thread count must be at least 1");
    }
}

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state, double lr,
               const AdamHyper& hyper)
{
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("ADAM: parameter, gradient and state sizes differ");
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
        state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + hyper.epsilon);
    }
}

Batch sample_uniform(const Box& box, int n, std::mt19937_64& rng)
{
    if (n <= 0) {
        throw std::invalid_argument("sample count must be positive");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Batch out(static_cast<std::size_t>(n), Point{0.0, 0.0, 0.0});
    for (Point& p : out) {
        for (int i = 0; i < box.dim; ++i) {
            // lo + u (hi - lo) can round up to hi but never past it.
            p[i] = std::min(box.hi[i], box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]));
        }
    }
    return out;
}

void TrainLog::write_csv(std::ostream& os) const
{
    os << "iteration,loss,degenerate_count,seconds\n";
    const auto old = os.precision(17);
    for (const TrainRecord& r : records) {
        os << r.iteration << ',' << r.loss << ',' << r.degenerate << ',' << r.seconds << '\n';
    }
    os.precision(old);
}

TrainingError::TrainingError(const std::string& message, int iteration, double last_loss)
    : std::runtime_error(message + " (iteration " + std::to_string(iteration) + ", last loss "
                         + std::to_string(last_loss) + ")")
    , iteration_(iteration)
    , last_loss_(last_loss)
{
}

std::mt19937_64 init_stream(std::uint64_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x696e6974u};
    return std::mt19937_64(seq);
}

std::mt19937_64 sample_stream(std::uint64_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x73616d70u};
    return std::mt19937_64(seq);
}

namespace {

void check_zero_set(const AnsatzField& field, const std::vector<Point>& zeros, int iteration)
{
    for (const Point& z : zeros) {
        const double d = ansatz_eval(field, z);
        if (d != 0.0) {
            throw TrainingError("zero level set not preserved at a known root", iteration, d);
        }
    }
}

}  // namespace

TrainResult train(const Scene& scene, const MlpConfig& mlp, const AnsatzConfig& ansatz, const TrainConfig& cfg,
                  const CheckpointFn& on_checkpoint)
{
    MlpConfig net = mlp;
    net.input_dim = scene.dim;
    auto rng = init_stream(cfg.seed);
    AnsatzField field{scene, net, geometric_init(net, rng()), ansatz};
    return train_from(std::move(field), cfg, on_checkpoint);
}

TrainResult train_from(AnsatzField field, const TrainConfig& cfg, const CheckpointFn& on_checkpoint)
{
    cfg.validate();
    field.validate();
    const auto zeros = exact_zero_points(field.scene);
    auto rng = sample_stream(cfg.seed);
    AdamState adam(field.params.values.size());
    LossEvaluator evaluate(cfg.threads);
    TrainResult result;
    result.log.losses.reserve(static_cast<std::size_t>(cfg.iterations));

    check_zero_set(field, zeros, 0);
    if (on_checkpoint) {
        on_checkpoint(0, field);
    }
    const auto start = std::chrono::steady_clock::now();
    double last = 0.0;
    for (int it = 1; it <= cfg.iterations; ++it) {
        const Batch batch = sample_uniform(field.scene.domain, cfg.batch_size, rng);
        LossEval eval;
        try {
            eval = evaluate(field, batch, cfg.loss);
        } catch (const DegenerateBatchError& e) {
            throw TrainingError(e.what(), it, last);
        }
        if (!std::isfinite(eval.value)) {
            throw TrainingError("non-finite loss", it, last);
        }
        last = eval.value;
        result.log.losses.push_back(eval.value);
        adam_step(field.params.values, eval.gradient, adam, cfg.learning_rate, cfg.adam);

        if (it % cfg.log_every == 0 || it == cfg.iterations || it == 1) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.log.records.push_back({it, eval.value, eval.degenerate, secs});
        }
        const bool scheduled = cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0;
        if (scheduled || it == cfg.iterations) {
            check_zero_set(field, zeros, it);
            if (on_checkpoint) {
                on_checkpoint(it, field);
            }
        }
    }
    result.field = std::move(field);
    return result;
}

std::pair<double, double> loss_trend(const TrainLog& log)
{
    const auto& l = log.losses;
    if (l.empty()) {
        return {0.0, 0.0};
    }
    const std::size_t tenth = std::max<std::size_t>(1, l.size() / 10);
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    return {median({l.begin(), l.begin() + static_cast<std::ptrdiff_t>(tenth)}),
            median({l.end() - static_cast<std::ptrdiff_t>(tenth), l.end()})};
}

}  // namespace redist
