#pragma once

#include "redist/losses.hpp"
#include "redist/network.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <vector>

namespace redist {

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    LossConfig loss;
    int iterations = 5000;
    int batch_size = 512;
    double learning_rate = 1e-4;
    std::uint64_t seed = 1;
    AdamHyper adam;
    int checkpoint_every = 1000;
    int log_every = 10;
    int threads = 1;

    void validate() const;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected ADAM update of params in place.
void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state, double lr,
               const AdamHyper& hyper);

/// n i.i.d. uniform points in the box; coordinates past box.dim are zero.
Batch sample_uniform(const Box& box, int n, std::mt19937_64& rng);

struct TrainRecord {
    int iteration = 0;
    double loss = 0.0;
    int degenerate = 0;
    double seconds = 0.0;
};

struct TrainLog {
    std::vector<TrainRecord> records;  // every log_every iterations and the last one
    std::vector<double> losses;        // loss at every iteration

    void write_csv(std::ostream& os) const;
};

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& message, int iteration, double last_loss);
    int iteration() const { return iteration_; }
    double last_loss() const { return last_loss_; }

private:
    int iteration_;
    double last_loss_;
};

struct TrainResult {
    AnsatzField field;
    TrainLog log;
};

/// Called with the iteration count (0 for the initial parameters) at every
/// checkpoint and once more after the final iteration.
using CheckpointFn = std::function<void(int iteration, const AnsatzField& field)>;

/// Stream seeds for parameter initialisation and batch sampling.
std::mt19937_64 init_stream(std::uint64_t seed);
std::mt19937_64 sample_stream(std::uint64_t seed);

/// Geometric initialisation followed by the ADAM loop
/// sample -> loss -> gradient -> update.
TrainResult train(const Scene& scene, const MlpConfig& mlp, const AnsatzConfig& ansatz, const TrainConfig& cfg,
                  const CheckpointFn& on_checkpoint = {});

/// Same loop starting from given parameters.
TrainResult train_from(AnsatzField field, const TrainConfig& cfg, const CheckpointFn& on_checkpoint = {});

/// Median loss over the first and last tenth of the run.
std::pair<double, double> loss_trend(const TrainLog& log);

}  // namespace redist
