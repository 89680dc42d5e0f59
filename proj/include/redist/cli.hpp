#pragma once

// Command-line front end: train, eval, oracle and repro subcommands.

#include "redist/losses.hpp"
#include "redist/network.hpp"
#include "redist/trainer.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace redist {

inline constexpr const char* kToolName = "redist";
inline constexpr const char* kToolVersion = "0.1.0";

/// Everything that determines a training run, with defaults materialised.
struct RunConfig {
    std::string builtin;     // builtin scene name, or
    std::string scene_file;  // path to a scene DSL file
    LossKind loss = LossKind::eikonal;
    double p = 2.0;
    double alpha = 0.1;
    double beta = 100.0;
    AnsatzMode ansatz = AnsatzMode::smoothed_sign;
    int iters = 5000;
    int batch = 512;
    double lr = 1e-4;
    double lambda = 0.0;
    double gamma = 100.0;
    int layers = 4;
    int width = 64;
    int skip_layer = -1;  // -1: middle layer
    std::uint64_t seed = 1;
    int checkpoint_every = 1000;
    int log_every = 10;

    /// The full-scale network and schedule: 8 x 512, 15000 iterations, batch 1024.
    static RunConfig full_scale();

    MlpConfig mlp() const;
    AnsatzConfig ansatz_config() const;
    TrainConfig train_config(int threads) const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Reads a config object, or the "config" member of a manifest. Keys absent
/// from j keep the values in base; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Thread count from REDIST_THREADS; 1 when unset.
int threads_from_env();

Scene resolve_scene(const RunConfig& cfg);

struct TrainOutputs {
    AnsatzField field;
    TrainLog log;
    double seconds = 0.0;
};

/// Writes manifest.json, checkpoints/, model.json and log.csv under out.
TrainOutputs cmd_train(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& progress);

struct EvalOptions {
    std::filesystem::path model;
    std::string oracle = "auto";  // analytic | brute | auto
    int grid_res = 0;             // 0: per-dimension default
    int hist_samples = 10000;
    double zero_h = 0.02;
    std::uint64_t seed = 1;
};

/// Writes report.json, grids/ and plots/ under out and returns the report.
nlohmann::json cmd_eval(const EvalOptions& opts, const std::filesystem::path& out);

/// Zero-set CSV, brute-force distance grid and plot for a scene.
void cmd_oracle(const Scene& scene, double h, int grid_res, const std::filesystem::path& out);

struct ReproOptions {
    bool full = false;
    std::vector<std::string> only;
    int iters = 0;  // 0: scale default
};

std::vector<std::string> repro_experiments();

/// Runs the experiment list and writes summary.csv and summary.md.
nlohmann::json cmd_repro(const ReproOptions& opts, const std::filesystem::path& out, std::ostream& progress);

/// Entry point. Errors print one line "error: <message>" to err and return
/// nonzero.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace redist
