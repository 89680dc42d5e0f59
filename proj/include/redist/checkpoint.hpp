#pragma once

// Versioned JSON checkpoints of an ansatz field:
//   {version, scene_name, scene_text, mlp_config, ansatz_config,
//    params: [{W: [[..], ..], b: [..]}, ..], train_meta}

#include "redist/network.hpp"

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace redist {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json mlp_to_json(const MlpConfig& cfg);
MlpConfig mlp_from_json(const nlohmann::json& j);
nlohmann::json ansatz_to_json(const AnsatzConfig& cfg);
AnsatzConfig ansatz_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const AnsatzField& field, const nlohmann::json& train_meta = nlohmann::json::object());

/// Rebuilds the field; throws CheckpointError on missing keys, wrong shapes or
/// an unparsable scene.
AnsatzField checkpoint_from_json(const nlohmann::json& j);

/// Checkpoint text as written to disk (two-space indented, trailing newline).
std::string checkpoint_text(const AnsatzField& field, const nlohmann::json& train_meta = nlohmann::json::object());

void save_checkpoint(const std::filesystem::path& path, const AnsatzField& field,
                     const nlohmann::json& train_meta = nlohmann::json::object());

/// Errors name the file.
AnsatzField load_checkpoint(const std::filesystem::path& path);
nlohmann::json load_train_meta(const std::filesystem::path& path);

}  // namespace redist
