#include "redist/checkpoint.hpp"

#include <fstream>
#include <sstream>

namespace redist {

using nlohmann::json;

json mlp_to_json(const MlpConfig& cfg)
{
    return {{"layers", cfg.layers},
            {"width", cfg.width},
            {"input_dim", cfg.input_dim},
            {"skip_layer", cfg.skip_layer},
            {"beta", cfg.beta}};
}

MlpConfig mlp_from_json(const json& j)
{
    MlpConfig cfg;
    cfg.layers = j.at("layers").get<int>();
    cfg.width = j.at("width").get<int>();
    cfg.input_dim = j.at("input_dim").get<int>();
    cfg.skip_layer = j.at("skip_layer").get<int>();
    cfg.beta = j.at("beta").get<double>();
    return cfg;
}

json ansatz_to_json(const AnsatzConfig& cfg)
{
    return {{"mode", to_string(cfg.mode)}, {"alpha", cfg.alpha}};
}

AnsatzConfig ansatz_from_json(const json& j)
{
    AnsatzConfig cfg;
    cfg.mode = ansatz_mode_from_string(j.at("mode").get<std::string>());
    cfg.alpha = j.at("alpha").get<double>();
    return cfg;
}

json checkpoint_to_json(const AnsatzField& field, const json& train_meta)
{
    json layers = json::array();
    for (const LayerShape& s : layer_shapes(field.mlp)) {
        json w = json::array();
        for (int r = 0; r < s.out; ++r) {
            const double* row = field.params.values.data() + s.weights + static_cast<std::size_t>(r) * s.in;
            w.push_back(std::vector<double>(row, row + s.in));
        }
        const double* b = field.params.values.data() + s.bias;
        layers.push_back({{"W", std::move(w)}, {"b", std::vector<double>(b, b + s.out)}});
    }
    return {{"version", kCheckpointVersion},
            {"scene_name", field.scene.name},
            {"scene_text", to_string(field.scene)},
            {"mlp_config", mlp_to_json(field.mlp)},
            {"ansatz_config", ansatz_to_json(field.ansatz)},
            {"params", std::move(layers)},
            {"train_meta", train_meta}};
}

AnsatzField checkpoint_from_json(const json& j)
{
    try {
        const int version = j.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
        }
        AnsatzField field;
        field.scene = parse_scene(j.at("scene_text").get<std::string>(), j.value("scene_name", "custom"));
        field.mlp = mlp_from_json(j.at("mlp_config"));
        field.mlp.validate();
        field.ansatz = ansatz_from_json(j.at("ansatz_config"));
        field.ansatz.validate();
        const auto shapes = layer_shapes(field.mlp);
        const json& layers = j.at("params");
        if (!layers.is_array() || layers.size() != shapes.size()) {
            throw CheckpointError("params: expected " + std::to_string(shapes.size()) + " layers");
        }
        field.params.values.assign(parameter_count(field.mlp), 0.0);
        for (std::size_t l = 0; l < shapes.size(); ++l) {
            const LayerShape& s = shapes[l];
            const json& w = layers[l].at("W");
            const json& b = layers[l].at("b");
            if (!w.is_array() || w.size() != static_cast<std::size_t>(s.out) || !b.is_array()
                || b.size() != static_cast<std::size_t>(s.out)) {
                throw CheckpointError("params: layer " + std::to_string(l) + " has the wrong shape");
            }
            for (int r = 0; r < s.out; ++r) {
                const json& row = w[r];
                if (!row.is_array() || row.size() != static_cast<std::size_t>(s.in)) {
                    throw CheckpointError("params: layer " + std::to_string(l) + " has the wrong shape");
                }
                for (int c = 0; c < s.in; ++c) {
                    field.params.values[s.weights + static_cast<std::size_t>(r) * s.in + c] = row[c].get<double>();
                }
                field.params.values[s.bias + r] = b[r].get<double>();
            }
        }
        field.validate();
        return field;
    } catch (const CheckpointError&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckpointError(e.what());
    }
}

std::string checkpoint_text(const AnsatzField& field, const json& train_meta)
{
    return checkpoint_to_json(field, train_meta).dump(2) + "\n";
}

void save_checkpoint(const std::filesystem::path& path, const AnsatzField& field, const json& train_meta)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    os << checkpoint_text(field, train_meta);
    os.close();
    if (!os) {
        throw std::runtime_error("error writing " + path.string());
    }
}

namespace {

json read_json(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw CheckpointError(path.string() + ": cannot open");
    }
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw CheckpointError(path.string() + ": " + e.what());
    }
}

}  // namespace

AnsatzField load_checkpoint(const std::filesystem::path& path)
{
    const json j = read_json(path);
    try {
        return checkpoint_from_json(j);
    } catch (const CheckpointError& e) {
        throw CheckpointError(path.string() + ": " + e.what());
    }
}

json load_train_meta(const std::filesystem::path& path)
{
    return read_json(path).value("train_meta", json::object());
}

}  // namespace redist
