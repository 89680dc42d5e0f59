#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "redist/checkpoint.hpp"

#include <fstream>
#include <random>

using namespace redist;
using nlohmann::json;

namespace {

void write(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path);
    os << text;
}

// Expects a CheckpointError whose message contains needle.
template <class Fn>
void expect_error(Fn&& fn, const std::string& needle)
{
    try {
        fn();
        FAIL("expected a checkpoint error");
    } catch (const CheckpointError& e) {
        INFO(e.what());
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("checkpoint round trip is exact")
{
    const auto dir = test::scratch_dir("checkpoint_roundtrip");
    for (const char* name : {"segment1d", "circle2d", "csg3d"}) {
        AnsatzField f = test::small_field(name, 11, AnsatzMode::product, 9, 37.5);
        f.ansatz.alpha = 0.3;
        std::mt19937_64 rng(2);
        std::normal_distribution<double> n(0.0, 1.0);
        for (double& v : f.params.values) {
            v = n(rng) * 1e-3 + 1.0 / 3.0;
        }
        const auto path = dir / (std::string(name) + ".json");
        save_checkpoint(path, f, {{"iteration", 42}});
        const AnsatzField g = load_checkpoint(path);
        INFO(name);
        CHECK(g.params == f.params);
        CHECK(g.mlp.layers == f.mlp.layers);
        CHECK(g.mlp.width == 9);
        CHECK(g.mlp.skip_layer == 2);
        CHECK(g.mlp.input_dim == f.scene.dim);
        CHECK(g.mlp.beta == 37.5);
        CHECK(g.ansatz.mode == AnsatzMode::product);
        CHECK(g.ansatz.alpha == 0.3);
        CHECK(g.scene.name == name);
        CHECK(to_string(g.scene) == to_string(f.scene));
        const Point x{0.31, -0.2, 0.45};
        CHECK(ansatz_eval(g, x) == ansatz_eval(f, x));
        CHECK(load_train_meta(path)["iteration"] == 42);
        CHECK(checkpoint_text(g, {{"iteration", 42}}) == checkpoint_text(f, {{"iteration", 42}}));
    }
}

TEST_CASE("checkpoint layout")
{
    const AnsatzField f = test::small_field("circle2d", 3);
    const json j = checkpoint_to_json(f);
    CHECK(j["version"] == kCheckpointVersion);
    CHECK(j["scene_name"] == "circle2d");
    CHECK(j["mlp_config"]["layers"] == 4);
    CHECK(j["ansatz_config"]["mode"] == "sign");
    REQUIRE(j["params"].size() == 4);
    CHECK(j["params"][0]["W"].size() == 12);
    CHECK(j["params"][0]["W"][0].size() == 2);
    CHECK(j["params"][2]["W"][0].size() == 14);
    CHECK(j["params"][3]["W"].size() == 1);
    CHECK(j["params"][3]["b"][0] == -1.0);
    CHECK(j["train_meta"].is_object());
    const std::string text = checkpoint_text(f);
    CHECK(text.back() == '\n');
    CHECK(text.rfind("{\n  \"", 0) == 0);
    CHECK(json::parse(text) == j);
}

TEST_CASE("config JSON round trip")
{
    MlpConfig m;
    m.layers = 7;
    m.width = 33;
    m.input_dim = 3;
    m.skip_layer = 0;
    m.beta = 12.0;
    const MlpConfig r = mlp_from_json(mlp_to_json(m));
    CHECK(r.layers == 7);
    CHECK(r.width == 33);
    CHECK(r.input_dim == 3);
    CHECK(r.skip_layer == 0);
    CHECK(r.beta == 12.0);
    const AnsatzConfig a = ansatz_from_json(ansatz_to_json({AnsatzMode::product, 0.25}));
    CHECK(a.mode == AnsatzMode::product);
    CHECK(a.alpha == 0.25);
    CHECK_THROWS(ansatz_from_json({{"mode", "cubic"}, {"alpha", 1.0}}));
}

TEST_CASE("malformed checkpoints are rejected")
{
    const AnsatzField f = test::small_field("segment1d", 5);
    const json good = checkpoint_to_json(f);

    json j = good;
    j["version"] = 2;
    expect_error([&] { checkpoint_from_json(j); }, "version 2");

    j = good;
    j["params"].erase(j["params"].size() - 1);
    expect_error([&] { checkpoint_from_json(j); }, "expected 4 layers");

    j = good;
    j["params"][1]["W"][3].erase(0);
    expect_error([&] { checkpoint_from_json(j); }, "layer 1 has the wrong shape");

    j = good;
    j["params"][2]["b"].push_back(0.0);
    expect_error([&] { checkpoint_from_json(j); }, "layer 2 has the wrong shape");

    for (const char* key : {"version", "scene_text", "mlp_config", "ansatz_config", "params"}) {
        j = good;
        j.erase(key);
        CHECK_THROWS_AS(checkpoint_from_json(j), CheckpointError);
    }

    j = good;
    j["scene_text"] = "dim 1; domain [0,1]; f = x +";
    CHECK_THROWS_AS(checkpoint_from_json(j), CheckpointError);

    j = good;
    j["mlp_config"]["input_dim"] = 2;
    CHECK_THROWS_AS(checkpoint_from_json(j), CheckpointError);

    j = good;
    j["params"][0]["W"][0][0] = "x";
    CHECK_THROWS_AS(checkpoint_from_json(j), CheckpointError);
}

TEST_CASE("file errors name the path")
{
    const auto dir = test::scratch_dir("checkpoint_errors");
    expect_error([&] { load_checkpoint(dir / "missing.json"); }, "missing.json: cannot open");
    write(dir / "corrupt.json", "{\"version\": 1, ");
    expect_error([&] { load_checkpoint(dir / "corrupt.json"); }, "corrupt.json");
    json j = checkpoint_to_json(test::small_field("segment1d", 1));
    j["params"][0]["b"] = json::array();
    write(dir / "shape.json", j.dump());
    expect_error([&] { load_checkpoint(dir / "shape.json"); }, "shape.json");
    expect_error([&] { load_checkpoint(dir / "shape.json"); }, "wrong shape");
}
