#include "redist/cli.hpp"

#include "redist/checkpoint.hpp"
#include "redist/evaluator.hpp"
#include "redist/oracle.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace redist {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig RunConfig::full_scale()
{
    RunConfig c;
    c.layers = 8;
    c.width = 512;
    c.iters = 15000;
    c.batch = 1024;
    return c;
}

MlpConfig RunConfig::mlp() const
{
    MlpConfig m;
    m.layers = layers;
    m.width = width;
    m.skip_layer = skip_layer < 0 ? MlpConfig::middle(layers) : skip_layer;
    m.beta = beta;
    return m;
}

AnsatzConfig RunConfig::ansatz_config() const
{
    AnsatzConfig a;
    a.mode = ansatz;
    a.alpha = alpha;
    return a;
}

TrainConfig RunConfig::train_config(int threads) const
{
    TrainConfig t;
    t.loss.kind = loss;
    t.loss.p = p;
    t.loss.penalty_weight = lambda;
    t.loss.gamma = gamma;
    t.iterations = iters;
    t.batch_size = batch;
    t.learning_rate = lr;
    t.seed = seed;
    t.checkpoint_every = checkpoint_every;
    t.log_every = log_every;
    t.threads = threads;
    return t;
}

json to_json(const RunConfig& c)
{
    json j = {{"loss", to_string(c.loss)},
              {"p", c.p},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"ansatz", to_string(c.ansatz)},
              {"iters", c.iters},
              {"batch", c.batch},
              {"lr", c.lr},
              {"lambda", c.lambda},
              {"gamma", c.gamma},
              {"layers", c.layers},
              {"width", c.width},
              {"skip_layer", c.mlp().skip_layer},
              {"seed", c.seed},
              {"checkpoint_every", c.checkpoint_every},
              {"log_every", c.log_every}};
    if (!c.builtin.empty()) {
        j["builtin"] = c.builtin;
    }
    if (!c.scene_file.empty()) {
        j["scene"] = c.scene_file;
    }
    return j;
}

RunConfig run_config_from_json(const json& doc, RunConfig c)
{
    const json& j = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        if (key == "builtin") {
            c.builtin = v.get<std::string>();
        } else if (key == "scene") {
            c.scene_file = v.get<std::string>();
        } else if (key == "loss") {
            c.loss = loss_kind_from_string(v.get<std::string>());
        } else if (key == "p") {
            c.p = v.get<double>();
        } else if (key == "alpha") {
            c.alpha = v.get<double>();
        } else if (key == "beta") {
            c.beta = v.get<double>();
        } else if (key == "ansatz") {
            c.ansatz = ansatz_mode_from_string(v.get<std::string>());
        } else if (key == "iters") {
            c.iters = v.get<int>();
        } else if (key == "batch") {
            c.batch = v.get<int>();
        } else if (key == "lr") {
            c.lr = v.get<double>();
        } else if (key == "lambda") {
            c.lambda = v.get<double>();
        } else if (key == "gamma") {
            c.gamma = v.get<double>();
        } else if (key == "layers") {
            c.layers = v.get<int>();
        } else if (key == "width") {
            c.width = v.get<int>();
        } else if (key == "skip_layer") {
            c.skip_layer = v.get<int>();
        } else if (key == "seed") {
            c.seed = v.get<std::uint64_t>();
        } else if (key == "checkpoint_every") {
            c.checkpoint_every = v.get<int>();
        } else if (key == "log_every") {
            c.log_every = v.get<int>();
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    return c;
}

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

int threads_from_env()
{
    const char* v = std::getenv("REDIST_THREADS");
    if (!v || !*v) {
        return 1;
    }
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) {
        throw std::invalid_argument("REDIST_THREADS must be a positive integer");
    }
    return static_cast<int>(n);
}

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error(path.string() + ": cannot open");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    os << text;
    os.close();
    if (!os) {
        throw std::runtime_error("error writing " + path.string());
    }
}

void make_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
}

json read_json_file(const fs::path& path)
{
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    fn(os);
    os.close();
    if (!os) {
        throw std::runtime_error("error writing " + path.string());
    }
}

void check_finite(const json& j, const std::string& where)
{
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw std::runtime_error("non-finite metric " + where);
    }
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            check_finite(v, where.empty() ? k : where + "." + k);
        }
    }
}

}  // namespace

Scene resolve_scene(const RunConfig& cfg)
{
    if (!cfg.builtin.empty() && !cfg.scene_file.empty()) {
        throw std::invalid_argument("give either a builtin scene or a scene file, not both");
    }
    if (!cfg.builtin.empty()) {
        return builtin_scene(cfg.builtin);
    }
    if (cfg.scene_file.empty()) {
        throw std::invalid_argument("no scene given (use --builtin or --scene)");
    }
    const fs::path path(cfg.scene_file);
    const std::string text = read_file(path);
    try {
        return parse_scene(text, path.stem().string());
    } catch (const ParseError& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

TrainOutputs cmd_train(const RunConfig& cfg, const fs::path& out, std::ostream& progress)
{
    const Scene scene = resolve_scene(cfg);
    MlpConfig mlp = cfg.mlp();
    mlp.input_dim = scene.dim;
    mlp.validate();
    const AnsatzConfig ansatz = cfg.ansatz_config();
    ansatz.validate();
    const int threads = threads_from_env();
    const TrainConfig tc = cfg.train_config(threads);
    tc.validate();

    make_dir(out / "checkpoints");
    json inputs = json::object();
    if (!cfg.scene_file.empty()) {
        inputs["scene"] = {{"path", cfg.scene_file}, {"fnv1a64", fnv1a_hex(read_file(cfg.scene_file))}};
    }
    const json manifest = {{"tool", kToolName},
                           {"version", kToolVersion},
                           {"command", "train"},
                           {"config", to_json(cfg)},
                           {"seed", cfg.seed},
                           {"threads", threads},
                           {"scene_text", to_string(scene)},
                           {"inputs", inputs},
                           {"outputs",
                            {{"model", "model.json"},
                             {"log", "log.csv"},
                             {"checkpoints", "checkpoints/"},
                             {"manifest", "manifest.json"}}}};
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    const json meta_base = {{"loss", to_string(tc.loss.kind)},
                            {"p", tc.loss.p},
                            {"lambda", tc.loss.penalty_weight},
                            {"gamma", tc.loss.gamma},
                            {"batch", tc.batch_size},
                            {"lr", tc.learning_rate},
                            {"seed", tc.seed},
                            {"iterations", tc.iterations}};
    const auto start = std::chrono::steady_clock::now();
    auto on_checkpoint = [&](int it, const AnsatzField& field) {
        json meta = meta_base;
        meta["iteration"] = it;
        char name[32];
        std::snprintf(name, sizeof name, "iter_%06d.json", it);
        save_checkpoint(out / "checkpoints" / name, field, meta);
        progress << "train: checkpoint " << it << "/" << tc.iterations << '\n';
    };
    TrainResult result = train(scene, mlp, ansatz, tc, on_checkpoint);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json meta = meta_base;
    meta["iteration"] = tc.iterations;
    meta["final_loss"] = result.log.losses.back();
    const auto [first, last] = loss_trend(result.log);
    meta["loss_median_first_tenth"] = first;
    meta["loss_median_last_tenth"] = last;
    save_checkpoint(out / "model.json", result.field, meta);
    write_with(out / "log.csv", [&](std::ostream& os) { result.log.write_csv(os); });
    progress << "train: done in " << std::fixed << std::setprecision(1) << seconds << " s, final loss "
             << std::scientific << std::setprecision(4) << result.log.losses.back() << std::defaultfloat << '\n';
    return {std::move(result.field), std::move(result.log), seconds};
}

namespace {

int default_grid_res(int dim)
{
    return dim == 1 ? 501 : dim == 2 ? 101 : 41;
}

void save_grid(const fs::path& path, const GridDump& g)
{
    write_with(path, [&](std::ostream& os) { write_grid(os, g); });
}

std::mt19937_64 eval_stream(std::uint64_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x6576616cu};
    return std::mt19937_64(seq);
}

}  // namespace

json cmd_eval(const EvalOptions& opts, const fs::path& out)
{
    if (opts.hist_samples <= 0) {
        throw std::invalid_argument("--hist-samples must be positive");
    }
    if (opts.grid_res != 0 && opts.grid_res < 2) {
        throw std::invalid_argument("--grid-res must be at least 2");
    }
    if (!(opts.zero_h > 0.0)) {
        throw std::invalid_argument("--zero-h must be positive");
    }
    const AnsatzField field = load_checkpoint(opts.model);
    const json train_meta = load_train_meta(opts.model);
    const Scene& scene = field.scene;
    const int dim = scene.dim;
    std::string oracle = opts.oracle;
    if (oracle == "auto") {
        oracle = has_analytic_sdf(scene.name) ? "analytic" : "brute";
    }
    if (oracle == "analytic" && !has_analytic_sdf(scene.name)) {
        throw std::invalid_argument("scene '" + scene.name + "' has no analytic distance; use --oracle brute");
    }
    if (oracle != "analytic" && oracle != "brute") {
        throw std::invalid_argument("unknown oracle '" + oracle + "'");
    }
    make_dir(out / "grids");
    make_dir(out / "plots");

    const NetworkField nf(field);
    const ZeroSetSample zeros = extract_zero_set(scene, opts.zero_h);
    std::optional<DistanceOracle> brute;
    Reference reference;
    if (oracle == "analytic") {
        reference = [name = scene.name](const Point& x) { return analytic_sdf(name, x); };
    } else {
        brute.emplace(scene, zeros);
        reference = [&brute](const Point& x) { return (*brute)(x); };
    }

    auto rng = eval_stream(opts.seed);
    const Batch points = sample_uniform(scene.domain, opts.hist_samples, rng);
    const Mask mask = default_mask(scene);
    json report;
    report["scene"] = scene.name;
    report["scene_text"] = to_string(scene);
    report["dim"] = dim;
    report["model"] = opts.model.string();
    report["config"] = {{"mlp", mlp_to_json(field.mlp)},
                        {"ansatz", ansatz_to_json(field.ansatz)},
                        {"train", train_meta}};
    report["oracle"] = {{"kind", oracle}, {"zero_set_h", opts.zero_h}};
    report["metrics"] = to_json(compare_to_oracle(nf, reference, points, mask));
    report["metrics"]["mask"] = dim == 1 && scene.name == "segment1d" ? "|x-0.5| >= 0.05"
                                : scene.name == "circle2d"            ? "|x| >= 0.1"
                                                                      : "none";
    report["metrics_unmasked"] = to_json(compare_to_oracle(nf, reference, points));

    const bool ppoisson = train_meta.value("loss", "eikonal") == "ppoisson";
    const double p = train_meta.value("p", 2.0);
    if (ppoisson && scene.name == "segment1d") {
        const Mask inner = [p](const Point& x) {
            return x[0] >= 0.05 && x[0] <= 0.95 && (p == 2.0 || std::abs(x[0] - 0.5) >= 0.05);
        };
        const Reference up = [p](const Point& x) { return analytic_ppoisson_1d(p, x[0]); };
        report["metrics_ppoisson"] = to_json(compare_to_oracle(nf, up, points, inner));
        report["metrics_ppoisson"]["mask"] = p == 2.0 ? "0.05 <= x <= 0.95" : "0.05 <= x <= 0.95, |x-0.5| >= 0.05";
    }

    json files = json::array();
    json residuals = json::object();
    auto residual = [&](ResidualKind kind, double pp) {
        auto hrng = eval_stream(opts.seed + 1);
        const ResidualSamples rs = residual_samples(nf, scene.domain, kind, pp, opts.hist_samples, hrng);
        const ResidualHistogram h = residual_histogram(rs);
        const std::string name = "residual_" + to_string(kind);
        write_histogram_plot(out / "plots" / (name + ".svg"), h,
                             kind == ResidualKind::grad_norm ? "|grad d|" : "p-Laplacian of d, p = " + std::to_string(pp));
        json j = to_json(h);
        if (kind == ResidualKind::grad_norm) {
            j["fraction_in_0.9_1.1"] = fraction_in(rs, 0.9, 1.1);
        } else {
            j["fraction_in_-1.2_-0.8"] = fraction_in(rs, -1.2, -0.8);
        }
        residuals[to_string(kind)] = j;
        files.push_back("plots/" + name + ".svg");
    };
    residual(ResidualKind::grad_norm, 2.0);
    if (ppoisson) {
        residual(ResidualKind::p_laplacian, p);
    }
    report["residuals"] = residuals;

    double exact_max = 0.0;
    for (const Point& z : exact_zero_points(scene)) {
        exact_max = std::max(exact_max, std::abs(ansatz_eval(field, z)));
    }
    report["zero_set"] = {{"points", zeros.points.size()},
                          {"h", zeros.h},
                          {"max_abs_d", audit_zero_set(nf, zeros)},
                          {"exact_roots", exact_zero_points(scene).size()},
                          {"exact_roots_max_abs_d", exact_max}};

    const int res = opts.grid_res ? opts.grid_res : default_grid_res(dim);
    const auto f_field = expr_field(scene);
    const ValueField ref_field(dim, reference);
    const GridDump g = grid_eval(nf, scene.domain, res);
    save_grid(out / "grids" / "field.grid", g);
    files.push_back("grids/field.grid");
    if (dim == 1) {
        const GridDump r = grid_eval(ref_field, scene.domain, res);
        save_grid(out / "grids" / "reference.grid", r);
        write_line_plot(out / "plots" / "field.svg", g, "d (solid) and reference distance (dashed)", &r);
        files.push_back("grids/reference.grid");
        files.push_back("plots/field.svg");
    } else if (dim == 2) {
        const GridDump r = grid_eval(ref_field, scene.domain, res);
        save_grid(out / "grids" / "reference.grid", r);
        write_heatmap(out / "plots" / "field.svg", g, "d with zero contour");
        write_heatmap(out / "plots" / "reference.svg", r, "reference distance");
        write_heatmap(out / "plots" / "f.svg", grid_eval(*f_field, scene.domain, res), "f with zero contour");
        files.push_back("grids/reference.grid");
        for (const char* f : {"plots/field.svg", "plots/reference.svg", "plots/f.svg"}) {
            files.push_back(f);
        }
    } else {
        const int sres = opts.grid_res ? opts.grid_res : 101;
        const GridDump s = grid_eval_slice(nf, scene.domain, 2, 0.0, sres);
        save_grid(out / "grids" / "field_slice_z0.grid", s);
        write_heatmap(out / "plots" / "field_slice_z0.svg", s, "d on the slice z = 0");
        write_heatmap(out / "plots" / "f_slice_z0.svg", grid_eval_slice(*f_field, scene.domain, 2, 0.0, sres),
                      "f on the slice z = 0");
        write_heatmap(out / "plots" / "reference_slice_z0.svg",
                      grid_eval_slice(ref_field, scene.domain, 2, 0.0, sres), "reference distance on z = 0");
        for (const char* f : {"grids/field_slice_z0.grid", "plots/field_slice_z0.svg", "plots/f_slice_z0.svg",
                              "plots/reference_slice_z0.svg"}) {
            files.push_back(f);
        }
    }
    report["files"] = files;
    check_finite(report, "");
    write_file(out / "report.json", report.dump(2) + "\n");
    return report;
}

void cmd_oracle(const Scene& scene, double h, int grid_res, const fs::path& out)
{
    if (grid_res != 0 && grid_res < 2) {
        throw std::invalid_argument("--grid-res must be at least 2");
    }
    const ZeroSetSample zeros = extract_zero_set(scene, h);
    make_dir(out / "plots");
    write_with(out / "zero_set.csv", [&](std::ostream& os) { write_points_csv(os, zeros); });
    const DistanceOracle oracle(scene, zeros);
    const ValueField field(scene.dim, [&](const Point& x) { return oracle(x); });
    const int res = grid_res ? grid_res : default_grid_res(scene.dim);
    const GridDump g = grid_eval(field, scene.domain, res);
    save_grid(out / "oracle.grid", g);
    if (scene.dim == 1) {
        write_line_plot(out / "plots" / "oracle.svg", g, "brute-force signed distance");
    } else if (scene.dim == 2) {
        write_heatmap(out / "plots" / "oracle.svg", g, "brute-force signed distance");
    } else {
        write_heatmap(out / "plots" / "oracle_slice_z0.svg",
                      grid_eval_slice(field, scene.domain, 2, 0.0, grid_res ? grid_res : 101),
                      "brute-force signed distance on z = 0");
    }
}

namespace {

struct Experiment {
    std::string name;
    std::string scene;
    LossKind loss;
    double p;
};

const std::vector<Experiment>& experiments()
{
    static const std::vector<Experiment> list{
        {"1d-eikonal", "segment1d", LossKind::eikonal, 2.0}, {"1d-p2", "segment1d", LossKind::ppoisson, 2.0},
        {"1d-p8", "segment1d", LossKind::ppoisson, 8.0},     {"2d-eikonal", "circle2d", LossKind::eikonal, 2.0},
        {"2d-p2", "circle2d", LossKind::ppoisson, 2.0},      {"2d-p8", "circle2d", LossKind::ppoisson, 8.0},
        {"3d-eikonal", "csg3d", LossKind::eikonal, 2.0},
    };
    return list;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::vector<std::string> repro_experiments()
{
    std::vector<std::string> names;
    for (const Experiment& e : experiments()) {
        names.push_back(e.name);
    }
    return names;
}

json cmd_repro(const ReproOptions& opts, const fs::path& out, std::ostream& progress)
{
    const auto names = repro_experiments();
    for (const std::string& o : opts.only) {
        if (std::find(names.begin(), names.end(), o) == names.end()) {
            throw std::invalid_argument("unknown experiment '" + o + "'");
        }
    }
    if (opts.iters < 0) {
        throw std::invalid_argument("--iters must be positive");
    }
    make_dir(out);
    json rows = json::array();
    for (const Experiment& e : experiments()) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), e.name) == opts.only.end()) {
            continue;
        }
        RunConfig cfg = opts.full ? RunConfig::full_scale() : RunConfig{};
        cfg.builtin = e.scene;
        cfg.loss = e.loss;
        cfg.p = e.p;
        if (opts.iters > 0) {
            cfg.iters = opts.iters;
            cfg.checkpoint_every = std::min(cfg.checkpoint_every, opts.iters);
        }
        const fs::path dir = out / e.name;
        progress << "repro: " << e.name << '\n';
        const TrainOutputs t = cmd_train(cfg, dir, progress);
        EvalOptions eo;
        eo.model = dir / "model.json";
        const json report = cmd_eval(eo, dir);
        json row = {{"experiment", e.name},
                    {"scene", e.scene},
                    {"loss", to_string(e.loss)},
                    {"p", e.p},
                    {"iters", cfg.iters},
                    {"oracle", report["oracle"]["kind"]},
                    {"mae", report["metrics"]["mae"]},
                    {"max_abs_error", report["metrics"]["max_abs_error"]},
                    {"grad_norm_in_0.9_1.1", report["residuals"]["grad_norm"]["fraction_in_0.9_1.1"]},
                    {"zero_set_max_abs_d", report["zero_set"]["max_abs_d"]},
                    {"final_loss", t.log.losses.back()},
                    {"train_seconds", t.seconds}};
        if (report.contains("metrics_ppoisson")) {
            row["mae_ppoisson"] = report["metrics_ppoisson"]["mae"];
        }
        rows.push_back(row);
    }

    write_with(out / "summary.csv", [&](std::ostream& os) {
        os << "experiment,scene,loss,p,iters,oracle,mae,max_abs_error,mae_ppoisson,grad_norm_in_0.9_1.1,"
              "zero_set_max_abs_d,final_loss,train_seconds\n";
        os.precision(10);
        for (const json& r : rows) {
            os << r["experiment"].get<std::string>() << ',' << r["scene"].get<std::string>() << ','
               << r["loss"].get<std::string>() << ',' << r["p"].get<double>() << ',' << r["iters"].get<int>() << ','
               << r["oracle"].get<std::string>() << ',' << r["mae"].get<double>() << ','
               << r["max_abs_error"].get<double>() << ',';
            if (r.contains("mae_ppoisson")) {
                os << r["mae_ppoisson"].get<double>();
            }
            os << ',' << r["grad_norm_in_0.9_1.1"].get<double>() << ',' << r["zero_set_max_abs_d"].get<double>()
               << ',' << r["final_loss"].get<double>() << ',' << r["train_seconds"].get<double>() << '\n';
        }
    });
    write_with(out / "summary.md", [&](std::ostream& os) {
        os << "| experiment | scene | loss | p | MAE | MAE (p-Poisson ref) | |grad d| in [0.9,1.1] | zero-set max |d| "
              "| final loss | seconds |\n";
        os << "|---|---|---|---|---|---|---|---|---|---|\n";
        for (const json& r : rows) {
            os << "| " << r["experiment"].get<std::string>() << " | " << r["scene"].get<std::string>() << " | "
               << r["loss"].get<std::string>() << " | " << fmt(r["p"].get<double>()) << " | "
               << fmt(r["mae"].get<double>()) << " | "
               << (r.contains("mae_ppoisson") ? fmt(r["mae_ppoisson"].get<double>()) : "") << " | "
               << fmt(r["grad_norm_in_0.9_1.1"].get<double>()) << " | "
               << fmt(r["zero_set_max_abs_d"].get<double>()) << " | " << fmt(r["final_loss"].get<double>()) << " | "
               << fmt(r["train_seconds"].get<double>()) << " |\n";
        }
    });
    progress << "repro: wrote " << rows.size() << " experiment(s) and summary to " << out.string() << '\n';
    return rows;
}

namespace {

void add_scene_options(CLI::App* cmd, std::string& builtin, std::string& scene)
{
    auto* b = cmd->add_option("--builtin", builtin, "Builtin scene: segment1d, circle2d or csg3d");
    auto* s = cmd->add_option("--scene", scene, "Scene file in the scene DSL");
    b->excludes(s);
}

// Rejects a manifest whose recorded scene file no longer matches.
void check_manifest_inputs(const json& doc)
{
    if (!doc.contains("inputs") || !doc["inputs"].contains("scene")) {
        return;
    }
    const json& s = doc["inputs"]["scene"];
    const std::string path = s.at("path").get<std::string>();
    if (fnv1a_hex(read_file(path)) != s.at("fnv1a64").get<std::string>()) {
        throw std::runtime_error(path + ": scene file changed since the manifest was written");
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Neural signed distance functions from implicit surfaces", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train an ansatz field on a scene");
    RunConfig flags;
    std::string config_path;
    std::string loss_s;
    std::string ansatz_s;
    bool full = false;
    std::string train_out;
    train_cmd->add_option("--config", config_path, "JSON config or manifest; flags override its values");
    add_scene_options(train_cmd, flags.builtin, flags.scene_file);
    train_cmd->add_option("--loss", loss_s, "eikonal or ppoisson")->check(CLI::IsMember({"eikonal", "ppoisson"}));
    auto* p_opt = train_cmd->add_option("--p", flags.p, "p-Poisson exponent (p >= 2)");
    auto* alpha_opt = train_cmd->add_option("--alpha", flags.alpha, "Smoothed-sign sharpness");
    train_cmd->add_option("--beta", flags.beta, "Softplus sharpness");
    train_cmd->add_option("--ansatz", ansatz_s, "product or sign")->check(CLI::IsMember({"product", "sign"}));
    train_cmd->add_option("--iters", flags.iters, "Iterations");
    train_cmd->add_option("--batch", flags.batch, "Batch size");
    train_cmd->add_option("--lr", flags.lr, "Learning rate");
    train_cmd->add_option("--lambda", flags.lambda, "Zero-set penalty weight");
    train_cmd->add_option("--gamma", flags.gamma, "Zero-set penalty sharpness");
    train_cmd->add_option("--layers", flags.layers, "Number of affine layers");
    train_cmd->add_option("--width", flags.width, "Hidden width");
    train_cmd->add_option("--skip-layer", flags.skip_layer, "Layer receiving the input skip (0: none)");
    train_cmd->add_option("--seed", flags.seed, "Random seed");
    train_cmd->add_option("--checkpoint-every", flags.checkpoint_every, "Checkpoint cadence (0: final only)");
    train_cmd->add_option("--log-every", flags.log_every, "Log cadence");
    train_cmd->add_flag("--full", full, "Full-scale defaults: 8 x 512, 15000 iterations, batch 1024");
    train_cmd->add_option("--out", train_out, "Output directory")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model against an oracle");
    EvalOptions eval_opts;
    std::string model_path;
    std::string eval_out;
    std::string eval_builtin;
    std::string eval_scene;
    eval_cmd->add_option("--model", model_path, "Checkpoint (model.json)")->required();
    eval_cmd->add_option("--oracle", eval_opts.oracle, "analytic, brute or auto")
        ->check(CLI::IsMember({"analytic", "brute", "auto"}));
    eval_cmd->add_option("--grid-res", eval_opts.grid_res, "Grid nodes per axis (>= 2)");
    eval_cmd->add_option("--hist-samples", eval_opts.hist_samples, "Residual and error samples");
    eval_cmd->add_option("--zero-h", eval_opts.zero_h, "Zero-set extraction spacing");
    eval_cmd->add_option("--seed", eval_opts.seed, "Sampling seed");
    add_scene_options(eval_cmd, eval_builtin, eval_scene);
    eval_cmd->add_option("--out", eval_out, "Output directory (default: the model's directory)");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force distance oracle for a scene");
    std::string oracle_builtin;
    std::string oracle_scene;
    double oracle_h = 0.02;
    int oracle_grid = 0;
    std::string oracle_out;
    add_scene_options(oracle_cmd, oracle_builtin, oracle_scene);
    oracle_cmd->add_option("--res", oracle_h, "Zero-set extraction spacing h");
    oracle_cmd->add_option("--grid-res", oracle_grid, "Grid nodes per axis (>= 2)");
    oracle_cmd->add_option("--out", oracle_out, "Output directory")->required();

    // repro
    auto* repro_cmd = app.add_subcommand("repro", "Run the experiment set and write a summary table");
    ReproOptions repro_opts;
    bool desk = false;
    std::string repro_out = "repro";
    auto* desk_flag = repro_cmd->add_flag("--desk", desk, "Desk-scale settings (default)");
    auto* full_flag = repro_cmd->add_flag("--full", repro_opts.full, "Full-scale settings");
    desk_flag->excludes(full_flag);
    repro_cmd->add_option("--only", repro_opts.only, "Experiments to run")->delimiter(',');
    repro_cmd->add_option("--iters", repro_opts.iters, "Override the iteration count");
    repro_cmd->add_option("--out", repro_out, "Output directory");

    std::vector<const char*> argv{kToolName};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << msg << '\n';
        return 2;
    }

    try {
        if (train_cmd->parsed()) {
            RunConfig cfg = full ? RunConfig::full_scale() : RunConfig{};
            if (!config_path.empty()) {
                json doc;
                try {
                    doc = read_json_file(config_path);
                    cfg = run_config_from_json(doc, cfg);
                } catch (const json::exception& e) {
                    throw std::runtime_error(config_path + ": " + e.what());
                } catch (const std::invalid_argument& e) {
                    throw std::runtime_error(config_path + ": " + e.what());
                }
                check_manifest_inputs(doc);
            }
            auto given = [&](const char* name) { return train_cmd->count(name) > 0; };
            if (given("--builtin")) {
                cfg.builtin = flags.builtin;
                cfg.scene_file.clear();
            }
            if (given("--scene")) {
                cfg.scene_file = flags.scene_file;
                cfg.builtin.clear();
            }
            if (!loss_s.empty()) {
                cfg.loss = loss_kind_from_string(loss_s);
            }
            if (!ansatz_s.empty()) {
                cfg.ansatz = ansatz_mode_from_string(ansatz_s);
            }
            auto take = [&](const char* name, auto RunConfig::*member) {
                if (given(name)) {
                    cfg.*member = flags.*member;
                }
            };
            take("--p", &RunConfig::p);
            take("--alpha", &RunConfig::alpha);
            take("--beta", &RunConfig::beta);
            take("--iters", &RunConfig::iters);
            take("--batch", &RunConfig::batch);
            take("--lr", &RunConfig::lr);
            take("--lambda", &RunConfig::lambda);
            take("--gamma", &RunConfig::gamma);
            take("--layers", &RunConfig::layers);
            take("--width", &RunConfig::width);
            take("--skip-layer", &RunConfig::skip_layer);
            take("--seed", &RunConfig::seed);
            take("--checkpoint-every", &RunConfig::checkpoint_every);
            take("--log-every", &RunConfig::log_every);
            if (p_opt->count() > 0 && cfg.loss != LossKind::ppoisson) {
                throw std::invalid_argument("--p requires --loss ppoisson");
            }
            if (alpha_opt->count() > 0 && cfg.ansatz != AnsatzMode::smoothed_sign) {
                throw std::invalid_argument("--alpha requires --ansatz sign");
            }
            cmd_train(cfg, train_out, out);
        } else if (eval_cmd->parsed()) {
            eval_opts.model = model_path;
            if (!eval_builtin.empty() || !eval_scene.empty()) {
                RunConfig sc;
                sc.builtin = eval_builtin;
                sc.scene_file = eval_scene;
                const Scene expected = resolve_scene(sc);
                const AnsatzField field = load_checkpoint(eval_opts.model);
                if (to_string(expected) != to_string(field.scene)) {
                    throw std::invalid_argument("checkpoint/scene mismatch: " + model_path + " was trained on '"
                                                + field.scene.name + "'");
                }
            }
            const fs::path dir = eval_out.empty() ? fs::path(model_path).parent_path() : fs::path(eval_out);
            const json report = cmd_eval(eval_opts, dir.empty() ? fs::path(".") : dir);
            out << "eval: MAE " << report["metrics"]["mae"].get<double>() << " ("
                << report["oracle"]["kind"].get<std::string>() << "), zero-set max |d| "
                << report["zero_set"]["max_abs_d"].get<double>() << '\n';
        } else if (oracle_cmd->parsed()) {
            RunConfig sc;
            sc.builtin = oracle_builtin;
            sc.scene_file = oracle_scene;
            const Scene scene = resolve_scene(sc);
            cmd_oracle(scene, oracle_h, oracle_grid, oracle_out);
            out << "oracle: wrote " << (fs::path(oracle_out) / "zero_set.csv").string() << '\n';
        } else if (repro_cmd->parsed()) {
            cmd_repro(repro_opts, repro_out, out);
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}

}  // namespace redist
