// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include "CLI11.hpp"
#include "remus/error.hpp"
#include "remus/hierarchy.hpp"
#include "remus/kernels.hpp"
#include "remus/model.hpp"
#include "remus/nn/checkpoint.hpp"
#include "remus/training.hpp"

namespace remus::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointName = "checkpoint.remus";
constexpr const char* kMetricsName = "metrics.jsonl";

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    f << j.dump(2) << "\n";
}

void emit(const nlohmann::json& j, const std::string& out_path, std::ostream& out) {
    if (!out_path.empty()) {
        const fs::path p(out_path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_json(p, j);
    }
    out << j.dump(2) << "\n";
}

Model load_model(const fs::path& path) {
    const fs::path file = fs::is_directory(path) ? path / kCheckpointName : path;
    const nn::Checkpoint ck = nn::load_checkpoint(file);
    if (!ck.header.contains("model")) throw Error(ErrorCode::ParseError, "checkpoint header lacks a model config");
    Model model(ModelConfig::from_json(ck.header.at("model")));
    nn::restore(model.params(), ck);
    return model;
}

// splitmix64 of (seed, index): distinct, well-spread per-sample seeds.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct GenArgs {
    std::string family;
    std::size_t nodes = 1000;
    std::size_t steps = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t samples = 1;
    std::size_t val = 0;
    std::size_t test = 0;
    double dt = 0.1;
    double frame_angle = 0.0;
};

int gen_data(const GenArgs& a, std::ostream& out) {
    parse_family(a.family);
    DatasetManifest m;
    m.root = a.out;
    m.seed = a.seed;
    m.generator = {{"family", a.family}, {"nodes", a.nodes}, {"steps", a.steps}, {"dt", a.dt},
                   {"frame_angle", a.frame_angle}};
    const std::size_t total = a.samples + a.val + a.test;
    for (std::size_t i = 0; i < total; ++i) {
        SyntheticOptions opt;
        opt.dt = a.dt;
        opt.frame_angle = a.frame_angle;
        const Sample s = generate_synthetic(sample_seed(a.seed, i), a.nodes, a.steps, a.family, opt);
        char name[32];
        std::snprintf(name, sizeof(name), "sample_%04zu", i);
        save_sample(m.root / name, s);
        m.samples.push_back({name, i < a.samples ? "train" : (i < a.samples + a.val ? "val" : "test")});
    }
    save_manifest(m);
    out << nlohmann::json{{"out", a.out}, {"samples", total}, {"family", a.family}, {"nodes", a.nodes},
                          {"steps", a.steps}}
                  .dump()
        << "\n";
    return kExitOk;
}

struct HierArgs {
    std::string sample;
    std::string nodes;
    std::size_t levels = 3;
    std::size_t kappa = 5;
    std::string out;
};

int hierarchy_cmd(const HierArgs& a, std::ostream& out) {
    const NodeSet nodes = a.sample.empty() ? load_nodes_csv(a.nodes) : resolve_sample(a.sample).nodes;
    emit(summarize(build_hierarchy(nodes, a.kappa, a.levels)), a.out, out);
    return kExitOk;
}

struct TrainArgs {
    std::string data;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
};

std::vector<std::shared_ptr<const TrainingGraph>> load_graphs(const DatasetManifest& m, std::string_view split,
                                                               const ModelConfig& config) {
    std::vector<std::shared_ptr<const TrainingGraph>> out;
    for (const fs::path& p : m.paths(split)) out.push_back(TrainingGraph::make(load_sample(p), config));
    return out;
}

int train_cmd(const TrainArgs& a, std::ostream& out) {
    TrainConfig cfg;
    if (!a.config.empty()) {
        std::ifstream f(a.config);
        if (!f) throw Error(ErrorCode::IoError, "cannot open " + a.config);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::ParseError, a.config + ": bad JSON at byte offset " + std::to_string(e.byte));
        }
        cfg = TrainConfig::from_json(j);
    }
    if (a.seed) {
        cfg.seed = *a.seed;
        cfg.model.seed = *a.seed;
    }
    if (a.epochs) cfg.epochs = *a.epochs;
    cfg.validate();

    const DatasetManifest m = load_manifest(a.data);
    const auto train_set = load_graphs(m, "train", cfg.model);
    const auto val_set = load_graphs(m, "val", cfg.model);
    if (train_set.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no train samples");

    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::ofstream metrics(dir / kMetricsName, std::ios::trunc);
    if (!metrics) throw Error(ErrorCode::IoError, "cannot write " + (dir / kMetricsName).string());

    Model model(cfg.model);
    const TrainResult r = train(model, train_set, val_set, cfg, [&](const nlohmann::json& rec) {
        metrics << rec.dump() << "\n" << std::flush;
    });
    nn::save_checkpoint(dir / kCheckpointName, model.params(),
                        {{"model", cfg.model.to_json()},
                         {"train", cfg.to_json()},
                         {"epochs", r.metrics.size()},
                         {"lr", r.lr},
                         {"rollout_steps", r.rollout_steps}});
    nlohmann::json summary = {{"checkpoint", (dir / kCheckpointName).string()},
                              {"metrics", (dir / kMetricsName).string()},
                              {"epochs", r.metrics.size()},
                              {"parameters", model.parameter_count()}};
    if (!r.metrics.empty()) {
        summary["first_loss"] = r.metrics.front()["loss"];
        summary["final_loss"] = r.metrics.back()["loss"];
    }
    out << summary.dump() << "\n";
    return kExitOk;
}

struct RolloutArgs {
    std::string checkpoint;
    std::string sample;
    std::size_t steps = 10;
    std::size_t t0 = 0;
    std::string out;
};

int rollout_cmd(const RolloutArgs& a, std::ostream& out) {
    const Model model = load_model(a.checkpoint);
    const Sample truth = resolve_sample(a.sample);
    if (a.t0 >= truth.fields.steps) throw Error(ErrorCode::InvalidArgument, "--t0 beyond the stored series");
    const Hierarchy h = build_hierarchy(truth.nodes, model.config().kappa, model.config().levels);
    const std::vector<Matrix> pred = rollout(model, h, truth.fields.frame(a.t0), a.steps);

    Sample result = truth;
    result.t0 = truth.t0 + static_cast<double>(a.t0) * truth.fields.dt;
    result.fields.steps = a.steps + 1;
    result.fields.values.assign(result.fields.steps * result.fields.nodes * 2, 0.0);
    result.fields.set_frame(0, truth.fields.frame(a.t0));
    nlohmann::json mae = nlohmann::json::array();
    for (std::size_t s = 0; s < a.steps; ++s) {
        result.fields.set_frame(s + 1, pred[s]);
        const std::size_t t = a.t0 + s + 1;
        if (t < truth.fields.steps) {
            mae.push_back((pred[s] - truth.fields.frame(t)).cwiseAbs().mean());
        } else {
            mae.push_back(nullptr);
        }
    }
    save_sample(a.out, result);
    const nlohmann::json report = {{"steps", a.steps}, {"t0", a.t0}, {"mae", mae}, {"out", a.out}};
    write_json(fs::path(a.out) / "mae.json", report);
    out << report.dump() << "\n";
    return kExitOk;
}

struct EquivArgs {
    std::string checkpoint;
    std::string sample;
    std::size_t trials = 8;
    std::uint64_t seed = 0;
    std::size_t t0 = 0;
};

int equivariance_cmd(const EquivArgs& a, std::ostream& out) {
    const Model model = load_model(a.checkpoint);
    const Sample s = resolve_sample(a.sample);
    if (a.t0 >= s.fields.steps) throw Error(ErrorCode::InvalidArgument, "--t0 beyond the stored series");
    const Matrix field = s.fields.frame(a.t0);
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> shift(-10.0, 10.0);
    std::vector<double> angles, rot_errors, shift_errors;
    for (std::size_t i = 0; i < a.trials; ++i) {
        const double theta = angle(rng);
        angles.push_back(theta);
        rot_errors.push_back(equivariance_error(model, s.nodes, field, Rotation::from_angle(theta)));
        const Vec2 t{shift(rng), shift(rng)};
        shift_errors.push_back(equivariance_error(model, s.nodes, field, Rotation::from_angle(0.0, t)));
    }
    const auto max_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    out << nlohmann::json{{"trials", a.trials},
                          {"max_rel_error", max_of(rot_errors)},
                          {"max_translation_error", max_of(shift_errors)},
                          {"angles", angles},
                          {"rel_errors", rot_errors},
                          {"translation_errors", shift_errors}}
                   .dump(2)
        << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string split = "test";
    std::size_t steps = 10;
    std::size_t t0 = 0;
    std::string out;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
    const Model model = load_model(a.checkpoint);
    const DatasetManifest m = load_manifest(a.data);
    const std::vector<fs::path> paths = m.paths(a.split);
    if (paths.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no '" + a.split + "' samples");
    std::vector<double> mean(a.steps, 0.0);
    nlohmann::json samples = nlohmann::json::array();
    for (const fs::path& p : paths) {
        const auto g = TrainingGraph::make(load_sample(p), model.config());
        const std::vector<double> mae = rollout_mae(model, *g, a.t0, a.steps);
        for (std::size_t s = 0; s < a.steps; ++s) mean[s] += mae[s] / static_cast<double>(paths.size());
        samples.push_back({{"path", fs::relative(p, m.root).string()}, {"mae", mae}});
    }
    double overall = 0.0;
    for (double v : mean) overall += v / static_cast<double>(mean.size());
    emit({{"split", a.split},
          {"steps", a.steps},
          {"t0", a.t0},
          {"metric", "plain MAE of both velocity components against the stored fields"},
          {"mean_mae", overall},
          {"per_step_mae", mean},
          {"samples", samples}},
         a.out, out);
    return kExitOk;
}

}  // namespace

Sample resolve_sample(const fs::path& path) {
    if (!fs::exists(path / "meta.json") && fs::exists(path / "manifest.json")) {
        const DatasetManifest m = load_manifest(path);
        if (m.samples.empty()) throw Error(ErrorCode::InvalidArgument, "dataset " + path.string() + " is empty");
        return load_sample(path / m.samples.front().path);
    }
    return load_sample(path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    kernels::configure_threads();

    CLI::App app{"Rotation-equivariant multi-scale graph network for 2-D vector fields", "remus"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
    gen_cmd->add_option("--family", gen.family, "advected-vortex | rotating-rigid | taylor-green")->required();
    gen_cmd->add_option("--nodes", gen.nodes, "Nodes per sample")->capture_default_str();
    gen_cmd->add_option("--steps", gen.steps, "Time points per sample")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();
    gen_cmd->add_option("--samples", gen.samples, "Training samples")->capture_default_str();
    gen_cmd->add_option("--val", gen.val, "Validation samples")->capture_default_str();
    gen_cmd->add_option("--test", gen.test, "Test samples")->capture_default_str();
    gen_cmd->add_option("--dt", gen.dt, "Time-step size")->capture_default_str();
    gen_cmd->add_option("--frame-angle", gen.frame_angle, "Rotate every sample by this angle (radians)");

    HierArgs hier;
    auto* hier_cmd = app.add_subcommand("build-hierarchy", "Build the multi-scale graph and print its summary");
    auto* hier_sample = hier_cmd->add_option("--sample", hier.sample, "Sample or dataset directory");
    auto* hier_nodes = hier_cmd->add_option("--nodes", hier.nodes, "nodes.csv file");
    hier_sample->excludes(hier_nodes);
    hier_cmd->add_option("--levels", hier.levels, "Number of levels")->capture_default_str();
    hier_cmd->add_option("--kappa", hier.kappa, "Incoming edges per node")->capture_default_str();
    hier_cmd->add_option("--out", hier.out, "Write the JSON summary here as well");

    TrainArgs tr;
    auto* train_cmd_app = app.add_subcommand("train", "Train a model");
    train_cmd_app->add_option("--data", tr.data, "Dataset directory")->required();
    train_cmd_app->add_option("--config", tr.config, "Training config JSON");
    train_cmd_app->add_option("--out", tr.out, "Output directory for checkpoint and metrics")->required();
    train_cmd_app->add_option("--seed", tr.seed, "Overrides the config seed");
    train_cmd_app->add_option("--epochs", tr.epochs, "Overrides the config epoch count");

    RolloutArgs ro;
    auto* ro_cmd = app.add_subcommand("rollout", "Autoregressive prediction from a stored sample");
    ro_cmd->add_option("--checkpoint", ro.checkpoint, "Checkpoint file or training output directory")->required();
    ro_cmd->add_option("--sample", ro.sample, "Sample or dataset directory")->required();
    ro_cmd->add_option("--steps", ro.steps, "Steps to predict")->capture_default_str()->check(CLI::PositiveNumber);
    ro_cmd->add_option("--t0", ro.t0, "Initial time index")->capture_default_str();
    ro_cmd->add_option("--out", ro.out, "Output sample directory")->required();

    EquivArgs eq;
    auto* eq_cmd = app.add_subcommand("check-equivariance", "Measure rotation and translation equivariance");
    eq_cmd->add_option("--checkpoint", eq.checkpoint, "Checkpoint file or training output directory")->required();
    eq_cmd->add_option("--sample", eq.sample, "Sample or dataset directory")->required();
    eq_cmd->add_option("--trials", eq.trials, "Random rotations")->capture_default_str();
    eq_cmd->add_option("--seed", eq.seed, "Seed for the random transforms")->capture_default_str();
    eq_cmd->add_option("--t0", eq.t0, "Time index of the input field")->capture_default_str();

    EvalArgs ev;
    auto* ev_cmd = app.add_subcommand("eval", "Dataset-level rollout MAE");
    ev_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file or training output directory")->required();
    ev_cmd->add_option("--data", ev.data, "Dataset directory")->required();
    ev_cmd->add_option("--split", ev.split, "train | val | test")
        ->capture_default_str()
        ->check(CLI::IsMember({"train", "val", "test"}));
    ev_cmd->add_option("--steps", ev.steps, "Rollout steps")->capture_default_str()->check(CLI::PositiveNumber);
    ev_cmd->add_option("--t0", ev.t0, "Initial time index")->capture_default_str();
    ev_cmd->add_option("--out", ev.out, "Write the JSON report here as well");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (hier_cmd->parsed() && hier.sample.empty() && hier.nodes.empty()) {
            throw CLI::RequiredError("build-hierarchy needs --sample or --nodes");
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::string sub;
        for (const auto* c : app.get_subcommands()) sub = " " + c->get_name();
        err << "error: " << e.what() << "\n";
        err << "Run 'remus" << sub << " --help' for usage.\n";
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return gen_data(gen, out);
        if (hier_cmd->parsed()) return hierarchy_cmd(hier, out);
        if (train_cmd_app->parsed()) return train_cmd(tr, out);
        if (ro_cmd->parsed()) return rollout_cmd(ro, out);
        if (eq_cmd->parsed()) return equivariance_cmd(eq, out);
        if (ev_cmd->parsed()) return eval_cmd(ev, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const fs::filesystem_error& e) {
        err << "error: IoError: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace remus::cli
