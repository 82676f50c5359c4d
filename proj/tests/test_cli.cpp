// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "remus/cli.hpp"
#include "remus/model.hpp"
#include "remus/nn/checkpoint.hpp"
#include "support.hpp"

using namespace remus;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

void write_tiny_config(const std::filesystem::path& path) {
    std::ofstream(path) << R"({"lr": 1e-3, "epochs": 2, "batch_size": 2, "seed": 1,
        "model": {"levels": 2, "hidden": 6, "features": 5, "mp_layers": [1, 1]}})";
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
    const Result r = run({"gen-data", "--family", "taylor-green", "--out", "x", "--bogus", "1"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("--help") != std::string::npos);
    CHECK(run({"build-hierarchy", "--levels", "2"}).code == cli::kExitUsage);
    CHECK(run({"gen-data", "--help"}).code == cli::kExitOk);
}

TEST_CASE("domain errors exit with 1") {
    test::TempDir dir;
    const Result bad = run({"gen-data", "--family", "karman", "--out", p(dir / "d")});
    CHECK(bad.code == cli::kExitDomain);
    CHECK(bad.err.find("BadFamily") != std::string::npos);

    REQUIRE(run({"gen-data", "--nodes", "10", "--family", "rotating-rigid", "--steps", "3", "--out", p(dir / "tiny")})
                .code == cli::kExitOk);
    const Result deep = run({"build-hierarchy", "--sample", p(dir / "tiny"), "--levels", "5"});
    CHECK(deep.code == cli::kExitDomain);
    CHECK(deep.err.find("HierarchyTooDeep") != std::string::npos);
}

TEST_CASE("gen-data and build-hierarchy outputs read back") {
    test::TempDir dir;
    REQUIRE(run({"gen-data", "--family", "advected-vortex", "--nodes", "300", "--steps", "4", "--seed", "9", "--samples",
                 "2", "--val", "1", "--out", p(dir / "ds")})
                .code == 0);
    const DatasetManifest m = load_manifest(dir / "ds");
    CHECK(m.paths("train").size() == 2);
    CHECK(m.paths("val").size() == 1);
    const Sample s = load_sample(m.paths("train")[0]);
    CHECK(s.fields.steps == 4);
    CHECK(s.nodes.size() == 300);

    const Result h = run({"build-hierarchy", "--sample", p(m.paths("train")[0]), "--levels", "2", "--out",
                          p(dir / "h.json")});
    REQUIRE(h.code == 0);
    std::ifstream in(dir / "h.json");
    const nlohmann::json file = nlohmann::json::parse(in);
    CHECK(file == nlohmann::json::parse(h.out));
    CHECK(file["levels"][0]["nodes"] == 300);

    const Result from_csv = run({"build-hierarchy", "--nodes", p(m.paths("train")[0] / "nodes.csv"), "--levels", "2"});
    CHECK(from_csv.code == 0);
    CHECK(nlohmann::json::parse(from_csv.out)["levels"][1]["nodes"] == file["levels"][1]["nodes"]);
}

TEST_CASE("train, rollout, check-equivariance and eval") {
    test::TempDir dir;
    REQUIRE(run({"gen-data", "--family", "taylor-green", "--nodes", "200", "--steps", "5", "--samples", "2", "--test",
                 "1", "--out", p(dir / "ds")})
                .code == 0);
    write_tiny_config(dir / "cfg.json");
    const Result tr = run({"train", "--data", p(dir / "ds"), "--config", p(dir / "cfg.json"), "--out", p(dir / "run")});
    REQUIRE(tr.code == 0);
    const auto metrics = read_lines(dir / "run" / "metrics.jsonl");
    REQUIRE(metrics.size() == 2);
    CHECK(nlohmann::json::parse(metrics[0]).contains("loss"));

    // Same seed, same metrics.
    REQUIRE(run({"train", "--data", p(dir / "ds"), "--config", p(dir / "cfg.json"), "--out", p(dir / "run2")}).code == 0);
    CHECK(read_lines(dir / "run2" / "metrics.jsonl") == metrics);
    // --epochs overrides the config.
    REQUIRE(run({"train", "--data", p(dir / "ds"), "--config", p(dir / "cfg.json"), "--out", p(dir / "run3"),
                 "--epochs", "1"})
                .code == 0);
    CHECK(read_lines(dir / "run3" / "metrics.jsonl").size() == 1);

    // rollout --steps 1 equals one forward step.
    const std::filesystem::path sample = load_manifest(dir / "ds").paths("test")[0];
    const Result ro = run({"rollout", "--checkpoint", p(dir / "run"), "--sample", p(sample), "--steps", "1", "--out",
                           p(dir / "pred")});
    REQUIRE(ro.code == 0);
    const Sample truth = load_sample(sample);
    const Sample pred = load_sample(dir / "pred");
    const nn::Checkpoint ck = nn::load_checkpoint(dir / "run" / "checkpoint.remus");
    Model model(ModelConfig::from_json(ck.header["model"]));
    nn::restore(model.params(), ck);
    const Matrix expected =
        forward_step(model, build_hierarchy(truth.nodes, model.config().kappa, model.config().levels), truth.fields.frame(0));
    const Matrix got = pred.fields.frame(1);
    CHECK(std::memcmp(expected.data(), got.data(), sizeof(double) * expected.size()) == 0);
    const nlohmann::json report = nlohmann::json::parse(ro.out);
    CHECK(report["mae"][0].get<double>() == doctest::Approx((expected - truth.fields.frame(1)).cwiseAbs().mean()));

    const Result eq = run({"check-equivariance", "--checkpoint", p(dir / "run"), "--sample", p(sample), "--trials", "8"});
    REQUIRE(eq.code == 0);
    const nlohmann::json ej = nlohmann::json::parse(eq.out);
    CHECK(ej["trials"] == 8);
    CHECK(ej["max_rel_error"].get<double>() < 1e-6);
    CHECK(ej["max_translation_error"].get<double>() < 1e-6);

    const Result ev = run({"eval", "--checkpoint", p(dir / "run"), "--data", p(dir / "ds"), "--steps", "3"});
    REQUIRE(ev.code == 0);
    const nlohmann::json vj = nlohmann::json::parse(ev.out);
    CHECK(vj["split"] == "test");
    CHECK(vj["per_step_mae"].size() == 3);
    CHECK(vj["samples"].size() == 1);
    CHECK(run({"eval", "--checkpoint", p(dir / "run"), "--data", p(dir / "ds"), "--split", "val"}).code ==
          cli::kExitDomain);
}

TEST_CASE("the installed binary maps errors to exit codes") {
    const char* exe = std::getenv("REMUS_CLI");
    if (exe == nullptr) return;
    auto status = [&](const std::string& args) {
        const int raw = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--help") == 0);
    CHECK(status("gen-data --unknown-flag") == 2);
    CHECK(status("build-hierarchy --nodes /nonexistent/nodes.csv") == 1);
}
