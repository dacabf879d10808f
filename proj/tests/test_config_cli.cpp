#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "catex/cli.hpp"
#include "catex/config.hpp"
#include "catex/errors.hpp"

using namespace catex;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("catex_test_cli_" + std::to_string(counter++));
        std::error_code ec;
        fs::remove_all(path, ec);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "catex");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_SUITE("config_cli") {

TEST_CASE("defaults are valid, complete and stably fingerprinted") {
    ExperimentConfig c = ExperimentConfig::defaults();
    c.validate();
    CHECK(c.digest.size() == 16);
    CHECK(c.digest == ExperimentConfig::defaults().digest);

    for (const char* s : {"vanilla", "ranged", "vanilla_zeros", "ranged_zeros", "covariance"})
        CHECK(c.samplers.count(s) == 1);
    for (const char* m :
         {"linear", "decision_tree", "random_forest", "gbdt", "mlp", "gbdt_nores",
          "mlp_nores", "gbdt_reg"})
        CHECK(c.models.count(m) == 1);
    CHECK(c.models.at("gbdt_nores").residual_connection == false);
    CHECK(c.models.at("gbdt").residual_connection == true);
    CHECK(c.models.at("gbdt_reg").min_samples_leaf == 50);
    CHECK(c.ablate_model == "gbdt_reg");

    // the canonical JSON parses and reproduces the digest
    auto j = nlohmann::json::parse(c.to_json_string());
    CHECK(j.at("seed").get<std::uint64_t>() == 42);
    CHECK(ExperimentConfig::load("").digest == c.digest);
}

TEST_CASE("the digest names the experiment, not the destination") {
    ExperimentConfig a = ExperimentConfig::defaults();
    ExperimentConfig b = a;
    b.out_dir = "/somewhere/else";
    b.recompute_digest();
    CHECK(a.digest == b.digest);

    b.seed = 43;  // but the science does change it
    b.recompute_digest();
    CHECK(a.digest != b.digest);
}

TEST_CASE("load overlays the file onto the defaults") {
    TempDir tmp;
    const fs::path p = tmp.path / "cfg.json";
    spit(p, R"({"seed": 7, "transport": {"cfl": 1.0},
                "models": {"gbdt": {"n_trees": 10}}})");
    ExperimentConfig c = ExperimentConfig::load(p.string());
    CHECK(c.seed == 7);
    CHECK(c.transport.cfl == 1.0);
    CHECK(c.transport.n_cells == 100);  // untouched default
    CHECK(c.models.at("gbdt").n_trees == 10);
    CHECK(c.models.at("gbdt").max_depth == 6);  // preset field kept
    CHECK(c.models.at("mlp").epochs == 40);     // other presets kept
    CHECK(c.digest != ExperimentConfig::defaults().digest);
}

TEST_CASE("bad config files are rejected with context") {
    TempDir tmp;
    const fs::path p = tmp.path / "cfg.json";

    spit(p, "{ not json");
    CHECK_THROWS_AS(ExperimentConfig::load(p.string()), InvalidInput);

    spit(p, R"({"transprot": {"cfl": 1.0}})");  // typo must not pass silently
    CHECK_THROWS_AS(ExperimentConfig::load(p.string()), InvalidInput);

    spit(p, R"({"exchange": {"cec": -1.0}})");
    CHECK_THROWS_AS(ExperimentConfig::load(p.string()), InvalidInput);

    spit(p, R"({"ablate_model": "unheard_of"})");
    CHECK_THROWS_AS(ExperimentConfig::load(p.string()), InvalidInput);

    CHECK_THROWS_AS(ExperimentConfig::load((tmp.path / "missing.json").string()),
                    InvalidInput);
}

TEST_CASE("cli: help and bad invocations") {
    CHECK(cli({"--help"}) == 0);
    CHECK(cli({"frobnicate"}) != 0);  // unknown subcommand
}

TEST_CASE("cli: surrogate rollout without a model fails cleanly") {
    TempDir tmp;
    CHECK(cli({"--out", tmp.path.string(), "rollout", "--backend", "surrogate"}) != 0);
}

TEST_CASE("cli: generate writes dataset, provenance and digest") {
    TempDir tmp;
    CHECK(cli({"--out", tmp.path.string(), "generate", "--sampler", "vanilla", "--n",
               "50"}) == 0);
    const fs::path csv = tmp.path / "dataset_vanilla.csv";
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(tmp.path / "dataset_vanilla.csv.provenance.json"));
    auto prov = nlohmann::json::parse(slurp(tmp.path / "dataset_vanilla.csv.provenance.json"));

    // out_dir does not enter the digest, so this is the default-config digest
    CHECK(prov.at("config_digest").get<std::string>() ==
          ExperimentConfig::defaults().digest);

    // the lock is released afterwards: a second run succeeds
    CHECK(cli({"--out", tmp.path.string(), "generate", "--sampler", "vanilla", "--n",
               "50"}) == 0);
}

TEST_CASE("cli: seed override changes the sampled rows") {
    TempDir tmp;
    CHECK(cli({"--out", tmp.path.string(), "generate", "--n", "30"}) == 0);
    std::string first = slurp(tmp.path / "dataset_vanilla.csv");
    CHECK(cli({"--out", tmp.path.string(), "--seed", "99", "generate", "--n", "30"}) == 0);
    std::string second = slurp(tmp.path / "dataset_vanilla.csv");
    CHECK(first != second);
}

TEST_CASE("cli: unknown presets fail with a nonzero exit") {
    TempDir tmp;
    CHECK(cli({"--out", tmp.path.string(), "generate", "--sampler", "stratified"}) != 0);
}

TEST_CASE("cli: a stale lock blocks the run") {
    TempDir tmp;
    spit(tmp.path / ".catex.lock", "held\n");
    CHECK(cli({"--out", tmp.path.string(), "generate", "--n", "10"}) != 0);
    fs::remove(tmp.path / ".catex.lock");
    CHECK(cli({"--out", tmp.path.string(), "generate", "--n", "10"}) == 0);
}

TEST_CASE("cli: train then rollout on a tiny pipeline") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    // a deliberately small column so the oracle reference stays cheap
    spit(cfg, R"({"transport": {"n_cells": 10, "total_pore_volumes": 1.0},
                  "models": {"gbdt": {"n_trees": 30, "max_depth": 4}}})");
    const std::string cfg_arg = cfg.string();

    CHECK(cli({"--config", cfg_arg, "--out", tmp.path.string(), "generate", "--sampler",
               "vanilla", "--n", "500"}) == 0);
    CHECK(cli({"--config", cfg_arg, "--out", tmp.path.string(), "train", "--model", "gbdt",
               "--dataset", (tmp.path / "dataset_vanilla.csv").string()}) == 0);
    REQUIRE(fs::exists(tmp.path / "model_gbdt.json"));
    auto report = nlohmann::json::parse(slurp(tmp.path / "model_gbdt.json.report.json"));
    CHECK(report.at("r2").get<double>() > 0.5);
    CHECK(report.at("dataset_digest").get<std::string>().size() == 16);

    CHECK(cli({"--config", cfg_arg, "--out", tmp.path.string(), "rollout", "--backend",
               "surrogate", "--model", (tmp.path / "model_gbdt.json").string()}) == 0);
    REQUIRE(fs::exists(tmp.path / "rollout_surrogate.summary.json"));
    auto summary = nlohmann::json::parse(slurp(tmp.path / "rollout_surrogate.summary.json"));
    CHECK(summary.at("rollout_error").get<double>() >= 0.0);
    CHECK(summary.at("steps").get<int>() == 12);  // ceil(1.0 / 0.09)
    REQUIRE(fs::exists(tmp.path / "rollout_reference_outflow.csv"));

    // oracle backend scores zero against the cached reference
    CHECK(cli({"--config", cfg_arg, "--out", tmp.path.string(), "rollout", "--backend",
               "oracle"}) == 0);
    auto oracle = nlohmann::json::parse(slurp(tmp.path / "rollout_oracle.summary.json"));
    CHECK(oracle.at("rollout_error").get<double>() == 0.0);
}

TEST_CASE("cli: render draws an svg from a csv") {
    TempDir tmp;
    const fs::path csv = tmp.path / "series.csv";
    spit(csv, "t,a,b\n0,1.0,2.0\n1,1.5,1.0\n2,0.5,3.0\n");
    CHECK(cli({"render", "--input", csv.string(), "--output",
               (tmp.path / "series.svg").string(), "--title", "demo"}) == 0);
    std::string svg = slurp(tmp.path / "series.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("demo") != std::string::npos);
    CHECK(svg.find(">a<") != std::string::npos);  // legend labels
    CHECK(svg.find(">b<") != std::string::npos);
}

}  // TEST_SUITE
