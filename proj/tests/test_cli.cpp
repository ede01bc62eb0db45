#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thermadet/config.hpp"
#include "thermadet/pipeline.hpp"

#include <filesystem>
#include <fstream>

using namespace thermadet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("thermadet_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

// A pipeline config small enough for test runtime: 16x16 frames, 12 raw
// frames, two variants, two epochs.
cfg::ExperimentConfig small_config(const fs::path& out) {
    nlohmann::json j;
    j["seed"] = 7;
    j["out_dir"] = out.string();
    j["simulator"] = {{"height", 16}, {"width", 16},    {"frames", 12},     {"n_normal", 20},
                      {"n_anomalous", 2}, {"tau", 3.0}, {"noise_sd", 10.0}};
    j["dataset"] = {{"window_length", 4}, {"window_offset", 4}};
    j["model"] = {{"conv_channels", {4, 8, 8}}, {"hidden_dim", 16}, {"variants", {"AE", "PCVAE"}}};
    j["trainer"] = {{"max_epochs", 2}, {"batch_size", 8}, {"threads", 2}};
    j["detector"] = {{"recon_prob_samples", 2}};
    j["evaluation"] = {{"emit_plots", false}};
    auto c = cfg::config_from_json(j);
    c.validate();
    return c;
}

}  // namespace

TEST_CASE("empty config resolves to documented defaults and validates") {
    const auto c = cfg::config_from_json(nlohmann::json::object());
    c.validate();
    CHECK(c.dataset.window_length == 10);
    CHECK(c.dataset.window_offset == 5);
    CHECK(c.model.latent_dim == 8);
    CHECK(c.trainer.patience == 4);
    CHECK(c.detector.k_native == 5000);
    CHECK(c.model.beta_betacvae == doctest::Approx(1e-4));
    CHECK_FALSE(c.detector.epsilon.has_value());
    CHECK(c.model.variants.size() == 4);
}

TEST_CASE("unknown keys are rejected with their path") {
    nlohmann::json j;
    j["trainer"]["learning_rage"] = 0.1;
    try {
        cfg::config_from_json(j);
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("trainer.learning_rage") != std::string::npos);
    }
}

TEST_CASE("invariant violations are rejected: beta 0 and phase 30") {
    nlohmann::json j1;
    j1["model"]["beta_betacvae"] = 0.0;
    CHECK_THROWS_AS(cfg::config_from_json(j1).validate(), std::invalid_argument);

    nlohmann::json j2;
    j2["simulator"]["phase_set"] = {0, 30, 90};
    CHECK_THROWS_AS(cfg::config_from_json(j2).validate(), std::invalid_argument);

    nlohmann::json j3;
    j3["simulator"]["gain_set"] = {155, 222};
    CHECK_THROWS_AS(cfg::config_from_json(j3).validate(), std::invalid_argument);
}

TEST_CASE("--set overrides parse dotted paths and JSON values") {
    nlohmann::json tree = nlohmann::json::object();
    cfg::apply_override(tree, "trainer.max_epochs=7");
    cfg::apply_override(tree, "evaluation.sequence_score=vote_fraction");
    cfg::apply_override(tree, "model.variants=[\"AE\"]");
    const auto c = cfg::config_from_json(tree);
    c.validate();
    CHECK(c.trainer.max_epochs == 7);
    CHECK(c.evaluation.sequence_score == "vote_fraction");
    CHECK(c.model.variants == std::vector<std::string>{"AE"});

    CHECK_THROWS_AS(cfg::apply_override(tree, "no_equals_sign"), std::invalid_argument);
}

TEST_CASE("unknown command is rejected") {
    const auto c = cfg::config_from_json(nlohmann::json::object());
    CHECK_THROWS_AS(pipeline::run_command("frobnicate", c), std::invalid_argument);
}

TEST_CASE("relative out_dir resolves against THERMADET_OUT_ROOT") {
    auto c = cfg::config_from_json(nlohmann::json::object());
    c.out_dir = "sub/dir";
    setenv("THERMADET_OUT_ROOT", "/tmp/thermadet_root", 1);
    CHECK(c.resolved_out_dir() == fs::path("/tmp/thermadet_root/sub/dir"));
    unsetenv("THERMADET_OUT_ROOT");
    CHECK(c.resolved_out_dir() == fs::path("sub/dir"));

    c.out_dir = "/abs/path";
    setenv("THERMADET_OUT_ROOT", "/tmp/thermadet_root", 1);
    CHECK(c.resolved_out_dir() == fs::path("/abs/path"));
    unsetenv("THERMADET_OUT_ROOT");
}

TEST_CASE("rerunning simulate with the same seed gives an identical manifest") {
    const auto dir = temp_dir("cli_sim");
    auto c = small_config(dir / "run");
    pipeline::run_simulate(c);
    const auto bytes1 = file_bytes(dir / "run/raw/manifest.jsonl");

    auto c2 = small_config(dir / "run2");
    pipeline::run_simulate(c2);
    const auto bytes2 = file_bytes(dir / "run2/raw/manifest.jsonl");
    CHECK(bytes1 == bytes2);
}

TEST_CASE("full small pipeline produces manifest, checkpoints, and a report") {
    const auto dir = temp_dir("cli_all");
    auto c = small_config(dir / "run");
    CHECK(pipeline::run_command("all", c) == 0);

    CHECK(fs::exists(dir / "run/raw/manifest.jsonl"));
    CHECK(fs::exists(dir / "run/split.json"));
    CHECK(fs::exists(dir / "run/models/AE.ckpt"));
    CHECK(fs::exists(dir / "run/models/PCVAE.ckpt"));
    CHECK(fs::exists(dir / "run/models/AE_trainlog.csv"));
    CHECK(fs::exists(dir / "run/report/metrics.csv"));
    CHECK(fs::exists(dir / "run/report/summary.json"));
    CHECK(fs::exists(dir / "run/config.json"));

    // the resolved config echo carries the toolkit version
    const auto echoed = nlohmann::json::parse(file_bytes(dir / "run/config.json"));
    CHECK(echoed.at("version").get<std::string>() == cfg::kVersion);
    CHECK(echoed.at("config").at("seed").get<int>() == 7);

    // AE has rows full/no_voting/no_contour; PCVAE adds recon_prob
    const auto metrics = file_bytes(dir / "run/report/metrics.csv");
    CHECK(metrics.find("AE,full") != std::string::npos);
    CHECK(metrics.find("AE,no_voting") != std::string::npos);
    CHECK(metrics.find("AE,no_contour") != std::string::npos);
    CHECK(metrics.find("PCVAE,recon_prob") != std::string::npos);

    // report regeneration from summary.json is byte-stable
    const auto before = file_bytes(dir / "run/report/metrics.csv");
    pipeline::run_report(c);
    CHECK(file_bytes(dir / "run/report/metrics.csv") == before);
}
