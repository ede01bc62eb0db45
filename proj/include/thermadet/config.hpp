#pragma once

#include "thermadet/types.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace thermadet::cfg {

inline constexpr const char* kVersion = "0.1.0";

// One tree drives every stage. Unknown keys are rejected with their path;
// defaults below are the documented ones.
struct ExperimentConfig {
    uint64_t seed = 42;
    std::string out_dir = "out";

    struct Simulator {
        int height = 32, width = 32;
        int frames = 100;
        double kernel_width = 0.0;  // <= 0 means height/4
        double k1 = 1.0, k2 = 0.1, k3 = 0.0;
        double tau = 20.0;
        double ambient = 7000.0;
        double noise_sd = 15.0;
        int n_normal = 360, n_anomalous = 36;
        double fault_db_min = 6.0, fault_db_max = 12.0;
        std::vector<int> gain_set = valid_gain_codes();
        std::vector<int> phase_set = valid_phase_degrees();
    } simulator;

    struct Dataset {
        int window_length = 10;
        int window_offset = 5;
        double train_ratio = 0.8, val_ratio = 0.1, test_ratio = 0.1;
    } dataset;

    struct Model {
        int latent_dim = 8;
        std::array<int, 3> conv_channels{16, 32, 64};
        int kernel = 3, stride = 2;
        int hidden_dim = 128;
        double beta_cvae = 1.0;
        double beta_betacvae = 1e-4;
        std::vector<std::string> variants{"AE", "CVAE", "BetaCVAE", "PCVAE"};
    } model;

    struct Trainer {
        double learning_rate = 1e-3;
        int batch_size = 32;
        int max_epochs = 200;
        int patience = 4;
        double grad_clip = 5.0;
        int threads = 0;  // 0 = hardware concurrency
        bool log_wall_time = false;
    } trainer;

    struct Detector {
        int k_native = 5000;
        int k_reference_pixels = 640 * 480;
        double residual_floor = 1e-3;
        std::optional<double> epsilon;  // absent: calibrate on val normals + simulated faults
        int recon_prob_samples = 10;
        bool window_level_voting = false;
    } detector;

    struct Evaluation {
        std::string sequence_score = "median";  // or "vote_fraction"
        bool emit_plots = true;
    } evaluation;

    void validate() const;
    nlohmann::json to_json() const;

    // out_dir resolved against THERMADET_OUT_ROOT when relative and the
    // variable is set.
    std::filesystem::path resolved_out_dir() const;
};

// Parse with defaults; any key not in the schema is an error naming its path.
ExperimentConfig config_from_json(const nlohmann::json& j);

// Load from file (empty path = all defaults), then apply `key.path=value`
// overrides, then validate.
ExperimentConfig load_config(const std::string& config_path, const std::vector<std::string>& overrides);

// Dotted-path override; value parsed as JSON when possible, else as string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

}  // namespace thermadet::cfg
