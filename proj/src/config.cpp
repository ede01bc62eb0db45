#include "thermadet/config.hpp"

#include <cstdlib>
#include <fstream>

namespace thermadet::cfg {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& user, const json& schema, const std::string& path) {
    if (!user.is_object()) return;
    for (const auto& [key, value] : user.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!schema.contains(key)) throw std::invalid_argument("config: unknown key '" + here + "'");
        if (value.is_object()) reject_unknown_keys(value, schema.at(key), here);
    }
}

template <typename T>
void take(const json& src, const char* key, T& dst, const std::string& path) {
    if (!src.contains(key)) return;
    try {
        if constexpr (std::is_same_v<T, std::optional<double>>) {
            if (src.at(key).is_null())
                dst = std::nullopt;
            else
                dst = src.at(key).get<double>();
        } else {
            dst = src.at(key).get<T>();
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: bad value for '" + path + "." + key + "': " + e.what());
    }
}

}  // namespace

json ExperimentConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["simulator"] = {{"height", simulator.height},
                      {"width", simulator.width},
                      {"frames", simulator.frames},
                      {"kernel_width", simulator.kernel_width},
                      {"k1", simulator.k1},
                      {"k2", simulator.k2},
                      {"k3", simulator.k3},
                      {"tau", simulator.tau},
                      {"ambient", simulator.ambient},
                      {"noise_sd", simulator.noise_sd},
                      {"n_normal", simulator.n_normal},
                      {"n_anomalous", simulator.n_anomalous},
                      {"fault_db_min", simulator.fault_db_min},
                      {"fault_db_max", simulator.fault_db_max},
                      {"gain_set", simulator.gain_set},
                      {"phase_set", simulator.phase_set}};
    j["dataset"] = {{"window_length", dataset.window_length},
                    {"window_offset", dataset.window_offset},
                    {"train_ratio", dataset.train_ratio},
                    {"val_ratio", dataset.val_ratio},
                    {"test_ratio", dataset.test_ratio}};
    j["model"] = {{"latent_dim", model.latent_dim},
                  {"conv_channels", model.conv_channels},
                  {"kernel", model.kernel},
                  {"stride", model.stride},
                  {"hidden_dim", model.hidden_dim},
                  {"beta_cvae", model.beta_cvae},
                  {"beta_betacvae", model.beta_betacvae},
                  {"variants", model.variants}};
    j["trainer"] = {{"learning_rate", trainer.learning_rate},
                    {"batch_size", trainer.batch_size},
                    {"max_epochs", trainer.max_epochs},
                    {"patience", trainer.patience},
                    {"grad_clip", trainer.grad_clip},
                    {"threads", trainer.threads},
                    {"log_wall_time", trainer.log_wall_time}};
    j["detector"] = {{"k_native", detector.k_native},
                     {"k_reference_pixels", detector.k_reference_pixels},
                     {"residual_floor", detector.residual_floor},
                     {"epsilon", detector.epsilon ? json(*detector.epsilon) : json(nullptr)},
                     {"recon_prob_samples", detector.recon_prob_samples},
                     {"window_level_voting", detector.window_level_voting}};
    j["evaluation"] = {{"sequence_score", evaluation.sequence_score}, {"emit_plots", evaluation.emit_plots}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    reject_unknown_keys(j, c.to_json(), "");

    take(j, "seed", c.seed, "");
    take(j, "out_dir", c.out_dir, "");
    if (j.contains("simulator")) {
        const auto& s = j.at("simulator");
        auto& d = c.simulator;
        take(s, "height", d.height, "simulator");
        take(s, "width", d.width, "simulator");
        take(s, "frames", d.frames, "simulator");
        take(s, "kernel_width", d.kernel_width, "simulator");
        take(s, "k1", d.k1, "simulator");
        take(s, "k2", d.k2, "simulator");
        take(s, "k3", d.k3, "simulator");
        take(s, "tau", d.tau, "simulator");
        take(s, "ambient", d.ambient, "simulator");
        take(s, "noise_sd", d.noise_sd, "simulator");
        take(s, "n_normal", d.n_normal, "simulator");
        take(s, "n_anomalous", d.n_anomalous, "simulator");
        take(s, "fault_db_min", d.fault_db_min, "simulator");
        take(s, "fault_db_max", d.fault_db_max, "simulator");
        take(s, "gain_set", d.gain_set, "simulator");
        take(s, "phase_set", d.phase_set, "simulator");
    }
    if (j.contains("dataset")) {
        const auto& s = j.at("dataset");
        auto& d = c.dataset;
        take(s, "window_length", d.window_length, "dataset");
        take(s, "window_offset", d.window_offset, "dataset");
        take(s, "train_ratio", d.train_ratio, "dataset");
        take(s, "val_ratio", d.val_ratio, "dataset");
        take(s, "test_ratio", d.test_ratio, "dataset");
    }
    if (j.contains("model")) {
        const auto& s = j.at("model");
        auto& d = c.model;
        take(s, "latent_dim", d.latent_dim, "model");
        take(s, "conv_channels", d.conv_channels, "model");
        take(s, "kernel", d.kernel, "model");
        take(s, "stride", d.stride, "model");
        take(s, "hidden_dim", d.hidden_dim, "model");
        take(s, "beta_cvae", d.beta_cvae, "model");
        take(s, "beta_betacvae", d.beta_betacvae, "model");
        take(s, "variants", d.variants, "model");
    }
    if (j.contains("trainer")) {
        const auto& s = j.at("trainer");
        auto& d = c.trainer;
        take(s, "learning_rate", d.learning_rate, "trainer");
        take(s, "batch_size", d.batch_size, "trainer");
        take(s, "max_epochs", d.max_epochs, "trainer");
        take(s, "patience", d.patience, "trainer");
        take(s, "grad_clip", d.grad_clip, "trainer");
        take(s, "threads", d.threads, "trainer");
        take(s, "log_wall_time", d.log_wall_time, "trainer");
    }
    if (j.contains("detector")) {
        const auto& s = j.at("detector");
        auto& d = c.detector;
        take(s, "k_native", d.k_native, "detector");
        take(s, "k_reference_pixels", d.k_reference_pixels, "detector");
        take(s, "residual_floor", d.residual_floor, "detector");
        take(s, "epsilon", d.epsilon, "detector");
        take(s, "recon_prob_samples", d.recon_prob_samples, "detector");
        take(s, "window_level_voting", d.window_level_voting, "detector");
    }
    if (j.contains("evaluation")) {
        const auto& s = j.at("evaluation");
        auto& d = c.evaluation;
        take(s, "sequence_score", d.sequence_score, "evaluation");
        take(s, "emit_plots", d.emit_plots, "evaluation");
    }
    return c;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& path, const std::string& why) {
        throw std::invalid_argument("config: " + path + ": " + why);
    };

    if (simulator.height < 8 || simulator.width < 8) fail("simulator.height/width", "grid must be at least 8x8");
    const int factor = model.stride * model.stride * model.stride;
    if (simulator.height % factor != 0 || simulator.width % factor != 0)
        fail("simulator.height/width", "must be divisible by stride^3 = " + std::to_string(factor));
    if (simulator.frames < 2) fail("simulator.frames", "need at least 2 frames");
    if (simulator.n_normal < 10) fail("simulator.n_normal", "need at least 10 normal sequences to split");
    if (simulator.n_anomalous < 0) fail("simulator.n_anomalous", "must be non-negative");
    if (simulator.fault_db_min < 0 || simulator.fault_db_max < simulator.fault_db_min)
        fail("simulator.fault_db_min/max", "need 0 <= min <= max");
    if (!(simulator.k1 > 0)) fail("simulator.k1", "must be > 0");
    if (!(simulator.tau > 0)) fail("simulator.tau", "must be > 0");
    if (simulator.noise_sd < 0) fail("simulator.noise_sd", "must be >= 0");
    if (simulator.ambient < 0) fail("simulator.ambient", "must be >= 0");
    if (simulator.gain_set.empty()) fail("simulator.gain_set", "must not be empty");
    if (simulator.phase_set.empty()) fail("simulator.phase_set", "must not be empty");
    for (int g : simulator.gain_set) {
        bool ok = false;
        for (int v : valid_gain_codes()) ok |= (g == v);
        if (!ok) fail("simulator.gain_set", "gain " + std::to_string(g) + " not in the value set");
    }
    for (int p : simulator.phase_set) {
        bool ok = false;
        for (int v : valid_phase_degrees()) ok |= (p == v);
        if (!ok) fail("simulator.phase_set", "phase " + std::to_string(p) + " not in the value set");
    }

    if (dataset.window_length < 1) fail("dataset.window_length", "must be >= 1");
    if (dataset.window_offset < 1) fail("dataset.window_offset", "must be >= 1");
    if (dataset.window_length > simulator.frames - 1)
        fail("dataset.window_length", "exceeds processed sequence length");
    if (!(dataset.train_ratio > 0) || !(dataset.val_ratio > 0) || !(dataset.test_ratio > 0))
        fail("dataset.*_ratio", "ratios must be positive");

    if (model.latent_dim < 1) fail("model.latent_dim", "must be >= 1");
    if (model.hidden_dim < 1) fail("model.hidden_dim", "must be >= 1");
    if (!(model.beta_cvae > 0)) fail("model.beta_cvae", "beta must be > 0");
    if (!(model.beta_betacvae > 0)) fail("model.beta_betacvae", "beta must be > 0");
    if (model.variants.empty()) fail("model.variants", "must not be empty");
    for (const auto& v : model.variants)
        if (v != "AE" && v != "CVAE" && v != "BetaCVAE" && v != "PCVAE")
            fail("model.variants", "unknown variant '" + v + "'");

    if (trainer.patience < 1) fail("trainer.patience", "must be >= 1");
    if (trainer.batch_size < 1) fail("trainer.batch_size", "must be >= 1");
    if (trainer.max_epochs < 1) fail("trainer.max_epochs", "must be >= 1");
    if (!(trainer.learning_rate > 0)) fail("trainer.learning_rate", "must be > 0");

    if (detector.k_native < 1) fail("detector.k_native", "must be >= 1");
    if (detector.k_reference_pixels < 1) fail("detector.k_reference_pixels", "must be >= 1");
    if (detector.residual_floor < 0) fail("detector.residual_floor", "must be >= 0");
    if (detector.recon_prob_samples < 1) fail("detector.recon_prob_samples", "must be >= 1");

    if (evaluation.sequence_score != "median" && evaluation.sequence_score != "vote_fraction")
        fail("evaluation.sequence_score", "must be 'median' or 'vote_fraction'");
}

std::filesystem::path ExperimentConfig::resolved_out_dir() const {
    std::filesystem::path p(out_dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv("THERMADET_OUT_ROOT")) return std::filesystem::path(root) / p;
    }
    return p;
}

void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("config: override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // plain string
    }

    json* node = &tree;
    size_t begin = 0;
    while (true) {
        const auto dot = path.find('.', begin);
        const std::string key = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
        if (key.empty()) throw std::invalid_argument("config: bad override path: " + path);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        begin = dot + 1;
    }
}

ExperimentConfig load_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    json tree = json::object();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::runtime_error("config: cannot open " + config_path);
        try {
            f >> tree;
        } catch (const json::exception& e) {
            throw std::invalid_argument("config: parse error in " + config_path + ": " + e.what());
        }
    }
    for (const auto& o : overrides) apply_override(tree, o);
    ExperimentConfig c = config_from_json(tree);
    c.validate();
    return c;
}

}  // namespace thermadet::cfg
