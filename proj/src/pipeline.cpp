#include "thermadet/pipeline.hpp"

#include "thermadet/checkpoint.hpp"
#include "thermadet/dataset.hpp"
#include "thermadet/detector.hpp"
#include "thermadet/evaluation.hpp"
#include "thermadet/simulator.hpp"
#include "thermadet/tiff.hpp"
#include "thermadet/trainer.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace thermadet::pipeline {

namespace fs = std::filesystem;
using Scalar = float;  // pipeline scalar; the test suites exercise double

namespace {

struct Paths {
    fs::path root, raw, proc, models, scores, calib, report;
    explicit Paths(const cfg::ExperimentConfig& c) : root(c.resolved_out_dir()) {
        raw = root / "raw";
        proc = root / "proc";
        models = root / "models";
        scores = root / "scores";
        calib = root / "calib";
        report = root / "report";
    }
    fs::path manifest() const { return raw / "manifest.jsonl"; }
    fs::path split() const { return root / "split.json"; }
};

void append_log(const Paths& p, const std::string& message) {
    std::error_code ec;
    fs::create_directories(p.root, ec);
    std::ofstream f(p.root / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    f << std::put_time(&tm_utc, "%Y-%m-%dT%H:%M:%SZ") << " " << message << "\n";
    std::cout << "[thermadet] " << message << "\n";
}

void write_resolved_config(const cfg::ExperimentConfig& c, const Paths& p) {
    std::error_code ec;
    fs::create_directories(p.root, ec);
    nlohmann::json j;
    j["version"] = cfg::kVersion;
    j["config"] = c.to_json();
    std::ofstream f(p.root / "config.json", std::ios::trunc);
    f << j.dump(2) << "\n";
}

uint64_t split_seed_of(const cfg::ExperimentConfig& c) { return derive_seed(c.seed, 0x73706c6974); }

sim::ThermalConstants constants_of(const cfg::ExperimentConfig& c) {
    sim::ThermalConstants k;
    k.k1 = c.simulator.k1;
    k.k2 = c.simulator.k2;
    k.k3 = c.simulator.k3;
    k.tau = c.simulator.tau;
    k.ambient = c.simulator.ambient;
    k.noise_sd = c.simulator.noise_sd;
    return k;
}

model::ModelConfig model_config_of(const cfg::ExperimentConfig& c, model::Variant v) {
    model::ModelConfig mc;
    mc.height = c.simulator.height;
    mc.width = c.simulator.width;
    mc.conv_channels = c.model.conv_channels;
    mc.kernel = c.model.kernel;
    mc.stride = c.model.stride;
    mc.hidden_dim = c.model.hidden_dim;
    mc.latent_dim = c.model.latent_dim;
    mc.variant = v;
    switch (v) {
        case model::Variant::CVAE: mc.beta = c.model.beta_cvae; break;
        case model::Variant::BetaCVAE: mc.beta = c.model.beta_betacvae; break;
        default: mc.beta = 1.0; break;
    }
    return mc;
}

RawSequence load_raw(const Paths& p, const ManifestRecord& rec, int n_frames) {
    RawSequence raw;
    raw.id = rec.id;
    raw.config = rec.config;
    raw.fault = rec.fault;
    raw.seed = rec.seed;
    raw.frames.reserve(n_frames);
    for (int t = 0; t < n_frames; ++t) {
        std::ostringstream name;
        name << "frame_" << std::setw(4) << std::setfill('0') << t << ".tiff";
        raw.frames.push_back(io::read_tiff16(p.root / rec.path / name.str()));
    }
    return raw;
}

// Per-sequence condition encodings plus materialized training windows.
struct SequenceBundle {
    ProcessedSequence seq;
    nn::Mat<Scalar> cond_map;
    nn::Vec<Scalar> cond_vec;
    nn::Mat<Scalar> frames;  // (T_proc, pixels), row-major pixel order
};

SequenceBundle bundle_of(ProcessedSequence seq) {
    SequenceBundle b;
    const int h = static_cast<int>(seq.frames[0].rows());
    const int w = static_cast<int>(seq.frames[0].cols());
    b.cond_map = data::condition_input_map<Scalar>(seq.config, h, w);
    b.cond_vec = data::condition_vector<Scalar>(seq.config).cast<Scalar>();
    b.frames.resize(static_cast<Eigen::Index>(seq.frames.size()), h * w);
    for (size_t t = 0; t < seq.frames.size(); ++t)
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) b.frames(static_cast<Eigen::Index>(t), r * w + c) = seq.frames[t](r, c);
    b.seq = std::move(seq);
    return b;
}

std::vector<train::TrainWindow<Scalar>> windows_of(const std::vector<SequenceBundle>& bundles,
                                                   const cfg::ExperimentConfig& c) {
    std::vector<train::TrainWindow<Scalar>> windows;
    const data::WindowSpec ws{c.dataset.window_length, c.dataset.window_offset};
    for (const auto& b : bundles) {
        const auto starts = data::window_starts(static_cast<int>(b.seq.frames.size()), ws);
        for (int s : starts) {
            train::TrainWindow<Scalar> w;
            w.frames = b.frames.middleRows(s, c.dataset.window_length);
            w.cond_map = &b.cond_map;
            w.cond_vec = &b.cond_vec;
            w.parent_id = b.seq.id;
            w.start = s;
            windows.push_back(std::move(w));
        }
    }
    return windows;
}

std::vector<model::Variant> variants_of(const cfg::ExperimentConfig& c) {
    std::vector<model::Variant> vs;
    for (const auto& name : c.model.variants) vs.push_back(model::variant_from_name(name));
    return vs;
}

// ---------------------------------------------------------------------------
// Scoring

struct SequenceScores {
    std::string id;
    bool anomalous = false;
    std::vector<double> contour;
    std::vector<double> mean_residual;
    std::vector<double> recon_prob;  // negated log-likelihood; PCVAE only
};

// Scores one sequence with one model: per-step contour / mean-residual scores
// from the posterior-mean reconstruction, averaged over covering windows.
SequenceScores score_sequence(const model::SeqVae<Scalar>& m, const SequenceBundle& b,
                              const cfg::ExperimentConfig& c, uint64_t rp_seed) {
    const data::WindowSpec ws{c.dataset.window_length, c.dataset.window_offset};
    const int t_proc = static_cast<int>(b.seq.frames.size());
    const auto starts = data::window_starts(t_proc, ws);
    const int h = c.simulator.height, w = c.simulator.width;
    const int k_eff = det::scaled_k(c.detector.k_native, h * w, c.detector.k_reference_pixels);
    const bool with_rp = m.config().has_observation_variance();

    std::vector<double> contour_sum(t_proc, 0.0), meanres_sum(t_proc, 0.0), rp_sum(t_proc, 0.0);
    std::vector<int> gain(t_proc, 0);

    typename model::SeqVae<Scalar>::Forward fw;
    Rng rp_rng(rp_seed);
    for (int s : starts) {
        const nn::Mat<Scalar> frames = b.frames.middleRows(s, ws.length);
        m.forward(frames, b.cond_map, b.cond_vec, nullptr, fw);
        for (int t = 0; t < ws.length; ++t) {
            Image<Scalar> x(h, w), xhat(h, w);
            for (int r = 0; r < h; ++r)
                for (int col = 0; col < w; ++col) {
                    x(r, col) = frames(t, r * w + col);
                    xhat(r, col) = fw.recon_mean(t, r * w + col);
                }
            const auto residual = det::compute_residual<Scalar>(x, xhat, c.detector.residual_floor);
            contour_sum[s + t] += det::frame_score(residual, k_eff);
            meanres_sum[s + t] += det::mean_residual_score(residual);
            ++gain[s + t];
        }
        if (with_rp) {
            const auto rp =
                m.reconstruction_probability(frames, b.cond_map, b.cond_vec, c.detector.recon_prob_samples,
                                             rp_rng, fw);
            for (int t = 0; t < ws.length; ++t) rp_sum[s + t] += -static_cast<double>(rp(t));
        }
    }

    SequenceScores out;
    out.id = b.seq.id;
    out.anomalous = b.seq.label == Label::Anomalous;
    for (int t = 0; t < t_proc; ++t) {
        if (gain[t] == 0) continue;  // steps not covered by any window are dropped
        out.contour.push_back(contour_sum[t] / gain[t]);
        out.mean_residual.push_back(meanres_sum[t] / gain[t]);
        if (with_rp) out.recon_prob.push_back(rp_sum[t] / gain[t]);
    }
    return out;
}

void write_score_cache(const fs::path& path, const std::vector<SequenceScores>& scores,
                       const std::vector<double> SequenceScores::* series) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("score: cannot write " + path.string());
    f << "sequence_id,label,time_step,score\n";
    f.precision(10);
    for (const auto& s : scores) {
        const auto& values = s.*series;
        for (size_t t = 0; t < values.size(); ++t)
            f << s.id << ',' << (s.anomalous ? "anomalous" : "normal") << ',' << t << ',' << values[t] << "\n";
    }
}

struct ScoreTable {
    std::vector<std::string> ids;
    std::vector<bool> truth;
    std::vector<std::vector<double>> series;
};

ScoreTable read_score_cache(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("evaluate: cannot open score cache " + path.string() +
                                     " (run the score stage first)");
    ScoreTable table;
    std::string line;
    std::getline(f, line);  // header
    std::map<std::string, size_t> index;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string id, label, t_str, v_str;
        std::getline(iss, id, ',');
        std::getline(iss, label, ',');
        std::getline(iss, t_str, ',');
        std::getline(iss, v_str, ',');
        auto it = index.find(id);
        if (it == index.end()) {
            index[id] = table.ids.size();
            table.ids.push_back(id);
            table.truth.push_back(label == "anomalous");
            table.series.emplace_back();
            it = index.find(id);
        }
        table.series[it->second].push_back(std::stod(v_str));
    }
    return table;
}

std::vector<bool> voted_verdicts(const std::vector<std::vector<double>>& series, double eps,
                                 bool window_level, int window_length, int window_offset) {
    std::vector<bool> verdicts;
    for (const auto& s : series) {
        if (!window_level) {
            verdicts.push_back(det::sequence_verdict(s, eps).anomaly);
            continue;
        }
        // optional window-level mode: each window votes with its own majority
        const auto starts = data::window_starts(static_cast<int>(s.size()), {window_length, window_offset});
        int window_votes = 0;
        for (int start : starts) {
            const std::vector<double> chunk(s.begin() + start, s.begin() + start + window_length);
            window_votes += det::sequence_verdict(chunk, eps).anomaly ? 1 : 0;
        }
        verdicts.push_back(window_votes * 2 > static_cast<int>(starts.size()));
    }
    return verdicts;
}

double sequence_scalar_score(const std::vector<double>& series, const std::string& mode, double eps) {
    if (mode == "vote_fraction") {
        int votes = 0;
        for (double v : series) votes += (v > eps);
        return static_cast<double>(votes) / static_cast<double>(series.size());
    }
    return eval::median(series);
}

void write_final_dump(const fs::path& path, const ScoreTable& table, double eps, const std::string& scorer,
                      const std::vector<bool>& verdicts) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("evaluate: cannot write " + path.string());
    f << "sequence_id,time_step,score,vote,verdict,epsilon,scorer\n";
    f.precision(10);
    for (size_t i = 0; i < table.ids.size(); ++i) {
        const auto v = det::sequence_verdict(table.series[i], eps);
        for (size_t t = 0; t < table.series[i].size(); ++t)
            f << table.ids[i] << ',' << t << ',' << table.series[i][t] << ',' << v.votes << ','
              << (verdicts[i] ? "Anomaly" : "NotAnomaly") << ',' << eps << ',' << scorer << "\n";
    }
}

}  // namespace

void run_simulate(const cfg::ExperimentConfig& c) {
    const Paths p(c);
    write_resolved_config(c, p);
    append_log(p, "simulate: generating " + std::to_string(c.simulator.n_normal) + " normal + " +
                      std::to_string(c.simulator.n_anomalous) + " anomalous sequences");
    sim::DatasetSpec spec;
    spec.n_normal = c.simulator.n_normal;
    spec.n_anomalous = c.simulator.n_anomalous;
    spec.height = c.simulator.height;
    spec.width = c.simulator.width;
    spec.n_frames = c.simulator.frames;
    spec.kernel_width = c.simulator.kernel_width;
    spec.constants = constants_of(c);
    spec.gain_set = c.simulator.gain_set;
    spec.phase_set = c.simulator.phase_set;
    spec.fault_db_min = c.simulator.fault_db_min;
    spec.fault_db_max = c.simulator.fault_db_max;
    spec.seed = c.seed;
    spec.split_seed = split_seed_of(c);
    spec.train_ratio = c.dataset.train_ratio;
    spec.val_ratio = c.dataset.val_ratio;
    spec.test_ratio = c.dataset.test_ratio;
    const auto manifest = sim::generate_dataset(spec, p.root);
    append_log(p, "simulate: wrote " + std::to_string(manifest.size()) + " sequences");
}

void run_preprocess(const cfg::ExperimentConfig& c) {
    const Paths p(c);
    write_resolved_config(c, p);
    const auto manifest = io::read_manifest(p.manifest());
    std::error_code ec;
    fs::create_directories(p.proc, ec);
    for (const auto& rec : manifest) {
        const auto raw = load_raw(p, rec, c.simulator.frames);
        data::store_processed(p.proc / (rec.id + ".bin"), data::preprocess(raw));
    }
    const auto split = data::split(manifest, split_seed_of(c), c.dataset.train_ratio, c.dataset.val_ratio,
                                   c.dataset.test_ratio);
    data::write_split(p.split(), split);
    append_log(p, "preprocess: " + std::to_string(manifest.size()) + " sequences processed");
}

void run_train(const cfg::ExperimentConfig& c) {
    const Paths p(c);
    write_resolved_config(c, p);
    const auto manifest = io::read_manifest(p.manifest());
    const auto split = data::read_split(p.split());

    std::vector<SequenceBundle> train_bundles, val_bundles;
    for (const auto& rec : manifest) {
        const auto s = split.at(rec.id);
        if (s == data::Split::Test) continue;
        auto bundle = bundle_of(data::load_processed(p.proc / (rec.id + ".bin")));
        (s == data::Split::Train ? train_bundles : val_bundles).push_back(std::move(bundle));
    }
    const auto train_windows = windows_of(train_bundles, c);
    const auto val_windows = windows_of(val_bundles, c);
    append_log(p, "train: " + std::to_string(train_windows.size()) + " train / " +
                      std::to_string(val_windows.size()) + " val windows");

    std::error_code ec;
    fs::create_directories(p.models, ec);

    train::TrainConfig tc;
    tc.learning_rate = c.trainer.learning_rate;
    tc.batch_size = c.trainer.batch_size;
    tc.max_epochs = c.trainer.max_epochs;
    tc.patience = c.trainer.patience;
    tc.grad_clip = c.trainer.grad_clip;
    tc.threads = c.trainer.threads;

    for (const auto v : variants_of(c)) {
        const std::string name = model::variant_name(v);
        model::SeqVae<Scalar> m(model_config_of(c, v));
        m.init_params(derive_seed(c.seed, 0x696e6974, static_cast<uint64_t>(v)));
        tc.seed = derive_seed(c.seed, 0x747261696e, static_cast<uint64_t>(v));

        const auto t0 = std::chrono::steady_clock::now();
        const auto log = train::train(m, train_windows, val_windows, tc, &split);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        model::save_checkpoint(p.models / (name + ".ckpt"), m);
        train::write_train_log(p.models / (name + "_trainlog.csv"), log, c.trainer.log_wall_time);
        std::ostringstream msg;
        msg << "train: " << name << " stopped after " << log.epochs.size() << " epochs (best "
            << log.best_epoch << ", val " << log.best_val_loss << ", " << std::fixed << std::setprecision(1)
            << secs << "s)";
        append_log(p, msg.str());
    }
}

void run_score(const cfg::ExperimentConfig& c) {
    const Paths p(c);
    write_resolved_config(c, p);
    const auto manifest = io::read_manifest(p.manifest());
    const auto split = data::read_split(p.split());

    // test sequences (normal test subset + generated anomalies)
    std::vector<SequenceBundle> test_bundles;
    std::vector<const ManifestRecord*> val_records;
    for (const auto& rec : manifest) {
        if (split.at(rec.id) == data::Split::Test)
            test_bundles.push_back(bundle_of(data::load_processed(p.proc / (rec.id + ".bin"))));
        else if (split.at(rec.id) == data::Split::Val && rec.label == Label::Normal)
            val_records.push_back(&rec);
    }

    // calibration set: val normals plus freshly simulated faults on the same
    // configurations (test data stays untouched by threshold selection)
    std::vector<SequenceBundle> calib_bundles;
    Manifest calib_manifest;
    Rng fault_rng(derive_seed(c.seed, 0x63616c6662));
    const auto constants = constants_of(c);
    for (size_t i = 0; i < val_records.size(); ++i) {
        const auto& rec = *val_records[i];
        calib_bundles.push_back(bundle_of(data::load_processed(p.proc / (rec.id + ".bin"))));

        ManifestRecord crec;
        crec.id = "calib_" + rec.id;
        crec.config = rec.config;
        crec.fault = sim::sample_fault(c.simulator.fault_db_min, c.simulator.fault_db_max, fault_rng);
        crec.label = Label::Anomalous;
        crec.seed = derive_seed(c.seed, 0x63616c6273, static_cast<uint64_t>(i));
        crec.path = "";
        auto raw = sim::render_sequence(crec.config, crec.fault, constants, c.simulator.height,
                                        c.simulator.width, c.simulator.frames, crec.seed,
                                        c.simulator.kernel_width);
        raw.id = crec.id;
        calib_bundles.push_back(bundle_of(data::preprocess(raw)));
        calib_manifest.push_back(std::move(crec));
    }
    std::error_code ec;
    fs::create_directories(p.calib, ec);
    io::write_manifest(p.calib / "manifest.jsonl", calib_manifest);
    fs::create_directories(p.scores, ec);

    for (const auto v : variants_of(c)) {
        const std::string name = model::variant_name(v);
        const auto m = model::load_checkpoint<Scalar>(p.models / (name + ".ckpt"), v);

        auto score_all = [&](const std::vector<SequenceBundle>& bundles, const std::string& split_name) {
            std::vector<SequenceScores> scores(bundles.size());
            const int threads = c.trainer.threads;
            train::for_each_chunk(static_cast<int>(bundles.size()), 2, threads, [&](int, int begin, int end) {
                for (int i = begin; i < end; ++i)
                    scores[i] = score_sequence(m, bundles[i], c,
                                               derive_seed(c.seed, 0x7270, mix_seed(std::hash<std::string>{}(
                                                                               bundles[i].seq.id))));
            });
            write_score_cache(p.scores / (name + "_contour_" + split_name + ".csv"), scores,
                              &SequenceScores::contour);
            write_score_cache(p.scores / (name + "_mean_residual_" + split_name + ".csv"), scores,
                              &SequenceScores::mean_residual);
            if (m.config().has_observation_variance())
                write_score_cache(p.scores / (name + "_recon_prob_" + split_name + ".csv"), scores,
                                  &SequenceScores::recon_prob);
        };
        score_all(test_bundles, "test");
        score_all(calib_bundles, "calib");
        append_log(p, "score: " + name + " scored " + std::to_string(test_bundles.size()) + " test + " +
                          std::to_string(calib_bundles.size()) + " calib sequences");
    }
}

void run_evaluate(const cfg::ExperimentConfig& c) {
    const Paths p(c);
    write_resolved_config(c, p);
    std::error_code ec;
    fs::create_directories(p.report, ec);

    eval::Report report;
    report.version = cfg::kVersion;
    report.config_echo = c.to_json().dump(2);

    for (const auto v : variants_of(c)) {
        const std::string name = model::variant_name(v);

        const auto contour_test = read_score_cache(p.scores / (name + "_contour_test.csv"));
        const auto contour_calib = read_score_cache(p.scores / (name + "_contour_calib.csv"));
        const auto meanres_test = read_score_cache(p.scores / (name + "_mean_residual_test.csv"));
        const auto meanres_calib = read_score_cache(p.scores / (name + "_mean_residual_calib.csv"));

        const double eps_contour = c.detector.epsilon
                                       ? *c.detector.epsilon
                                       : eval::calibrate_epsilon(contour_calib.series, contour_calib.truth);
        const double eps_meanres =
            eval::calibrate_epsilon(meanres_calib.series, meanres_calib.truth);

        // Row I: full pipeline (voting per sequence)
        const auto verdicts_full =
            voted_verdicts(contour_test.series, eps_contour, c.detector.window_level_voting,
                           c.dataset.window_length, c.dataset.window_offset);
        report.rows.push_back(
            {name, "full", eval::classification_metrics(verdicts_full, contour_test.truth), eps_contour});

        // Row II: no voting, one decision per image
        std::vector<bool> image_pred, image_truth;
        for (size_t i = 0; i < contour_test.series.size(); ++i)
            for (double s : contour_test.series[i]) {
                image_pred.push_back(s > eps_contour);
                image_truth.push_back(contour_test.truth[i]);
            }
        report.rows.push_back(
            {name, "no_voting", eval::classification_metrics(image_pred, image_truth), eps_contour});

        // Row III: contour score replaced by the residual mean
        const auto verdicts_meanres =
            voted_verdicts(meanres_test.series, eps_meanres, c.detector.window_level_voting,
                           c.dataset.window_length, c.dataset.window_offset);
        report.rows.push_back(
            {name, "no_contour", eval::classification_metrics(verdicts_meanres, meanres_test.truth),
             eps_meanres});

        // ROC over per-sequence scalar scores
        auto roc_of = [&](const ScoreTable& table, double eps) {
            std::vector<double> scalar;
            for (const auto& s : table.series)
                scalar.push_back(sequence_scalar_score(s, c.evaluation.sequence_score, eps));
            return eval::roc_auc(scalar, table.truth);
        };
        report.rocs.push_back({name, "contour", roc_of(contour_test, eps_contour)});
        report.rocs.push_back({name, "mean_residual", roc_of(meanres_test, eps_meanres)});
        report.bands.push_back(
            {name, "contour", eval::score_over_time(contour_test.series, contour_test.truth)});

        write_final_dump(p.report / ("scores_" + name + "_contour.csv"), contour_test, eps_contour, "contour",
                         verdicts_full);
        write_final_dump(p.report / ("scores_" + name + "_mean_residual.csv"), meanres_test, eps_meanres,
                         "mean_residual", verdicts_meanres);

        if (v == model::Variant::PCVAE) {
            const auto rp_test = read_score_cache(p.scores / (name + "_recon_prob_test.csv"));
            const auto rp_calib = read_score_cache(p.scores / (name + "_recon_prob_calib.csv"));
            const double eps_rp = eval::calibrate_epsilon(rp_calib.series, rp_calib.truth);
            const auto verdicts_rp =
                voted_verdicts(rp_test.series, eps_rp, c.detector.window_level_voting,
                               c.dataset.window_length, c.dataset.window_offset);
            report.rows.push_back(
                {name, "recon_prob", eval::classification_metrics(verdicts_rp, rp_test.truth), eps_rp});
            report.rocs.push_back({name, "recon_prob", roc_of(rp_test, eps_rp)});
            write_final_dump(p.report / ("scores_" + name + "_recon_prob.csv"), rp_test, eps_rp, "recon_prob",
                             verdicts_rp);
        }
    }

    eval::emit_report(report, p.report, c.evaluation.emit_plots);
    append_log(p, "evaluate: report written with " + std::to_string(report.rows.size()) + " metric rows");
}

void run_report(const cfg::ExperimentConfig& c) {
    const Paths p(c);
    std::ifstream f(p.report / "summary.json");
    if (!f)
        throw std::runtime_error("report: no summary.json under " + p.report.string() +
                                 " (run the evaluate stage first)");
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    eval::emit_report(eval::report_from_json(text), p.report, c.evaluation.emit_plots);
    append_log(p, "report: regenerated report files from summary.json");
}

int run_command(const std::string& name, const cfg::ExperimentConfig& c) {
    if (name == "simulate")
        run_simulate(c);
    else if (name == "preprocess")
        run_preprocess(c);
    else if (name == "train")
        run_train(c);
    else if (name == "score")
        run_score(c);
    else if (name == "evaluate")
        run_evaluate(c);
    else if (name == "report")
        run_report(c);
    else if (name == "all") {
        run_simulate(c);
        run_preprocess(c);
        run_train(c);
        run_score(c);
        run_evaluate(c);
    } else {
        throw std::invalid_argument("unknown command: " + name);
    }
    return 0;
}

}  // namespace thermadet::pipeline
