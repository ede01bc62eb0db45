#pragma once

#include "thermadet/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace thermadet::eval {

struct ConfusionCounts {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
};

struct Metrics {
    double sensitivity = 0.0;  // TP / (TP + FN)
    double precision = 0.0;    // TP / (TP + FP)
    double f_measure = 0.0;    // harmonic mean; 0 when a denominator is 0
    ConfusionCounts counts;
};

// Aligned predictions and ground truth (true = anomalous).
Metrics classification_metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth);

// Id-keyed variant; throws on id mismatch.
Metrics classification_metrics(const std::map<std::string, bool>& verdicts,
                               const std::map<std::string, bool>& truth);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) to (1,1), threshold descending
    double auc = 0.0;
};

// Threshold sweep over the distinct scores (ties handled in one step),
// trapezoidal AUC. Throws if only one class is present.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& truth);

struct ScoreOverTime {
    std::vector<double> mean_normal, sd_normal;        // population SD
    std::vector<double> mean_anomalous, sd_anomalous;  // per time step
};

// Per-time-step mean and population SD for each class; all series must have
// equal length and both classes must be present.
ScoreOverTime score_over_time(const std::vector<std::vector<double>>& series, const std::vector<bool>& truth);

double median(std::vector<double> values);

// Voting F-measure maximized over a threshold sweep (midpoints between the
// distinct per-step scores, plus all-vote / no-vote sentinels). Returns the
// chosen epsilon; deterministic tie-break toward the smaller candidate.
double calibrate_epsilon(const std::vector<std::vector<double>>& series, const std::vector<bool>& truth);

// Same sweep for per-image decisions (score > epsilon directly).
double calibrate_epsilon_per_image(const std::vector<std::vector<double>>& series,
                                   const std::vector<bool>& truth);

// ---------------------------------------------------------------------------
// Report assembly

struct MetricsRow {
    std::string model;
    std::string row;  // "full", "no_voting", "no_contour", "recon_prob"
    Metrics metrics;
    double epsilon = 0.0;
};

struct RocEntry {
    std::string model;
    std::string scorer;  // "contour", "mean_residual", "recon_prob"
    RocCurve curve;
};

struct ScoreOverTimeEntry {
    std::string model;
    std::string scorer;
    ScoreOverTime bands;
};

struct Report {
    std::vector<MetricsRow> rows;
    std::vector<RocEntry> rocs;
    std::vector<ScoreOverTimeEntry> bands;
    std::string config_echo;  // resolved experiment config (JSON text)
    std::string version;
};

// Writes metrics.csv, auc.csv, roc_points.csv, score_over_time.csv and
// summary.json under out_dir. PNG plots are requested via emit_plots; no plot
// backend is built in, so they are skipped with a notice while the CSVs are
// always written.
void emit_report(const Report& report, const std::filesystem::path& out_dir, bool emit_plots);

// Round trip of the machine-readable summary (used by the report command).
std::string report_to_json(const Report& report);
Report report_from_json(const std::string& json_text);

}  // namespace thermadet::eval
