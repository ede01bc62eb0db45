#include "thermadet/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace thermadet::eval {

using nlohmann::json;

Metrics classification_metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("classification_metrics: prediction/label size mismatch");
    Metrics m;
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (truth[i])
            predicted[i] ? ++m.counts.tp : ++m.counts.fn;
        else
            predicted[i] ? ++m.counts.fp : ++m.counts.tn;
    }
    const auto& c = m.counts;
    m.sensitivity = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    m.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    m.f_measure = (m.sensitivity + m.precision) > 0.0
                      ? 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity)
                      : 0.0;
    return m;
}

Metrics classification_metrics(const std::map<std::string, bool>& verdicts,
                               const std::map<std::string, bool>& truth) {
    if (verdicts.size() != truth.size())
        throw std::invalid_argument("classification_metrics: verdict/label id sets differ in size");
    std::vector<bool> p, t;
    for (const auto& [id, v] : verdicts) {
        const auto it = truth.find(id);
        if (it == truth.end()) throw std::invalid_argument("classification_metrics: no label for id " + id);
        p.push_back(v);
        t.push_back(it->second);
    }
    return classification_metrics(p, t);
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& truth) {
    if (scores.size() != truth.size()) throw std::invalid_argument("roc_auc: score/label size mismatch");
    long positives = 0, negatives = 0;
    for (bool t : truth) t ? ++positives : ++negatives;
    if (positives == 0 || negatives == 0)
        throw std::invalid_argument("roc_auc: both classes must be present");

    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        const double value = scores[order[i]];
        while (i < order.size() && scores[order[i]] == value) {
            truth[order[i]] ? ++tp : ++fp;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / negatives;
        const double tpr = static_cast<double>(tp) / positives;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.points.push_back({value, fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

ScoreOverTime score_over_time(const std::vector<std::vector<double>>& series, const std::vector<bool>& truth) {
    if (series.size() != truth.size()) throw std::invalid_argument("score_over_time: size mismatch");
    if (series.empty()) throw std::invalid_argument("score_over_time: no series");
    const size_t len = series[0].size();
    for (const auto& s : series)
        if (s.size() != len) throw std::invalid_argument("score_over_time: series lengths differ");

    long n_normal = 0, n_anomalous = 0;
    for (bool t : truth) t ? ++n_anomalous : ++n_normal;
    if (n_normal == 0 || n_anomalous == 0)
        throw std::invalid_argument("score_over_time: both classes must be present");

    ScoreOverTime out;
    out.mean_normal.assign(len, 0.0);
    out.sd_normal.assign(len, 0.0);
    out.mean_anomalous.assign(len, 0.0);
    out.sd_anomalous.assign(len, 0.0);
    for (size_t t = 0; t < len; ++t) {
        double sum_n = 0.0, sum_a = 0.0;
        for (size_t i = 0; i < series.size(); ++i) (truth[i] ? sum_a : sum_n) += series[i][t];
        const double mean_n = sum_n / n_normal;
        const double mean_a = sum_a / n_anomalous;
        double var_n = 0.0, var_a = 0.0;
        for (size_t i = 0; i < series.size(); ++i) {
            const double d = series[i][t] - (truth[i] ? mean_a : mean_n);
            (truth[i] ? var_a : var_n) += d * d;
        }
        out.mean_normal[t] = mean_n;
        out.sd_normal[t] = std::sqrt(var_n / n_normal);  // population SD
        out.mean_anomalous[t] = mean_a;
        out.sd_anomalous[t] = std::sqrt(var_a / n_anomalous);
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty");
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::vector<double> epsilon_candidates(const std::vector<std::vector<double>>& series) {
    std::set<double> distinct;
    for (const auto& s : series) distinct.insert(s.begin(), s.end());
    std::vector<double> sorted(distinct.begin(), distinct.end());
    std::vector<double> candidates;
    candidates.push_back(sorted.front() - 1.0);  // everything votes
    for (size_t i = 0; i + 1 < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    candidates.push_back(sorted.back());  // nothing votes (strict >)
    return candidates;
}

double sweep_epsilon(const std::vector<std::vector<double>>& series, const std::vector<bool>& truth,
                     bool per_image) {
    if (series.size() != truth.size() || series.empty())
        throw std::invalid_argument("calibrate_epsilon: bad inputs");
    const auto candidates = epsilon_candidates(series);
    double best_eps = candidates.front();
    double best_fm = -1.0;
    for (double eps : candidates) {
        std::vector<bool> predicted, labels;
        for (size_t i = 0; i < series.size(); ++i) {
            if (per_image) {
                for (double v : series[i]) {
                    predicted.push_back(v > eps);
                    labels.push_back(truth[i]);
                }
            } else {
                int votes = 0;
                for (double v : series[i]) votes += (v > eps);
                predicted.push_back(votes * 2 > static_cast<int>(series[i].size()));
                labels.push_back(truth[i]);
            }
        }
        const double fm = classification_metrics(predicted, labels).f_measure;
        if (fm > best_fm) {
            best_fm = fm;
            best_eps = eps;
        }
    }
    return best_eps;
}

}  // namespace

double calibrate_epsilon(const std::vector<std::vector<double>>& series, const std::vector<bool>& truth) {
    return sweep_epsilon(series, truth, false);
}

double calibrate_epsilon_per_image(const std::vector<std::vector<double>>& series,
                                   const std::vector<bool>& truth) {
    return sweep_epsilon(series, truth, true);
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream oss;
    oss.precision(10);
    oss << v;
    return oss.str();
}

json metrics_to_json(const MetricsRow& r) {
    return json{{"model", r.model},
                {"row", r.row},
                {"sensitivity", r.metrics.sensitivity},
                {"precision", r.metrics.precision},
                {"f_measure", r.metrics.f_measure},
                {"tp", r.metrics.counts.tp},
                {"fp", r.metrics.counts.fp},
                {"tn", r.metrics.counts.tn},
                {"fn", r.metrics.counts.fn},
                {"epsilon", r.epsilon}};
}

MetricsRow metrics_from_json(const json& j) {
    MetricsRow r;
    r.model = j.at("model");
    r.row = j.at("row");
    r.metrics.sensitivity = j.at("sensitivity");
    r.metrics.precision = j.at("precision");
    r.metrics.f_measure = j.at("f_measure");
    r.metrics.counts.tp = j.at("tp");
    r.metrics.counts.fp = j.at("fp");
    r.metrics.counts.tn = j.at("tn");
    r.metrics.counts.fn = j.at("fn");
    r.epsilon = j.at("epsilon");
    return r;
}

}  // namespace

std::string report_to_json(const Report& report) {
    json j;
    j["version"] = report.version;
    j["config"] = report.config_echo.empty() ? json::object() : json::parse(report.config_echo);
    j["metrics"] = json::array();
    for (const auto& r : report.rows) j["metrics"].push_back(metrics_to_json(r));
    j["roc"] = json::array();
    for (const auto& e : report.rocs) {
        json points = json::array();
        for (const auto& p : e.curve.points) {
            const double thr = std::isinf(p.threshold) ? 1e300 : p.threshold;
            points.push_back(json::array({thr, p.fpr, p.tpr}));
        }
        j["roc"].push_back({{"model", e.model}, {"scorer", e.scorer}, {"auc", e.curve.auc}, {"points", points}});
    }
    j["score_over_time"] = json::array();
    for (const auto& e : report.bands)
        j["score_over_time"].push_back({{"model", e.model},
                                        {"scorer", e.scorer},
                                        {"mean_normal", e.bands.mean_normal},
                                        {"sd_normal", e.bands.sd_normal},
                                        {"mean_anomalous", e.bands.mean_anomalous},
                                        {"sd_anomalous", e.bands.sd_anomalous}});
    return j.dump(2);
}

Report report_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    Report report;
    report.version = j.at("version");
    report.config_echo = j.at("config").dump(2);
    for (const auto& m : j.at("metrics")) report.rows.push_back(metrics_from_json(m));
    for (const auto& e : j.at("roc")) {
        RocEntry entry;
        entry.model = e.at("model");
        entry.scorer = e.at("scorer");
        entry.curve.auc = e.at("auc");
        for (const auto& p : e.at("points"))
            entry.curve.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        report.rocs.push_back(std::move(entry));
    }
    for (const auto& e : j.at("score_over_time")) {
        ScoreOverTimeEntry entry;
        entry.model = e.at("model");
        entry.scorer = e.at("scorer");
        entry.bands.mean_normal = e.at("mean_normal").get<std::vector<double>>();
        entry.bands.sd_normal = e.at("sd_normal").get<std::vector<double>>();
        entry.bands.mean_anomalous = e.at("mean_anomalous").get<std::vector<double>>();
        entry.bands.sd_anomalous = e.at("sd_anomalous").get<std::vector<double>>();
        report.bands.push_back(std::move(entry));
    }
    return report;
}

void emit_report(const Report& report, const std::filesystem::path& out_dir, bool emit_plots) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("emit_report: cannot create " + out_dir.string());

    {
        std::ofstream f(out_dir / "metrics.csv", std::ios::trunc);
        if (!f) throw std::runtime_error("emit_report: cannot write metrics.csv");
        f << "model,row,sensitivity,precision,f_measure,tp,fp,tn,fn,epsilon\n";
        for (const auto& r : report.rows)
            f << r.model << ',' << r.row << ',' << fmt(r.metrics.sensitivity) << ',' << fmt(r.metrics.precision)
              << ',' << fmt(r.metrics.f_measure) << ',' << r.metrics.counts.tp << ',' << r.metrics.counts.fp
              << ',' << r.metrics.counts.tn << ',' << r.metrics.counts.fn << ',' << fmt(r.epsilon) << "\n";
    }
    {
        std::ofstream f(out_dir / "auc.csv", std::ios::trunc);
        if (!f) throw std::runtime_error("emit_report: cannot write auc.csv");
        f << "model,scorer,auc\n";
        for (const auto& e : report.rocs) f << e.model << ',' << e.scorer << ',' << fmt(e.curve.auc) << "\n";
    }
    {
        std::ofstream f(out_dir / "roc_points.csv", std::ios::trunc);
        if (!f) throw std::runtime_error("emit_report: cannot write roc_points.csv");
        f << "model,scorer,threshold,fpr,tpr\n";
        for (const auto& e : report.rocs)
            for (const auto& p : e.curve.points)
                f << e.model << ',' << e.scorer << ',' << fmt(p.threshold) << ',' << fmt(p.fpr) << ','
                  << fmt(p.tpr) << "\n";
    }
    {
        std::ofstream f(out_dir / "score_over_time.csv", std::ios::trunc);
        if (!f) throw std::runtime_error("emit_report: cannot write score_over_time.csv");
        f << "model,scorer,time_step,mean_normal,sd_normal,mean_anomalous,sd_anomalous\n";
        for (const auto& e : report.bands)
            for (size_t t = 0; t < e.bands.mean_normal.size(); ++t)
                f << e.model << ',' << e.scorer << ',' << t << ',' << fmt(e.bands.mean_normal[t]) << ','
                  << fmt(e.bands.sd_normal[t]) << ',' << fmt(e.bands.mean_anomalous[t]) << ','
                  << fmt(e.bands.sd_anomalous[t]) << "\n";
    }
    {
        std::ofstream f(out_dir / "summary.json", std::ios::trunc);
        if (!f) throw std::runtime_error("emit_report: cannot write summary.json");
        f << report_to_json(report) << "\n";
    }

    if (emit_plots)
        std::cout << "[report] plots skipped: no plot backend available; CSVs written to " << out_dir.string()
                  << "\n";
}

}  // namespace thermadet::eval
