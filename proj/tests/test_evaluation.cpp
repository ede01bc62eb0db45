#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "thermadet/evaluation.hpp"
#include "thermadet/rng.hpp"

#include <filesystem>
#include <fstream>

using namespace thermadet;
namespace fs = std::filesystem;

TEST_CASE("classification metrics reproduce the published row to three decimals") {
    // counts engineered to give Sn = 0.911..., Pr = 0.925...
    std::vector<bool> predicted, truth;
    // 123 anomalous: 112 detected (TP), 11 missed (FN) -> Sn = 0.9106
    for (int i = 0; i < 112; ++i) {
        predicted.push_back(true);
        truth.push_back(true);
    }
    for (int i = 0; i < 11; ++i) {
        predicted.push_back(false);
        truth.push_back(true);
    }
    // 9 false positives -> Pr = 112/121 = 0.9256
    for (int i = 0; i < 9; ++i) {
        predicted.push_back(true);
        truth.push_back(false);
    }
    for (int i = 0; i < 100; ++i) {
        predicted.push_back(false);
        truth.push_back(false);
    }
    const auto m = eval::classification_metrics(predicted, truth);
    CHECK(m.sensitivity == doctest::Approx(0.911).epsilon(1e-3));
    CHECK(m.precision == doctest::Approx(0.925).epsilon(1e-3));
    CHECK(m.f_measure == doctest::Approx(0.918).epsilon(1e-3));

    // and the pure harmonic-mean arithmetic from the published numbers
    const double sn = 0.911, pr = 0.925;
    const double fm = 2.0 * pr * sn / (pr + sn);
    CHECK(fm == doctest::Approx(0.918).epsilon(5e-4));
}

TEST_CASE("classification metrics conventions") {
    const auto perfect = eval::classification_metrics(std::vector<bool>{true, false, true},
                                                      std::vector<bool>{true, false, true});
    CHECK(perfect.sensitivity == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.f_measure == 1.0);

    // no predicted positives: precision 0, F-M 0 by convention
    const auto none = eval::classification_metrics(std::vector<bool>{false, false, false},
                                                   std::vector<bool>{true, false, true});
    CHECK(none.precision == 0.0);
    CHECK(none.f_measure == 0.0);
    CHECK(none.counts.total() == 3);
}

TEST_CASE("classification metrics by id require matching id sets") {
    std::map<std::string, bool> verdicts{{"a", true}, {"b", false}};
    std::map<std::string, bool> truth{{"a", true}, {"b", true}};
    const auto m = eval::classification_metrics(verdicts, truth);
    CHECK(m.counts.tp == 1);
    CHECK(m.counts.fn == 1);

    std::map<std::string, bool> wrong{{"a", true}, {"c", true}};
    CHECK_THROWS_AS(eval::classification_metrics(verdicts, wrong), std::invalid_argument);
}

TEST_CASE("F-measure bounds: symmetric and below both 2Sn and 2Pr") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<bool> predicted, truth;
        for (int i = 0; i < 40; ++i) {
            predicted.push_back(rng.uniform() < 0.5);
            truth.push_back(rng.uniform() < 0.5);
        }
        const auto m = eval::classification_metrics(predicted, truth);
        CHECK(m.f_measure <= 2.0 * m.sensitivity + 1e-12);
        CHECK(m.f_measure <= 2.0 * m.precision + 1e-12);
        CHECK(m.f_measure <= std::max(m.sensitivity, m.precision) + 1e-12);
    }
}

TEST_CASE("roc_auc: separated, tied and mixed score sets") {
    CHECK(eval::roc_auc({0.9, 0.8, 0.1, 0.2}, {true, true, false, false}).auc == doctest::Approx(1.0));

    // identical score distributions, labels independent: AUC 0.5 via ties
    CHECK(eval::roc_auc({0.3, 0.3, 0.3, 0.3}, {true, false, true, false}).auc == doctest::Approx(0.5));

    // spec example: normals {0.1, 0.4}, anomalous {0.3, 0.9} -> 0.75
    const auto curve = eval::roc_auc({0.1, 0.4, 0.3, 0.9}, {false, false, true, true});
    CHECK(curve.auc == doctest::Approx(0.75));
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == 1.0);
    CHECK(curve.points.back().tpr == 1.0);

    CHECK_THROWS_AS(eval::roc_auc({0.1, 0.2}, {true, true}), std::invalid_argument);
}

TEST_CASE("roc_auc equals the exhaustive pairwise statistic") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_index(196));
        std::vector<double> scores;
        std::vector<bool> truth;
        std::vector<int> labels_int;
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < n; ++i) {
            // quantized scores force plenty of ties
            scores.push_back(std::round(rng.uniform() * 20.0) / 20.0);
            const bool anom = rng.uniform() < 0.4;
            truth.push_back(anom);
            labels_int.push_back(anom ? 1 : 0);
            has_pos |= anom;
            has_neg |= !anom;
        }
        if (!has_pos || !has_neg) continue;
        const double auc = eval::roc_auc(scores, truth).auc;
        const double oracle = oracles::pairwise_auc(scores, labels_int);
        CHECK(std::abs(auc - oracle) < 1e-9);
    }
}

TEST_CASE("roc curve FPR/TPR are non-decreasing along the sweep") {
    Rng rng(123);
    std::vector<double> scores;
    std::vector<bool> truth;
    for (int i = 0; i < 60; ++i) {
        scores.push_back(rng.uniform());
        truth.push_back(rng.uniform() < 0.5);
    }
    const auto curve = eval::roc_auc(scores, truth);
    for (size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
        CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
    }
}

TEST_CASE("score_over_time: single series has zero SD; two constants average") {
    const auto one = eval::score_over_time({{0.1, 0.2, 0.3}, {0.5, 0.5, 0.5}}, {false, true});
    for (double sd : one.sd_normal) CHECK(sd == 0.0);
    for (double sd : one.sd_anomalous) CHECK(sd == 0.0);

    const auto two = eval::score_over_time({{0.2, 0.2}, {0.4, 0.4}, {0.9, 0.9}}, {false, false, true});
    CHECK(two.mean_normal[0] == doctest::Approx(0.3));
    CHECK(two.sd_normal[0] == doctest::Approx(0.1));  // population SD
    CHECK(two.mean_anomalous[1] == doctest::Approx(0.9));

    CHECK_THROWS_AS(eval::score_over_time({{0.1}, {0.2, 0.3}}, {false, true}), std::invalid_argument);
    CHECK_THROWS_AS(eval::score_over_time({{0.1}, {0.2}}, {false, false}), std::invalid_argument);
}

TEST_CASE("median conventions") {
    CHECK(eval::median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(eval::median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(eval::median({}), std::invalid_argument);
}

TEST_CASE("epsilon calibration finds a separating threshold") {
    // normals vote low, anomalies vote high; any eps in (0.2, 0.8) is perfect
    std::vector<std::vector<double>> series;
    std::vector<bool> truth;
    for (int i = 0; i < 8; ++i) {
        series.push_back(std::vector<double>(9, 0.2));
        truth.push_back(false);
        series.push_back(std::vector<double>(9, 0.8));
        truth.push_back(true);
    }
    const double eps = eval::calibrate_epsilon(series, truth);
    CHECK(eps > 0.2);
    CHECK(eps < 0.8);

    std::vector<bool> verdicts;
    for (const auto& s : series) {
        int votes = 0;
        for (double v : s) votes += (v > eps);
        verdicts.push_back(votes * 2 > static_cast<int>(s.size()));
    }
    CHECK(eval::classification_metrics(verdicts, truth).f_measure == doctest::Approx(1.0));
}

TEST_CASE("voting ROC sweep: (FPR, TPR) move monotonically from (1,1) to (0,0) as eps rises") {
    Rng rng(77);
    std::vector<std::vector<double>> series;
    std::vector<bool> truth;
    for (int i = 0; i < 30; ++i) {
        std::vector<double> s;
        const bool anom = rng.uniform() < 0.5;
        for (int t = 0; t < 15; ++t) s.push_back(rng.uniform() * (anom ? 1.0 : 0.7));
        series.push_back(std::move(s));
        truth.push_back(anom);
    }
    double prev_fpr = 2.0, prev_tpr = 2.0;
    for (double eps = 0.0; eps <= 1.0001; eps += 0.05) {
        long tp = 0, fp = 0, fn = 0, tn = 0;
        for (size_t i = 0; i < series.size(); ++i) {
            int votes = 0;
            for (double v : series[i]) votes += (v > eps);
            const bool pred = votes * 2 > static_cast<int>(series[i].size());
            if (truth[i])
                pred ? ++tp : ++fn;
            else
                pred ? ++fp : ++tn;
        }
        const double fpr = fp + tn > 0 ? static_cast<double>(fp) / (fp + tn) : 0.0;
        const double tpr = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        CHECK(fpr <= prev_fpr + 1e-12);
        CHECK(tpr <= prev_tpr + 1e-12);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    CHECK(prev_fpr == 0.0);  // at eps = 1 nothing votes
    CHECK(prev_tpr == 0.0);
}

TEST_CASE("report emission is deterministic and the JSON mirrors the CSVs") {
    const auto dir = fs::temp_directory_path() / "thermadet_test_report";
    fs::remove_all(dir);

    eval::Report report;
    report.version = "test";
    report.config_echo = "{\"seed\": 1}";
    eval::MetricsRow row;
    row.model = "BetaCVAE";
    row.row = "full";
    row.metrics = eval::classification_metrics(std::vector<bool>{true, false}, std::vector<bool>{true, false});
    row.epsilon = 0.25;
    report.rows.push_back(row);
    report.rocs.push_back({"BetaCVAE", "contour", eval::roc_auc({0.9, 0.1}, {true, false})});
    report.bands.push_back(
        {"BetaCVAE", "contour", eval::score_over_time({{0.1, 0.2}, {0.8, 0.9}}, {false, true})});

    eval::emit_report(report, dir / "a", false);
    eval::emit_report(report, dir / "b", false);
    for (const char* f : {"metrics.csv", "auc.csv", "roc_points.csv", "score_over_time.csv", "summary.json"}) {
        std::ifstream fa(dir / "a" / f), fb(dir / "b" / f);
        REQUIRE(fa);
        const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }

    // JSON round trip preserves every number
    std::ifstream fj(dir / "a" / "summary.json");
    const std::string text((std::istreambuf_iterator<char>(fj)), std::istreambuf_iterator<char>());
    const auto back = eval::report_from_json(text);
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0].metrics.f_measure == report.rows[0].metrics.f_measure);
    CHECK(back.rows[0].epsilon == report.rows[0].epsilon);
    REQUIRE(back.rocs.size() == 1);
    CHECK(back.rocs[0].curve.auc == report.rocs[0].curve.auc);
}
