#pragma once

#include "thermadet/config.hpp"

namespace thermadet::pipeline {

// Stage entry points; each reads its inputs from the configured output
// directory and writes its artifacts there. `run_command` dispatches on the
// stage name ("simulate", "preprocess", "train", "score", "evaluate",
// "report" or "all") and returns a process exit status.
void run_simulate(const cfg::ExperimentConfig& cfg);
void run_preprocess(const cfg::ExperimentConfig& cfg);
void run_train(const cfg::ExperimentConfig& cfg);
void run_score(const cfg::ExperimentConfig& cfg);
void run_evaluate(const cfg::ExperimentConfig& cfg);
void run_report(const cfg::ExperimentConfig& cfg);

int run_command(const std::string& name, const cfg::ExperimentConfig& cfg);

}  // namespace thermadet::pipeline
