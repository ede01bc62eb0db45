#include "thermadet/config.hpp"
#include "thermadet/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"thermadet: thermogram-sequence anomaly detection pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Generate the synthetic raw thermogram dataset"},
        {"preprocess", "Background-subtract, normalize and split the raw dataset"},
        {"train", "Train the configured model variants on normal training windows"},
        {"score", "Score the test and calibration sequences with every trained model"},
        {"evaluate", "Calibrate thresholds, compute metrics/ROC and write the report"},
        {"report", "Regenerate report files from an existing summary.json"},
        {"all", "Run the full pipeline in dependency order"},
    };
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "Experiment config JSON (defaults used when omitted)");
        sub->add_option("--set", overrides, "Override a config value, e.g. --set trainer.max_epochs=5")
            ->take_all();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = thermadet::cfg::load_config(config_path, overrides);
        return thermadet::pipeline::run_command(app.get_subcommands().front()->get_name(), cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
