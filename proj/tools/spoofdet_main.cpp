#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spoofdet/errors.hpp"
#include "spoofdet/pipeline.hpp"

namespace {

// exit codes: 0 success, 1 usage, 2 data/validation, 3 internal
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

spoofdet::RunConfig resolve_config(const GlobalOpts& opts) {
    spoofdet::RunConfig cfg = opts.config_path.empty()
                                  ? spoofdet::default_run_config()
                                  : spoofdet::load_run_config(opts.config_path);
    if (opts.seed.has_value()) cfg.seed = *opts.seed;
    if (opts.out_dir.has_value()) cfg.out_dir = *opts.out_dir;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turn-by-turn GNSS spoofing detection pipeline"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the run seed");
    std::string out_value;
    auto* out_opt = app.add_option("--out", out_value, "override the output directory");

    auto* synth = app.add_subcommand("synth", "generate a clean synthetic trace");
    double duration = 0.0;
    auto* duration_opt =
        synth->add_option("--duration", duration, "trace duration in seconds")
            ->check(CLI::PositiveNumber);

    auto* inject = app.add_subcommand("inject", "inject the ten attack scenarios");

    auto* train_predictor =
        app.add_subcommand("train-predictor", "train the distance predictor on the clean trace");

    auto* train_agent = app.add_subcommand("train-agent", "train the threshold agent");
    int train_scenario = 0;
    auto* scenario_opt =
        train_agent->add_option("--train-scenario", train_scenario, "scenario to train on")
            ->check(CLI::Range(1, spoofdet::kScenarioCount));

    auto* detect = app.add_subcommand("detect", "run detection on one trace");
    std::string detect_trace;
    detect->add_option("--trace", detect_trace, "trace CSV to scan")->required();
    double detect_threshold = 0.0;
    auto* detect_threshold_opt =
        detect->add_option("--threshold", detect_threshold, "threshold override in meters")
            ->check(CLI::NonNegativeNumber);
    std::string detect_output;
    auto* detect_output_opt = detect->add_option("--output", detect_output, "detection CSV path");

    auto* evaluate = app.add_subcommand("evaluate", "score every held-out scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (seed_opt->count() > 0) opts.seed = seed_value;
        if (out_opt->count() > 0) opts.out_dir = out_value;
        spoofdet::RunConfig cfg = resolve_config(opts);

        if (synth->parsed()) {
            if (duration_opt->count() > 0) cfg.synth.duration_s = duration;
            spoofdet::run_synth(cfg);
            std::cout << "wrote " << cfg.clean_trace_path().string() << "\n";
        } else if (inject->parsed()) {
            spoofdet::run_inject(cfg);
            std::cout << "wrote " << spoofdet::kScenarioCount << " scenarios under "
                      << cfg.scenario_dir().string() << "\n";
        } else if (train_predictor->parsed()) {
            const auto summary = spoofdet::run_train_predictor(cfg);
            std::cout << "wrote " << cfg.predictor_model_path().string()
                      << " (rmse_m=" << summary.report.rmse_m
                      << ", max_abs_error_m=" << summary.report.max_abs_error_m << ")\n";
        } else if (train_agent->parsed()) {
            if (scenario_opt->count() > 0) cfg.train_scenario = train_scenario;
            const auto summary = spoofdet::run_train_agent(cfg);
            std::cout << "wrote " << cfg.agent_path().string()
                      << " (threshold_m=" << summary.threshold_m
                      << ", episodes=" << summary.episodes << ")\n";
        } else if (detect->parsed()) {
            std::optional<double> threshold;
            if (detect_threshold_opt->count() > 0) threshold = detect_threshold;
            std::optional<std::filesystem::path> output;
            if (detect_output_opt->count() > 0) output = detect_output;
            const auto summary = spoofdet::run_detect(cfg, detect_trace, threshold, output);
            std::cout << "wrote " << summary.output_path.string() << " (" << summary.flag_count
                      << "/" << summary.step_count << " steps flagged)\n";
        } else if (evaluate->parsed()) {
            const auto summary = spoofdet::run_evaluate(cfg);
            std::cout << "wrote " << cfg.report_path().string() << "\n";
            for (const auto& s : summary.scores) {
                std::cout << "scenario " << s.scenario << ": recall "
                          << spoofdet::format_pct(s.metrics.recall) << "%, precision "
                          << spoofdet::format_pct(s.metrics.precision) << "%, accuracy "
                          << spoofdet::format_pct(s.metrics.accuracy) << "%, f1 "
                          << spoofdet::format_pct(s.metrics.f1) << "%\n";
            }
        }
    } catch (const spoofdet::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const spoofdet::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
