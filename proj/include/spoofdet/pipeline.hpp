#ifndef SPOOFDET_PIPELINE_HPP
#define SPOOFDET_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spoofdet/attack.hpp"
#include "spoofdet/eval.hpp"
#include "spoofdet/mlp.hpp"
#include "spoofdet/predictor.hpp"
#include "spoofdet/rl.hpp"
#include "spoofdet/synth.hpp"

namespace spoofdet {

struct EvalConfig {
    double grid_min_m = 1e-3;
    double grid_max_m = 200.0;
    int grid_points = 120; // log-spaced
    std::size_t merge_window = 0; // 0 = score raw flags
};

// One reproducible experiment bundle. The single top-level seed derives
// every stage seed, so a config file plus a seed pins the whole run.
struct RunConfig {
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "out";
    SynthConfig synth;
    std::size_t attack_min_onset_gap = 100;
    TrainConfig predictor_train;
    double train_fraction = 0.7;
    QLearningConfig agent;
    // absent = derive from data: max clean step distance + 2x the
    // predictor's max validation error
    std::optional<double> agent_threshold_initial_m;
    int train_scenario = 2;
    EvalConfig eval;

    std::filesystem::path clean_trace_path() const { return out_dir / "clean.csv"; }
    std::filesystem::path scenario_dir() const { return out_dir / "scenarios"; }
    std::filesystem::path manifest_path() const { return scenario_dir() / "manifest.json"; }
    std::filesystem::path predictor_model_path() const { return out_dir / "predictor.json"; }
    std::filesystem::path predictor_report_path() const { return out_dir / "predictor_report.json"; }
    std::filesystem::path agent_path() const { return out_dir / "agent.json"; }
    std::filesystem::path report_path() const { return out_dir / "reports" / "report.csv"; }
    std::filesystem::path pr_curve_path() const { return out_dir / "reports" / "pr_curve.csv"; }
    std::filesystem::path detection_dir() const { return out_dir / "detections"; }
};

RunConfig default_run_config();
RunConfig load_run_config(const std::filesystem::path& path);

// Pipeline defaults keep the acceptance run fast: a 30 s drive at 100 Hz.
// Stage seeds derive from RunConfig::seed (synth, inject, predictor,
// agent get seed, seed+1, seed+2, seed+3).
void run_synth(const RunConfig& cfg);
void run_inject(const RunConfig& cfg);

struct PredictorSummary {
    ValidationReport report;
};
PredictorSummary run_train_predictor(const RunConfig& cfg);

struct AgentSummary {
    double threshold_m = 0.0;
    double threshold_initial_m = 0.0;
    std::size_t episodes = 0;
    double final_episode_reward = 0.0;
};
AgentSummary run_train_agent(const RunConfig& cfg);

struct EvaluateSummary {
    std::vector<ScenarioScore> scores;
};
EvaluateSummary run_evaluate(const RunConfig& cfg);

struct DetectSummary {
    std::size_t flag_count = 0;
    std::size_t step_count = 0;
    std::filesystem::path output_path;
};
DetectSummary run_detect(const RunConfig& cfg, const std::filesystem::path& trace_path,
                         std::optional<double> threshold_override,
                         std::optional<std::filesystem::path> output_override);

// Labeled DD series for an already-detected trace, the RL environment's
// training input.
std::vector<DdSample> dd_series_for(const Trace& trace, const MlpNetwork& net,
                                    const NormalizationStats& stats);

std::vector<double> log_spaced_grid(double lo, double hi, int points);

} // namespace spoofdet

#endif
