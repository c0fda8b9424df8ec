#include "spoofdet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "spoofdet/detector.hpp"
#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"

namespace spoofdet {

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.synth.duration_s = 30.0;
    return cfg;
}

static void parse_synth(const nlohmann::json& j, SynthConfig& s) {
    s.duration_s = j.value("duration_s", s.duration_s);
    s.sample_rate_hz = j.value("sample_rate_hz", s.sample_rate_hz);
    s.origin.lat_deg = j.value("origin_lat", s.origin.lat_deg);
    s.origin.lon_deg = j.value("origin_lon", s.origin.lon_deg);
    s.start_time_s = j.value("start_time_s", s.start_time_s);
    s.initial_speed_mps = j.value("initial_speed_mps", s.initial_speed_mps);
    s.speed_max_mps = j.value("speed_max_mps", s.speed_max_mps);
    s.initial_heading_deg = j.value("initial_heading_deg", s.initial_heading_deg);
    s.pedal_mean_pct = j.value("pedal_mean_pct", s.pedal_mean_pct);
    s.pedal_amplitude_pct = j.value("pedal_amplitude_pct", s.pedal_amplitude_pct);
    s.pedal_period_s = j.value("pedal_period_s", s.pedal_period_s);
    s.pedal_noise_pct = j.value("pedal_noise_pct", s.pedal_noise_pct);
    s.pedal_gain_mps2 = j.value("pedal_gain_mps2", s.pedal_gain_mps2);
    s.steer_amplitude_deg = j.value("steer_amplitude_deg", s.steer_amplitude_deg);
    s.steer_period_s = j.value("steer_period_s", s.steer_period_s);
    s.steer_noise_deg = j.value("steer_noise_deg", s.steer_noise_deg);
    s.wheelbase_m = j.value("wheelbase_m", s.wheelbase_m);
    s.steering_ratio = j.value("steering_ratio", s.steering_ratio);
    s.gps_noise_m = j.value("gps_noise_m", s.gps_noise_m);
}

static void parse_agent(const nlohmann::json& j, RunConfig& cfg) {
    QLearningConfig& a = cfg.agent;
    a.alpha = j.value("alpha", a.alpha);
    a.gamma = j.value("gamma", a.gamma);
    a.total_steps = j.value("total_steps", a.total_steps);
    a.epsilon_start = j.value("epsilon_start", a.epsilon_start);
    a.epsilon_end = j.value("epsilon_end", a.epsilon_end);
    a.epsilon_decay_fraction = j.value("epsilon_decay_fraction", a.epsilon_decay_fraction);
    a.replay_capacity = j.value("replay_capacity", a.replay_capacity);
    a.batch_size = j.value("batch_size", a.batch_size);
    a.target_sync_period = j.value("target_sync_period", a.target_sync_period);
    a.threshold_step_m = j.value("threshold_step_m", a.threshold_step_m);
    a.threshold_max_m = j.value("threshold_max_m", a.threshold_max_m);
    a.q_learning_rate = j.value("q_learning_rate", a.q_learning_rate);
    a.rewards.correct = j.value("reward_correct", a.rewards.correct);
    a.rewards.incorrect = j.value("reward_incorrect", a.rewards.incorrect);
    if (j.contains("threshold_initial_m") && j["threshold_initial_m"].is_number()) {
        cfg.agent_threshold_initial_m = j["threshold_initial_m"].get<double>();
    }
    cfg.train_scenario = j.value("train_scenario", cfg.train_scenario);
}

RunConfig load_run_config(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("malformed config file: " + path.string());
    }
    RunConfig cfg = default_run_config();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir.string());
    if (j.contains("synth")) parse_synth(j["synth"], cfg.synth);
    if (j.contains("attack")) {
        cfg.attack_min_onset_gap =
            j["attack"].value("min_onset_gap_steps", cfg.attack_min_onset_gap);
    }
    if (j.contains("predictor")) {
        const auto& p = j["predictor"];
        cfg.predictor_train.epochs = p.value("epochs", cfg.predictor_train.epochs);
        cfg.predictor_train.batch_size = p.value("batch_size", cfg.predictor_train.batch_size);
        cfg.predictor_train.learning_rate =
            p.value("learning_rate", cfg.predictor_train.learning_rate);
        cfg.train_fraction = p.value("train_fraction", cfg.train_fraction);
    }
    if (j.contains("agent")) parse_agent(j["agent"], cfg);
    if (j.contains("evaluate")) {
        const auto& e = j["evaluate"];
        cfg.eval.grid_min_m = e.value("grid_min_m", cfg.eval.grid_min_m);
        cfg.eval.grid_max_m = e.value("grid_max_m", cfg.eval.grid_max_m);
        cfg.eval.grid_points = e.value("grid_points", cfg.eval.grid_points);
        cfg.eval.merge_window = e.value("merge_window", cfg.eval.merge_window);
    }
    return cfg;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw ValidationError("threshold grid needs 0 < min < max and >= 2 points");
    }
    std::vector<double> grid(points);
    const double log_lo = std::log(lo);
    const double log_hi = std::log(hi);
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(points - 1);
        grid[i] = std::exp(log_lo + f * (log_hi - log_lo));
    }
    return grid;
}

void run_synth(const RunConfig& cfg) {
    SynthConfig synth = cfg.synth;
    synth.rng_seed = cfg.seed;
    const Trace trace = generate_synthetic_trace(synth);
    save_trace(trace, cfg.clean_trace_path());
}

void run_inject(const RunConfig& cfg) {
    const Trace clean = load_trace(cfg.clean_trace_path());
    const ScenarioSet set =
        generate_scenario_set(clean, cfg.seed + 1, cfg.attack_min_onset_gap);
    write_scenario_set(set, cfg.scenario_dir());
}

PredictorSummary run_train_predictor(const RunConfig& cfg) {
    const Trace clean = load_trace(cfg.clean_trace_path());
    const auto raw_rows = make_feature_rows(clean);
    const NormalizationStats stats = fit_normalization(raw_rows, kPredictorFeatureNames);
    const MlpDataset rows = make_training_rows(clean, stats);

    TrainConfig train_cfg = cfg.predictor_train;
    train_cfg.rng_seed = cfg.seed + 2;
    const PredictorTrainResult result =
        train_predictor(rows, train_cfg, stats, cfg.train_fraction);

    save_model(result.net, stats, "predictor", cfg.predictor_model_path());
    nlohmann::json report;
    report["rmse_m"] = result.report.rmse_m;
    report["max_abs_error_m"] = result.report.max_abs_error_m;
    report["sample_count"] = result.report.sample_count;
    atomic_write_file(cfg.predictor_report_path(), report.dump(2) + "\n");
    return PredictorSummary{result.report};
}

std::vector<DdSample> dd_series_for(const Trace& trace, const MlpNetwork& net,
                                    const NormalizationStats& stats) {
    const DetectionSeries detection = run_detection(trace, net, stats, 0.0);
    const auto labels = detection_labels(trace);
    std::vector<DdSample> series(detection.samples.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        series[i].dd_m = detection.samples[i].dd_m;
        series[i].label = labels[i];
    }
    return series;
}

static ManifestEntry find_scenario(const std::vector<ManifestEntry>& entries, int id) {
    for (const ManifestEntry& e : entries) {
        if (e.id == id) return e;
    }
    throw ValidationError("scenario " + std::to_string(id) + " not found in manifest");
}

AgentSummary run_train_agent(const RunConfig& cfg) {
    const auto manifest = load_scenario_manifest(cfg.manifest_path());
    const ManifestEntry entry = find_scenario(manifest, cfg.train_scenario);
    const Trace scenario = load_trace(entry.trace_path);
    if (!scenario.labeled()) {
        throw ValidationError("training scenario has no label column: " +
                              entry.trace_path.string());
    }
    const LoadedModel model = load_model(cfg.predictor_model_path());

    const std::vector<DdSample> series = dd_series_for(scenario, model.net, model.stats);

    QLearningConfig agent_cfg = cfg.agent;
    agent_cfg.rng_seed = cfg.seed + 3;
    if (cfg.agent_threshold_initial_m.has_value()) {
        agent_cfg.threshold_initial_m = *cfg.agent_threshold_initial_m;
    } else {
        // start where no clean-labeled step of the training data can
        // false-alarm: above the largest clean step distance (the bound on
        // the one elevated step trailing each onset) plus prediction error
        nlohmann::json report =
            nlohmann::json::parse(read_file(cfg.predictor_report_path()), nullptr, false);
        if (report.is_discarded()) {
            throw ParseError("malformed predictor report: " + cfg.predictor_report_path().string());
        }
        const double max_err = report.at("max_abs_error_m").get<double>();
        const auto labels = step_labels(scenario);
        double max_clean_step = 0.0;
        for (std::size_t i = 0; i < scenario.step_count(); ++i) {
            if (!labels[i]) {
                max_clean_step = std::max(max_clean_step, scenario.step_distance_m[i]);
            }
        }
        agent_cfg.threshold_initial_m =
            std::min(max_clean_step + 2.0 * max_err, agent_cfg.threshold_max_m);
    }

    const AgentResult result = train_agent(series, agent_cfg);
    save_agent(result, agent_cfg, cfg.agent_path());

    AgentSummary summary;
    summary.threshold_m = result.threshold.threshold_m;
    summary.threshold_initial_m = agent_cfg.threshold_initial_m;
    summary.episodes = result.episode_rewards.size();
    summary.final_episode_reward = result.episode_rewards.back();
    return summary;
}

EvaluateSummary run_evaluate(const RunConfig& cfg) {
    const auto manifest = load_scenario_manifest(cfg.manifest_path());
    const LoadedModel model = load_model(cfg.predictor_model_path());
    const LoadedAgent agent = load_agent(cfg.agent_path());
    const auto grid = log_spaced_grid(cfg.eval.grid_min_m, cfg.eval.grid_max_m,
                                      cfg.eval.grid_points);

    EvaluateSummary summary;
    std::vector<double> pooled_dd;
    std::vector<std::uint8_t> pooled_labels;

    for (const ManifestEntry& entry : manifest) {
        if (entry.id == cfg.train_scenario) continue; // held out of the report

        const Trace scenario = load_trace(entry.trace_path);
        const DetectionSeries detection =
            run_detection(scenario, model.net, model.stats, agent.threshold_m);

        char name[32];
        std::snprintf(name, sizeof(name), "scenario_%02d_detection.csv", entry.id);
        write_detection_csv(detection, cfg.detection_dir() / name);

        const auto labels = detection_labels(scenario);
        auto flags = detection_flags(detection);
        if (cfg.eval.merge_window > 0) {
            flags = merge_flag_bursts(flags, cfg.eval.merge_window);
        }

        ScenarioScore score;
        score.scenario = entry.id;
        score.cm = confusion(flags, labels);
        score.metrics = metrics(score.cm);
        summary.scores.push_back(score);

        const auto dd = detection_dd(detection);
        pooled_dd.insert(pooled_dd.end(), dd.begin(), dd.end());
        pooled_labels.insert(pooled_labels.end(), labels.begin(), labels.end());
    }

    if (summary.scores.empty()) {
        throw ValidationError("evaluate: no scenarios to score");
    }
    write_scenario_report(summary.scores, cfg.report_path());
    write_pr_curve(pr_curve(pooled_dd, pooled_labels, grid), cfg.pr_curve_path());
    return summary;
}

DetectSummary run_detect(const RunConfig& cfg, const std::filesystem::path& trace_path,
                         std::optional<double> threshold_override,
                         std::optional<std::filesystem::path> output_override) {
    const Trace trace = load_trace(trace_path);
    const LoadedModel model = load_model(cfg.predictor_model_path());

    double threshold = 0.0;
    if (threshold_override.has_value()) {
        threshold = *threshold_override;
    } else {
        threshold = load_agent(cfg.agent_path()).threshold_m;
    }

    const DetectionSeries detection = run_detection(trace, model.net, model.stats, threshold);

    DetectSummary summary;
    summary.step_count = detection.samples.size();
    for (const DetectionSample& s : detection.samples) {
        if (s.flagged) ++summary.flag_count;
    }
    summary.output_path = output_override.value_or(
        cfg.detection_dir() / (trace_path.stem().string() + "_detection.csv"));
    write_detection_csv(detection, summary.output_path);
    return summary;
}

} // namespace spoofdet
