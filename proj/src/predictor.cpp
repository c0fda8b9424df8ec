#include "spoofdet/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "spoofdet/errors.hpp"

namespace spoofdet {

MlpNetwork build_predictor(std::uint64_t rng_seed) {
    return init_network(kPredictorLayers, rng_seed);
}

std::vector<std::vector<double>> make_feature_rows(const Trace& trace) {
    if (trace.size() < 3) {
        throw ValidationError("predictor rows need a trace with >= 3 records");
    }
    // step i (arriving at record i) pairs with CAN at the step's start
    // record i-1 and the previous distance d_{i-1}; first usable i is 2
    std::vector<std::vector<double>> rows;
    rows.reserve(trace.size() - 2);
    for (std::size_t i = 2; i <= trace.step_count(); ++i) {
        const SensorRecord& start = trace.records[i - 1];
        rows.push_back({start.speed_fps, start.steer_deg, start.pedal_pct,
                        trace.step_distance_m[i - 2]});
    }
    return rows;
}

MlpDataset make_training_rows(const Trace& trace, const NormalizationStats& stats) {
    if (stats.dim() != kPredictorFeatureNames.size()) {
        throw ValidationError("predictor stats must cover the 4 input features");
    }
    const auto raw = make_feature_rows(trace);
    const FeatureStat& dist = stats.features[kDistanceFeature];

    MlpDataset data;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        std::vector<double> input = apply_normalization(raw[k], stats);
        // target is the current step distance, normalized with the same
        // range as the previous-distance input
        const double target_m = trace.step_distance_m[k + 1];
        data.add_row(input, {normalize_value(target_m, dist)});
    }
    return data;
}

PredictorInput make_predictor_input(double speed_fps, double steer_deg, double pedal_pct,
                                    double prev_distance_m, const NormalizationStats& stats) {
    if (stats.dim() != kPredictorFeatureNames.size()) {
        throw ValidationError("predictor stats must cover the 4 input features");
    }
    PredictorInput in;
    in.speed_norm = normalize_value(speed_fps, stats.features[0]);
    in.steer_norm = normalize_value(steer_deg, stats.features[1]);
    in.pedal_norm = normalize_value(pedal_pct, stats.features[2]);
    in.prev_distance_norm = normalize_value(prev_distance_m, stats.features[3]);
    return in;
}

double predict_distance(const MlpNetwork& net, const PredictorInput& input,
                        const NormalizationStats& stats) {
    const std::vector<double> x{input.speed_norm, input.steer_norm, input.pedal_norm,
                                input.prev_distance_norm};
    const double y_norm = forward(net, x)[0];
    const double meters = denormalize_value(y_norm, stats.features[kDistanceFeature]);
    return std::max(0.0, meters);
}

ValidationReport validate_predictor(const MlpNetwork& net, const MlpDataset& rows,
                                    const std::vector<std::size_t>& indices,
                                    const NormalizationStats& stats) {
    const FeatureStat& dist = stats.features[kDistanceFeature];
    ValidationReport report;
    report.sample_count = indices.size();

    double sq_sum = 0.0;
    MlpWorkspace ws;
    for (std::size_t i : indices) {
        forward_into(net, rows.input_row(i), ws);
        const double pred_m = std::max(0.0, denormalize_value(ws.activations.back()[0], dist));
        const double target_m = denormalize_value(rows.target_row(i)[0], dist);
        const double err = std::abs(pred_m - target_m);
        sq_sum += err * err;
        report.max_abs_error_m = std::max(report.max_abs_error_m, err);
    }
    if (!indices.empty()) {
        report.rmse_m = std::sqrt(sq_sum / static_cast<double>(indices.size()));
    }
    return report;
}

PredictorTrainResult train_predictor(const MlpDataset& rows, const TrainConfig& cfg,
                                     const NormalizationStats& stats, double train_fraction) {
    if (rows.size() < 10) {
        throw ValidationError("train_predictor: need >= 10 rows");
    }
    if (rows.input_dim != 4 || rows.target_dim != 1) {
        throw ValidationError("train_predictor: rows must be 4 inputs -> 1 target");
    }

    auto [train_idx, val_idx] = split_train_validation(rows.size(), train_fraction, cfg.rng_seed);

    MlpDataset train_set;
    for (std::size_t i : train_idx) {
        train_set.add_row({rows.input_row(i), rows.input_row(i) + 4},
                          {rows.target_row(i), rows.target_row(i) + 1});
    }

    PredictorTrainResult result;
    result.net = build_predictor(cfg.rng_seed);
    train(result.net, train_set, cfg);
    result.validation_rows = std::move(val_idx);
    result.report = validate_predictor(result.net, rows, result.validation_rows, stats);
    return result;
}

} // namespace spoofdet
