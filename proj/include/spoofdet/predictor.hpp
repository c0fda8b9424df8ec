#ifndef SPOOFDET_PREDICTOR_HPP
#define SPOOFDET_PREDICTOR_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spoofdet/mlp.hpp"
#include "spoofdet/trace.hpp"

namespace spoofdet {

// 4-16-8-4-1 distance-traveled model: three CAN features plus the
// previous GPS step distance in, predicted current step distance out.
inline const std::vector<int> kPredictorLayers{4, 16, 8, 4, 1};

// Feature order for rows and NormalizationStats.
inline const std::vector<std::string> kPredictorFeatureNames{
    "speed_fps", "steer_deg", "pedal_pct", "prev_distance_m"};
inline constexpr std::size_t kDistanceFeature = 3; // also normalizes the target

// Normalized inputs; values can leave [0,1] at inference when the live
// data falls outside the training range.
struct PredictorInput {
    double speed_norm = 0.0;
    double steer_norm = 0.0;
    double pedal_norm = 0.0;
    double prev_distance_norm = 0.0;
};

struct ValidationReport {
    double rmse_m = 0.0;
    double max_abs_error_m = 0.0;
    std::size_t sample_count = 0;
};

MlpNetwork build_predictor(std::uint64_t rng_seed);

// Raw (unnormalized) feature rows in kPredictorFeatureNames order, one
// per step that has both a previous and a current distance. Row k
// describes the step arriving at record k+2.
std::vector<std::vector<double>> make_feature_rows(const Trace& trace);

// Normalized training rows: inputs from the step's CAN values and the
// previous step distance, target the step's own distance (normalized
// with the prev_distance_m feature range). N records -> N-2 rows.
MlpDataset make_training_rows(const Trace& trace, const NormalizationStats& stats);

struct PredictorTrainResult {
    MlpNetwork net;
    ValidationReport report;
    std::vector<std::size_t> validation_rows; // indices into the input dataset
};

// Errors in meters (prediction clamped at zero first) over the given rows.
ValidationReport validate_predictor(const MlpNetwork& net, const MlpDataset& rows,
                                    const std::vector<std::size_t>& indices,
                                    const NormalizationStats& stats);

// 70/30 split, minibatch ADAM per cfg, report computed on the held-out
// 30% in meters (through the zero clamp, as deployed).
PredictorTrainResult train_predictor(const MlpDataset& rows, const TrainConfig& cfg,
                                     const NormalizationStats& stats,
                                     double train_fraction = 0.7);

PredictorInput make_predictor_input(double speed_fps, double steer_deg, double pedal_pct,
                                    double prev_distance_m, const NormalizationStats& stats);

// Forward pass then denormalization to meters, clamped below at zero.
double predict_distance(const MlpNetwork& net, const PredictorInput& input,
                        const NormalizationStats& stats);

} // namespace spoofdet

#endif
