#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spoofdet/errors.hpp"
#include "spoofdet/predictor.hpp"
#include "spoofdet/synth.hpp"

using namespace spoofdet;

namespace {

Trace drive(double duration_s, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.duration_s = duration_s;
    cfg.rng_seed = seed;
    return generate_synthetic_trace(cfg);
}

NormalizationStats stats_for(const Trace& trace) {
    return fit_normalization(make_feature_rows(trace), kPredictorFeatureNames);
}

} // namespace

TEST_CASE("predictor network shape and size") {
    const MlpNetwork net = build_predictor(5);
    CHECK(net.layer_sizes == std::vector<int>{4, 16, 8, 4, 1});
    CHECK(net.parameter_count() == 257);

    const MlpNetwork again = build_predictor(5);
    CHECK(net.weights == again.weights);
}

TEST_CASE("a trace with N records yields N-2 rows") {
    const Trace t = drive(2.0, 3); // 201 records
    const NormalizationStats stats = stats_for(t);
    const MlpDataset rows = make_training_rows(t, stats);
    CHECK(rows.size() == t.size() - 2);
    CHECK(rows.input_dim == 4);
    CHECK(rows.target_dim == 1);
}

TEST_CASE("stationary trace: every target is the normalized zero distance") {
    // constant speed keeps the distance column non-degenerate; a fully
    // stationary trace has a constant distance feature, which fit rejects
    std::vector<SensorRecord> records;
    for (int i = 0; i < 30; ++i) {
        SensorRecord r;
        r.timestamp_s = i * 0.01;
        r.position = {37.0, -122.0};
        records.push_back(r);
    }
    const Trace t = make_trace(records);
    CHECK_THROWS_WITH_AS(stats_for(t), doctest::Contains("constant feature"), ValidationError);

    // with externally supplied stats the rows are all zero-distance
    NormalizationStats stats;
    stats.features = {{"speed_fps", 0.0, 1.0},
                      {"steer_deg", -1.0, 1.0},
                      {"pedal_pct", 0.0, 1.0},
                      {"prev_distance_m", 0.0, 1.0}};
    const MlpDataset rows = make_training_rows(t, stats);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows.target_row(i)[0] == 0.0);
        CHECK(rows.input_row(i)[3] == 0.0);
    }
}

TEST_CASE("constant-speed trace: targets agree within 1e-6 relative") {
    SynthConfig cfg;
    cfg.duration_s = 4.0;
    cfg.initial_speed_mps = 12.0;
    cfg.pedal_mean_pct = 100.0 * 12.0 / cfg.speed_max_mps;
    cfg.pedal_amplitude_pct = 0.0;
    cfg.pedal_noise_pct = 0.0;
    cfg.steer_amplitude_deg = 0.0;
    cfg.steer_noise_deg = 0.0;
    cfg.gps_noise_m = 0.0;
    const Trace t = generate_synthetic_trace(cfg);

    NormalizationStats stats;
    stats.features = {{"speed_fps", 0.0, 100.0},
                      {"steer_deg", -1.0, 1.0},
                      {"pedal_pct", 0.0, 100.0},
                      {"prev_distance_m", 0.0, 1.0}};
    const MlpDataset rows = make_training_rows(t, stats);
    const double first = rows.target_row(0)[0];
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(rows.target_row(i)[0] - first) / first < 1e-6);
    }
}

TEST_CASE("short traces are rejected") {
    std::vector<SensorRecord> records(2);
    records[0].timestamp_s = 0.0;
    records[0].position = {37.0, -122.0};
    records[1].timestamp_s = 0.01;
    records[1].position = {37.0001, -122.0};
    const Trace t = make_trace(records);
    CHECK_THROWS_AS(make_feature_rows(t), ValidationError);
}

TEST_CASE("train_predictor learns the drive and reports consistently") {
    const Trace t = drive(20.0, 17); // 2001 records -> 1999 rows
    const NormalizationStats stats = stats_for(t);
    const MlpDataset rows = make_training_rows(t, stats);

    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.rng_seed = 9;
    const PredictorTrainResult result = train_predictor(rows, cfg, stats);

    CHECK(result.report.sample_count == result.validation_rows.size());
    const auto expected_val = rows.size() - static_cast<std::size_t>(std::llround(0.7 * rows.size()));
    CHECK(result.report.sample_count == expected_val);
    CHECK(result.report.max_abs_error_m < 5.0);
    CHECK(result.report.rmse_m <= result.report.max_abs_error_m);

    // report consistency: recompute errors over the validation rows with
    // the deployed prediction path
    double max_err = 0.0;
    double sq = 0.0;
    const FeatureStat& dist = stats.features[kDistanceFeature];
    for (std::size_t i : result.validation_rows) {
        PredictorInput in;
        in.speed_norm = rows.input_row(i)[0];
        in.steer_norm = rows.input_row(i)[1];
        in.pedal_norm = rows.input_row(i)[2];
        in.prev_distance_norm = rows.input_row(i)[3];
        const double pred = predict_distance(result.net, in, stats);
        const double target = denormalize_value(rows.target_row(i)[0], dist);
        const double err = std::abs(pred - target);
        max_err = std::max(max_err, err);
        sq += err * err;
    }
    CHECK(result.report.max_abs_error_m == doctest::Approx(max_err).epsilon(1e-12));
    CHECK(result.report.rmse_m ==
          doctest::Approx(std::sqrt(sq / static_cast<double>(result.validation_rows.size())))
              .epsilon(1e-12));
}

TEST_CASE("retraining with the same seed reproduces the report bit-exactly") {
    const Trace t = drive(4.0, 23);
    const NormalizationStats stats = stats_for(t);
    const MlpDataset rows = make_training_rows(t, stats);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.rng_seed = 77;
    const PredictorTrainResult a = train_predictor(rows, cfg, stats);
    const PredictorTrainResult b = train_predictor(rows, cfg, stats);
    CHECK(a.report.rmse_m == b.report.rmse_m);
    CHECK(a.report.max_abs_error_m == b.report.max_abs_error_m);
    CHECK(a.net.weights == b.net.weights);
}

TEST_CASE("prediction is clamped at zero meters") {
    MlpNetwork net = build_predictor(4);
    // force a strongly negative raw output
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
    net.biases.back()[0] = -100.0;

    NormalizationStats stats;
    stats.features = {{"speed_fps", 0.0, 1.0},
                      {"steer_deg", -1.0, 1.0},
                      {"pedal_pct", 0.0, 1.0},
                      {"prev_distance_m", 0.0, 1.0}};
    const double out = predict_distance(net, PredictorInput{0.5, 0.5, 0.5, 0.5}, stats);
    CHECK(out == 0.0);

    // untrained all-zero network: denormalized zero-output constant
    net.biases.back()[0] = 0.0;
    CHECK(predict_distance(net, PredictorInput{0.9, 0.1, 0.4, 0.7}, stats) == 0.0);
}

TEST_CASE("train_predictor rejects tiny datasets") {
    MlpDataset rows;
    for (int i = 0; i < 9; ++i) {
        rows.add_row({0.1, 0.2, 0.3, 0.4}, {0.5});
    }
    NormalizationStats stats;
    stats.features = {{"speed_fps", 0.0, 1.0},
                      {"steer_deg", -1.0, 1.0},
                      {"pedal_pct", 0.0, 1.0},
                      {"prev_distance_m", 0.0, 1.0}};
    TrainConfig cfg;
    CHECK_THROWS_AS(train_predictor(rows, cfg, stats), ValidationError);
}
