#include "spoofdet/detector.hpp"

#include <cmath>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"

namespace spoofdet {

double differential_distance(double predicted_m, double calculated_m) {
    if (!std::isfinite(predicted_m) || !std::isfinite(calculated_m)) {
        throw ValidationError("differential_distance: inputs must be finite");
    }
    if (predicted_m < 0.0 || calculated_m < 0.0) {
        throw ValidationError("differential_distance: inputs must be >= 0");
    }
    return std::abs(predicted_m - calculated_m);
}

DetectionSeries run_detection(const Trace& trace, const MlpNetwork& net,
                              const NormalizationStats& stats, double threshold_m) {
    if (trace.size() < 3) {
        throw ValidationError("run_detection: trace needs >= 3 records");
    }
    if (!(threshold_m >= 0.0)) {
        throw ValidationError("run_detection: threshold must be >= 0");
    }

    DetectionSeries series;
    series.threshold_m = threshold_m;
    series.samples.reserve(trace.step_count() - 1);

    for (std::size_t i = 2; i <= trace.step_count(); ++i) {
        const SensorRecord& start = trace.records[i - 1];
        const PredictorInput input =
            make_predictor_input(start.speed_fps, start.steer_deg, start.pedal_pct,
                                 trace.step_distance_m[i - 2], stats);
        DetectionSample s;
        s.step = i;
        s.calculated_m = trace.step_distance_m[i - 1];
        s.predicted_m = predict_distance(net, input, stats);
        s.dd_m = differential_distance(s.predicted_m, s.calculated_m);
        s.flagged = s.dd_m > threshold_m;
        series.samples.push_back(s);
    }
    return series;
}

std::vector<std::uint8_t> detection_labels(const Trace& trace) {
    if (trace.step_count() < 2) {
        throw ValidationError("detection_labels: trace needs >= 3 records");
    }
    const auto all = step_labels(trace);
    return {all.begin() + 1, all.end()};
}

std::vector<std::uint8_t> detection_flags(const DetectionSeries& series) {
    std::vector<std::uint8_t> flags(series.samples.size());
    for (std::size_t i = 0; i < flags.size(); ++i) {
        flags[i] = series.samples[i].flagged ? 1 : 0;
    }
    return flags;
}

std::vector<double> detection_dd(const DetectionSeries& series) {
    std::vector<double> dd(series.samples.size());
    for (std::size_t i = 0; i < dd.size(); ++i) {
        dd[i] = series.samples[i].dd_m;
    }
    return dd;
}

void write_detection_csv(const DetectionSeries& series, const std::filesystem::path& path) {
    std::string out = "step,calculated_m,predicted_m,dd_m,flagged\n";
    out.reserve(series.samples.size() * 64);
    for (const DetectionSample& s : series.samples) {
        out += std::to_string(s.step);
        out += ',';
        out += format_double(s.calculated_m);
        out += ',';
        out += format_double(s.predicted_m);
        out += ',';
        out += format_double(s.dd_m);
        out += ',';
        out += s.flagged ? '1' : '0';
        out += '\n';
    }
    atomic_write_file(path, out);
}

} // namespace spoofdet
