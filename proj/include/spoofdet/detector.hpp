#ifndef SPOOFDET_DETECTOR_HPP
#define SPOOFDET_DETECTOR_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spoofdet/predictor.hpp"
#include "spoofdet/trace.hpp"

namespace spoofdet {

struct DetectionSample {
    std::size_t step = 0;      // step index: the step arriving at record `step`
    double calculated_m = 0.0; // GPS step distance
    double predicted_m = 0.0;  // predictor output
    double dd_m = 0.0;         // |predicted - calculated|
    bool flagged = false;      // dd_m > threshold
};

struct DetectionSeries {
    std::vector<DetectionSample> samples;
    double threshold_m = 0.0;
};

// |predicted - calculated|; both must be finite and >= 0.
double differential_distance(double predicted_m, double calculated_m);

// Runs the detector over steps 2..N-1 (the first step has no previous
// distance). The predictor consumes the trace's own, possibly spoofed,
// previous step distance: a victim has no access to the clean signal.
// An attack is flagged when DD strictly exceeds the threshold.
DetectionSeries run_detection(const Trace& trace, const MlpNetwork& net,
                              const NormalizationStats& stats, double threshold_m);

// Ground-truth labels aligned with the detection samples (steps 2..N-1).
std::vector<std::uint8_t> detection_labels(const Trace& trace);

std::vector<std::uint8_t> detection_flags(const DetectionSeries& series);
std::vector<double> detection_dd(const DetectionSeries& series);

// CSV: step,calculated_m,predicted_m,dd_m,flagged
void write_detection_csv(const DetectionSeries& series, const std::filesystem::path& path);

} // namespace spoofdet

#endif
