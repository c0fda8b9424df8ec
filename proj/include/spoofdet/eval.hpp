#ifndef SPOOFDET_EVAL_HPP
#define SPOOFDET_EVAL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spoofdet {

struct ConfusionMatrix {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
};

// Each value in [0,1]; attack is the positive class.
struct MetricSet {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct PrPoint {
    double threshold_m = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct PrCurve {
    std::vector<PrPoint> points;
};

ConfusionMatrix confusion(const std::vector<std::uint8_t>& flags,
                          const std::vector<std::uint8_t>& labels);

// accuracy = (tp+tn)/total, precision = tp/(tp+fp), recall = tp/(tp+fn),
// f1 = harmonic mean. Conventions: precision = 1 when no alarms were
// raised; f1 = 0 when precision + recall = 0. A series with no actual
// attacks (tp+fn = 0) is an error.
MetricSet metrics(const ConfusionMatrix& cm);

// Re-thresholds the DD series over an ascending grid; recall is monotone
// non-increasing in the threshold.
PrCurve pr_curve(const std::vector<double>& dd_series, const std::vector<std::uint8_t>& labels,
                 const std::vector<double>& threshold_grid);

// Collapses bursts of flags: a flag within `window` steps of the previous
// kept flag is dropped, so one detection event is counted once. Off by
// default in the pipeline; pass window = 0 for a no-op.
std::vector<std::uint8_t> merge_flag_bursts(const std::vector<std::uint8_t>& flags,
                                            std::size_t window);

struct ScenarioScore {
    int scenario = 0;
    ConfusionMatrix cm;
    MetricSet metrics;
};

// Percentage with 2 decimals, e.g. 96.61.
std::string format_pct(double fraction);

// CSV: scenario,recall_pct,precision_pct,accuracy_pct,f1_pct
std::string scenario_report_csv(const std::vector<ScenarioScore>& scores);
void write_scenario_report(const std::vector<ScenarioScore>& scores,
                           const std::filesystem::path& path);

// CSV: threshold_m,precision,recall
void write_pr_curve(const PrCurve& curve, const std::filesystem::path& path);

} // namespace spoofdet

#endif
