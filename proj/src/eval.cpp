#include "spoofdet/eval.hpp"

#include <cmath>
#include <cstdio>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"

namespace spoofdet {

ConfusionMatrix confusion(const std::vector<std::uint8_t>& flags,
                          const std::vector<std::uint8_t>& labels) {
    if (flags.size() != labels.size()) {
        throw ValidationError("confusion: flags and labels must have equal length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        const bool flagged = flags[i] != 0;
        const bool attack = labels[i] != 0;
        if (flagged && attack) ++cm.tp;
        else if (flagged && !attack) ++cm.fp;
        else if (!flagged && attack) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

MetricSet metrics(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) {
        throw ValidationError("metrics: empty confusion matrix");
    }
    if (cm.tp + cm.fn == 0) {
        throw ValidationError("metrics: no actual attacks in the scored series");
    }
    MetricSet m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    m.precision = (cm.tp + cm.fp == 0)
                      ? 1.0 // no alarms raised, none of them wrong
                      : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

PrCurve pr_curve(const std::vector<double>& dd_series, const std::vector<std::uint8_t>& labels,
                 const std::vector<double>& threshold_grid) {
    if (dd_series.size() != labels.size()) {
        throw ValidationError("pr_curve: series and labels must have equal length");
    }
    if (threshold_grid.empty()) {
        throw ValidationError("pr_curve: threshold grid must be non-empty");
    }
    for (std::size_t i = 1; i < threshold_grid.size(); ++i) {
        if (!(threshold_grid[i] > threshold_grid[i - 1])) {
            throw ValidationError("pr_curve: threshold grid must be sorted ascending");
        }
    }

    PrCurve curve;
    curve.points.reserve(threshold_grid.size());
    for (double threshold : threshold_grid) {
        ConfusionMatrix cm;
        for (std::size_t i = 0; i < dd_series.size(); ++i) {
            const bool flagged = dd_series[i] > threshold;
            const bool attack = labels[i] != 0;
            if (flagged && attack) ++cm.tp;
            else if (flagged && !attack) ++cm.fp;
            else if (!flagged && attack) ++cm.fn;
            else ++cm.tn;
        }
        PrPoint p;
        p.threshold_m = threshold;
        p.precision = (cm.tp + cm.fp == 0)
                          ? 1.0
                          : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
        p.recall = (cm.tp + cm.fn == 0)
                       ? 0.0
                       : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
        curve.points.push_back(p);
    }
    return curve;
}

std::vector<std::uint8_t> merge_flag_bursts(const std::vector<std::uint8_t>& flags,
                                            std::size_t window) {
    if (window == 0) return flags;
    std::vector<std::uint8_t> merged(flags.size(), 0);
    std::size_t last_kept = 0;
    bool any_kept = false;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (!flags[i]) continue;
        if (any_kept && i - last_kept <= window) continue;
        merged[i] = 1;
        last_kept = i;
        any_kept = true;
    }
    return merged;
}

std::string format_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

std::string scenario_report_csv(const std::vector<ScenarioScore>& scores) {
    std::string out = "scenario,recall_pct,precision_pct,accuracy_pct,f1_pct\n";
    for (const ScenarioScore& s : scores) {
        out += std::to_string(s.scenario);
        out += ',';
        out += format_pct(s.metrics.recall);
        out += ',';
        out += format_pct(s.metrics.precision);
        out += ',';
        out += format_pct(s.metrics.accuracy);
        out += ',';
        out += format_pct(s.metrics.f1);
        out += '\n';
    }
    return out;
}

void write_scenario_report(const std::vector<ScenarioScore>& scores,
                           const std::filesystem::path& path) {
    if (scores.empty()) {
        throw ValidationError("scenario report: need >= 1 scored scenario");
    }
    atomic_write_file(path, scenario_report_csv(scores));
}

void write_pr_curve(const PrCurve& curve, const std::filesystem::path& path) {
    std::string out = "threshold_m,precision,recall\n";
    for (const PrPoint& p : curve.points) {
        out += format_double(p.threshold_m);
        out += ',';
        out += format_double(p.precision);
        out += ',';
        out += format_double(p.recall);
        out += '\n';
    }
    atomic_write_file(path, out);
}

} // namespace spoofdet
