#ifndef SPOOFDET_FEATURES_HPP
#define SPOOFDET_FEATURES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spoofdet {

struct FeatureStat {
    std::string name;
    double min = 0.0;
    double max = 0.0;
};

// Per-feature min/max captured on training data. Applied at inference
// with the training-time ranges, so outputs may leave [0,1] there.
struct NormalizationStats {
    std::vector<FeatureStat> features;

    std::size_t dim() const { return features.size(); }
    const FeatureStat* find(const std::string& name) const;
};

// Scans rows (all of equal width = names.size()) for per-feature ranges.
// A constant feature makes min == max and is rejected by name.
NormalizationStats fit_normalization(const std::vector<std::vector<double>>& rows,
                                     const std::vector<std::string>& names);

// x' = (x - min) / (max - min), per feature. Not clamped.
std::vector<double> apply_normalization(const std::vector<double>& row,
                                        const NormalizationStats& stats);
double normalize_value(double value, const FeatureStat& stat);
double denormalize_value(double value, const FeatureStat& stat);

std::string normalization_to_json(const NormalizationStats& stats);
NormalizationStats normalization_from_json(const std::string& json_text);

// Seeded shuffle split: |train| = round(fraction * n), disjoint cover.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_train_validation(std::size_t n_rows, double train_fraction, std::uint64_t rng_seed);

} // namespace spoofdet

#endif
