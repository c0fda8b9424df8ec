#include "spoofdet/features.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "spoofdet/errors.hpp"
#include "spoofdet/rng.hpp"

namespace spoofdet {

const FeatureStat* NormalizationStats::find(const std::string& name) const {
    for (const FeatureStat& f : features) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

NormalizationStats fit_normalization(const std::vector<std::vector<double>>& rows,
                                     const std::vector<std::string>& names) {
    if (rows.size() < 2) {
        throw ValidationError("fit_normalization: need >= 2 rows");
    }
    NormalizationStats stats;
    stats.features.resize(names.size());
    for (std::size_t f = 0; f < names.size(); ++f) {
        stats.features[f].name = names[f];
        stats.features[f].min = rows[0].at(f);
        stats.features[f].max = rows[0].at(f);
    }
    for (const auto& row : rows) {
        if (row.size() != names.size()) {
            throw ValidationError("fit_normalization: ragged row");
        }
        for (std::size_t f = 0; f < names.size(); ++f) {
            if (!std::isfinite(row[f])) {
                throw ValidationError("fit_normalization: non-finite value in feature '" +
                                      names[f] + "'");
            }
            stats.features[f].min = std::min(stats.features[f].min, row[f]);
            stats.features[f].max = std::max(stats.features[f].max, row[f]);
        }
    }
    for (const FeatureStat& f : stats.features) {
        if (!(f.max > f.min)) {
            throw ValidationError("constant feature '" + f.name + "' cannot be normalized");
        }
    }
    return stats;
}

double normalize_value(double value, const FeatureStat& stat) {
    return (value - stat.min) / (stat.max - stat.min);
}

double denormalize_value(double value, const FeatureStat& stat) {
    return stat.min + value * (stat.max - stat.min);
}

std::vector<double> apply_normalization(const std::vector<double>& row,
                                        const NormalizationStats& stats) {
    if (row.size() != stats.dim()) {
        throw ValidationError("apply_normalization: row width does not match stats");
    }
    std::vector<double> out(row.size());
    for (std::size_t f = 0; f < row.size(); ++f) {
        out[f] = normalize_value(row[f], stats.features[f]);
    }
    return out;
}

std::string normalization_to_json(const NormalizationStats& stats) {
    nlohmann::json j;
    j["features"] = nlohmann::json::array();
    for (const FeatureStat& f : stats.features) {
        j["features"].push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
    }
    return j.dump(2);
}

NormalizationStats normalization_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.contains("features") || !j["features"].is_array()) {
        throw ParseError("malformed normalization stats JSON");
    }
    NormalizationStats stats;
    for (const auto& e : j["features"]) {
        FeatureStat f;
        f.name = e.at("name").get<std::string>();
        f.min = e.at("min").get<double>();
        f.max = e.at("max").get<double>();
        stats.features.push_back(std::move(f));
    }
    return stats;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_train_validation(std::size_t n_rows, double train_fraction, std::uint64_t rng_seed) {
    if (n_rows < 10) {
        throw ValidationError("split_train_validation: need >= 10 rows");
    }
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ValidationError("split_train_validation: fraction must be in (0,1)");
    }
    std::vector<std::size_t> indices(n_rows);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    Rng rng(rng_seed);
    rng.shuffle(indices);

    const auto n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_rows)));
    std::vector<std::size_t> train(indices.begin(),
                                   indices.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> validation(indices.begin() + static_cast<std::ptrdiff_t>(n_train),
                                        indices.end());
    return {std::move(train), std::move(validation)};
}

} // namespace spoofdet
