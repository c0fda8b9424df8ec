#include "spoofdet/attack.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"
#include "spoofdet/rng.hpp"

namespace spoofdet {

InjectionResult inject_attack(const Trace& trace, const AttackSpec& spec) {
    return apply_attacks(trace, {spec});
}

// Displaces the suffix starting at `onset`. The onset record moves along
// the great-circle bearing; every later record replays its clean step
// vector (east/north meters) from the displaced predecessor, so step
// distances away from the onset are preserved.
static void displace_suffix(const std::vector<SensorRecord>& clean,
                            std::vector<SensorRecord>& out, std::size_t onset,
                            double shift_m, double bearing_deg) {
    const double earth_r = EarthModel{}.radius_m;

    out[onset].position = move_point(out[onset].position, shift_m, bearing_deg);
    for (std::size_t i = onset + 1; i < clean.size(); ++i) {
        const double dlat = (clean[i].position.lat_deg - clean[i - 1].position.lat_deg) * kDegToRad;
        const double dlon = (clean[i].position.lon_deg - clean[i - 1].position.lon_deg) * kDegToRad;
        const double mid_clean =
            (clean[i].position.lat_deg + clean[i - 1].position.lat_deg) / 2.0 * kDegToRad;
        const double east_m = dlon * earth_r * std::cos(mid_clean);

        const double lat_prev_s = out[i - 1].position.lat_deg * kDegToRad;
        const double lat_curr_s = lat_prev_s + dlat;
        const double mid_spoof = (lat_prev_s + lat_curr_s) / 2.0;

        out[i].position.lat_deg = lat_curr_s * kRadToDeg;
        out[i].position.lon_deg =
            out[i - 1].position.lon_deg + east_m / (earth_r * std::cos(mid_spoof)) * kRadToDeg;
    }
}

InjectionResult apply_attacks(const Trace& trace, std::vector<AttackSpec> specs) {
    const std::size_t n = trace.size();
    for (const AttackSpec& spec : specs) {
        if (spec.onset_index == 0 || spec.onset_index >= n) {
            throw ValidationError("attack onset index out of range");
        }
        if (!(spec.shift_m >= kShiftMinM && spec.shift_m <= kShiftMaxM)) {
            throw ValidationError("attack shift must lie in [50, 180] m");
        }
        if (!std::isfinite(spec.shift_bearing_deg)) {
            throw ValidationError("attack bearing must be finite");
        }
    }
    std::sort(specs.begin(), specs.end(),
              [](const AttackSpec& a, const AttackSpec& b) { return a.onset_index < b.onset_index; });
    for (std::size_t i = 1; i < specs.size(); ++i) {
        if (specs[i].onset_index == specs[i - 1].onset_index) {
            throw ValidationError("duplicate attack onset index");
        }
    }

    std::vector<SensorRecord> records = trace.records;
    std::vector<std::uint8_t> labels(n, 0);
    for (const AttackSpec& spec : specs) {
        displace_suffix(trace.records, records, spec.onset_index, spec.shift_m,
                        spec.shift_bearing_deg);
        labels[spec.onset_index] = 1;
    }

    InjectionResult result;
    result.spoofed = make_trace(std::move(records), std::move(labels));
    result.labels = step_labels(result.spoofed);
    return result;
}

ScenarioSet generate_scenario_set(const Trace& trace, std::uint64_t rng_seed,
                                  std::size_t min_onset_gap) {
    const std::size_t n = trace.size();
    const std::size_t max_attacks = kScenarioCount;
    // onset 1 would put the discontinuity on the very first step, which has
    // no preceding step distance for the detector; keep a margin
    const std::size_t lo = std::max<std::size_t>(2, min_onset_gap);
    if (n < 3 || n - 2 < lo || (n - 2 - lo) < (max_attacks - 1) * min_onset_gap) {
        throw ValidationError("trace too short to host the scenario set");
    }
    const std::size_t hi = n - 2;

    ScenarioSet set;
    set.rng_seed = rng_seed;
    Rng rng(rng_seed);

    for (int id = 1; id <= kScenarioCount; ++id) {
        const std::size_t count = static_cast<std::size_t>(kScenarioCount - id + 1);

        std::vector<std::size_t> onsets;
        std::size_t attempts = 0;
        while (onsets.size() < count) {
            if (++attempts > 10000 * max_attacks) {
                throw ValidationError("could not place non-overlapping attack onsets");
            }
            const std::size_t candidate = lo + rng.uniform_index(hi - lo + 1);
            bool ok = true;
            for (std::size_t o : onsets) {
                const std::size_t gap = candidate > o ? candidate - o : o - candidate;
                if (gap < min_onset_gap) {
                    ok = false;
                    break;
                }
            }
            if (ok) onsets.push_back(candidate);
        }
        std::sort(onsets.begin(), onsets.end());

        Scenario scenario;
        scenario.id = id;
        for (std::size_t o : onsets) {
            AttackSpec spec;
            spec.onset_index = o;
            spec.shift_m = rng.uniform(kShiftMinM, kShiftMaxM);
            spec.shift_bearing_deg = rng.uniform(0.0, 360.0);
            scenario.attacks.push_back(spec);
        }
        for (std::size_t i = 0; i < scenario.attacks.size(); ++i) {
            SpoofedSegment seg;
            seg.first = scenario.attacks[i].onset_index;
            seg.last = i + 1 < scenario.attacks.size()
                           ? scenario.attacks[i + 1].onset_index - 1
                           : n - 1;
            scenario.segments.push_back(seg);
        }
        scenario.spoofed = apply_attacks(trace, scenario.attacks).spoofed;
        set.scenarios.push_back(std::move(scenario));
    }
    return set;
}

static std::string scenario_file_name(const std::string& prefix, int id) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", id);
    return prefix + buf + ".csv";
}

void write_scenario_set(const ScenarioSet& set, const std::filesystem::path& dir,
                        const std::string& prefix) {
    nlohmann::json j;
    j["rng_seed"] = set.rng_seed;
    j["scenarios"] = nlohmann::json::array();
    for (const Scenario& s : set.scenarios) {
        const std::string file = scenario_file_name(prefix, s.id);
        save_trace(s.spoofed, dir / file);

        nlohmann::json attacks = nlohmann::json::array();
        for (const AttackSpec& a : s.attacks) {
            attacks.push_back({{"onset_index", a.onset_index},
                               {"shift_m", a.shift_m},
                               {"shift_bearing_deg", a.shift_bearing_deg}});
        }
        nlohmann::json segments = nlohmann::json::array();
        for (const SpoofedSegment& seg : s.segments) {
            segments.push_back({seg.first, seg.last});
        }
        j["scenarios"].push_back({{"scenario", s.id},
                                  {"trace", file},
                                  {"labels", file},
                                  {"attacks", attacks},
                                  {"spoofed_segments", segments}});
    }
    atomic_write_file(dir / "manifest.json", j.dump(2) + "\n");
}

std::vector<ManifestEntry> load_scenario_manifest(const std::filesystem::path& manifest_path) {
    nlohmann::json j = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
    if (j.is_discarded() || !j.contains("scenarios")) {
        throw ParseError("malformed scenario manifest: " + manifest_path.string());
    }
    const auto dir = manifest_path.parent_path();
    std::vector<ManifestEntry> entries;
    for (const auto& s : j["scenarios"]) {
        ManifestEntry e;
        e.id = s.at("scenario").get<int>();
        e.trace_path = dir / s.at("trace").get<std::string>();
        e.label_path = dir / s.at("labels").get<std::string>();
        for (const auto& a : s.at("attacks")) {
            AttackSpec spec;
            spec.onset_index = a.at("onset_index").get<std::size_t>();
            spec.shift_m = a.at("shift_m").get<double>();
            spec.shift_bearing_deg = a.at("shift_bearing_deg").get<double>();
            e.attacks.push_back(spec);
        }
        if (s.contains("spoofed_segments")) {
            for (const auto& seg : s["spoofed_segments"]) {
                e.segments.push_back({seg.at(0).get<std::size_t>(), seg.at(1).get<std::size_t>()});
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace spoofdet
