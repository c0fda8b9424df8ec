#ifndef SPOOFDET_ATTACK_HPP
#define SPOOFDET_ATTACK_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spoofdet/trace.hpp"

namespace spoofdet {

inline constexpr double kShiftMinM = 50.0;
inline constexpr double kShiftMaxM = 180.0;
inline constexpr int kScenarioCount = 10;

// A location-shift attack: every GPS position from onset_index onward is
// displaced by shift_m along shift_bearing_deg. The spoofed route mirrors
// the real one, so relative motion after the onset is preserved and the
// detectable signature is the discontinuity at the onset step.
struct AttackSpec {
    std::size_t onset_index = 0;   // record index where the shift occurs
    double shift_m = 0.0;          // [50, 180]
    double shift_bearing_deg = 0.0;
};

struct InjectionResult {
    Trace spoofed;
    std::vector<std::uint8_t> labels; // per step; 1 only at the onset step
};

// Record index range [first, last] over which an attack's displacement is
// the most recent one applied. Kept as metadata; scoring uses the
// per-onset labels.
struct SpoofedSegment {
    std::size_t first = 0;
    std::size_t last = 0;
};

struct Scenario {
    int id = 0; // 1-based
    Trace spoofed;
    std::vector<AttackSpec> attacks;
    std::vector<SpoofedSegment> segments;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::uint64_t rng_seed = 0;
};

InjectionResult inject_attack(const Trace& trace, const AttackSpec& spec);

// Applies attacks in ascending onset order; an empty list returns the
// trace unchanged. Labels mark each onset step.
InjectionResult apply_attacks(const Trace& trace, std::vector<AttackSpec> specs);

// Ten scenarios with strictly decreasing attack counts (scenario 1 has
// ten, scenario 10 has one), shift magnitudes uniform in [50, 180] m,
// bearings uniform in [0, 360), onsets separated by min_onset_gap steps.
ScenarioSet generate_scenario_set(const Trace& trace, std::uint64_t rng_seed,
                                  std::size_t min_onset_gap = 100);

// Manifest JSON listing per-scenario trace file, attack specs, and label
// file (the trace CSV's label column). Scenario traces must already have
// been written as <prefix>NN.csv next to the manifest.
void write_scenario_set(const ScenarioSet& set, const std::filesystem::path& dir,
                        const std::string& prefix = "scenario_");

struct ManifestEntry {
    int id = 0;
    std::filesystem::path trace_path;
    std::filesystem::path label_path;
    std::vector<AttackSpec> attacks;
    std::vector<SpoofedSegment> segments;
};

std::vector<ManifestEntry> load_scenario_manifest(const std::filesystem::path& manifest_path);

} // namespace spoofdet

#endif
