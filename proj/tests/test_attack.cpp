#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "spoofdet/attack.hpp"
#include "spoofdet/errors.hpp"
#include "spoofdet/synth.hpp"
#include "test_util.hpp"

using namespace spoofdet;

namespace {

Trace stationary_trace(std::size_t n) {
    std::vector<SensorRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        records[i].timestamp_s = static_cast<double>(i) * 0.01;
        records[i].position = {37.393, -122.077};
    }
    return make_trace(std::move(records));
}

Trace moving_trace(std::size_t n, double step_m) {
    // straight north at step_m per sample
    const double dlat = step_m / EarthModel{}.radius_m * kRadToDeg;
    std::vector<SensorRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        records[i].timestamp_s = static_cast<double>(i) * 0.01;
        records[i].position = {37.0 + dlat * static_cast<double>(i), -122.077};
        records[i].speed_fps = step_m * 100.0 / kFeetPerSecondToMps;
    }
    return make_trace(std::move(records));
}

Trace curvy_trace(double duration_s, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.duration_s = duration_s;
    cfg.rng_seed = seed;
    return generate_synthetic_trace(cfg);
}

} // namespace

TEST_CASE("shift on a stationary trace shows up only at the onset step") {
    const Trace clean = stationary_trace(20);
    AttackSpec spec{10, 100.0, 45.0};
    const InjectionResult result = inject_attack(clean, spec);

    REQUIRE(result.labels.size() == clean.step_count());
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        // step i arrives at record i+1; the onset step is the one arriving
        // at the onset record
        const bool is_onset_step = i + 1 == spec.onset_index;
        CHECK(result.labels[i] == (is_onset_step ? 1 : 0));
        if (is_onset_step) {
            CHECK(result.spoofed.step_distance_m[i] == doctest::Approx(100.0).epsilon(1e-9));
        } else {
            CHECK(result.spoofed.step_distance_m[i] == doctest::Approx(0.0).scale(1e-9));
        }
    }
}

TEST_CASE("moving trace: onset distance verified by direct recomputation") {
    const Trace clean = moving_trace(40, 1.0);
    AttackSpec spec{25, 50.0, 310.0};
    const InjectionResult result = inject_attack(clean, spec);

    // triangle inequality around the 50 m shift with 1 m of vehicle motion
    const double onset_d = result.spoofed.step_distance_m[spec.onset_index - 1];
    CHECK(onset_d >= 49.0);
    CHECK(onset_d <= 51.0);

    // oracle: recompute the onset step from the stored positions
    const double recomputed =
        haversine_distance(result.spoofed.records[spec.onset_index - 1].position,
                           result.spoofed.records[spec.onset_index].position);
    CHECK(onset_d == recomputed);

    // and the displaced onset record is shift_m away from its clean twin
    CHECK(haversine_distance(clean.records[spec.onset_index].position,
                             result.spoofed.records[spec.onset_index].position) ==
          doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("label series sums to one for a single attack") {
    const Trace clean = curvy_trace(5.0, 3);
    const InjectionResult result = inject_attack(clean, {200, 120.0, 200.0});
    CHECK(std::accumulate(result.labels.begin(), result.labels.end(), 0) == 1);
}

TEST_CASE("clean steps keep their distances within 1e-6 m") {
    const Trace clean = curvy_trace(8.0, 9);
    std::vector<AttackSpec> specs{{150, 60.0, 10.0}, {420, 180.0, 250.0}, {700, 97.5, 120.0}};
    const InjectionResult result = apply_attacks(clean, specs);

    std::set<std::size_t> onset_steps;
    for (const auto& s : specs) onset_steps.insert(s.onset_index - 1);

    for (std::size_t i = 0; i < clean.step_count(); ++i) {
        if (onset_steps.count(i)) {
            // lower bound from the triangle inequality at a labeled step
            CHECK(result.spoofed.step_distance_m[i] >=
                  60.0 - clean.step_distance_m[i] - 1e-6);
        } else {
            CHECK(std::abs(result.spoofed.step_distance_m[i] - clean.step_distance_m[i]) <=
                  1e-6);
        }
    }
}

TEST_CASE("empty attack list returns the trace unchanged bit-exactly") {
    const Trace clean = curvy_trace(2.0, 5);
    const InjectionResult result = apply_attacks(clean, {});
    REQUIRE(result.spoofed.size() == clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) {
        CHECK(result.spoofed.records[i].position.lat_deg == clean.records[i].position.lat_deg);
        CHECK(result.spoofed.records[i].position.lon_deg == clean.records[i].position.lon_deg);
    }
    CHECK(std::accumulate(result.labels.begin(), result.labels.end(), 0) == 0);
}

TEST_CASE("invalid specs are rejected") {
    const Trace clean = stationary_trace(10);
    CHECK_THROWS_AS(inject_attack(clean, {0, 100.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(inject_attack(clean, {10, 100.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(inject_attack(clean, {5, 49.9, 0.0}), ValidationError);
    CHECK_THROWS_AS(inject_attack(clean, {5, 180.1, 0.0}), ValidationError);
}

TEST_CASE("scenario set: counts, ranges, gaps, determinism") {
    const Trace clean = curvy_trace(15.0, 77); // 1501 records
    const ScenarioSet set = generate_scenario_set(clean, 1234);

    REQUIRE(set.scenarios.size() == kScenarioCount);
    for (int i = 0; i < kScenarioCount; ++i) {
        const Scenario& s = set.scenarios[i];
        CHECK(s.id == i + 1);
        CHECK(s.attacks.size() == static_cast<std::size_t>(kScenarioCount - i));
        if (i > 0) {
            CHECK(s.attacks.size() < set.scenarios[i - 1].attacks.size());
        }
        for (std::size_t a = 0; a < s.attacks.size(); ++a) {
            CHECK(s.attacks[a].shift_m >= kShiftMinM);
            CHECK(s.attacks[a].shift_m <= kShiftMaxM);
            CHECK(s.attacks[a].onset_index >= 2);
            CHECK(s.attacks[a].onset_index < clean.size());
            if (a > 0) {
                CHECK(s.attacks[a].onset_index - s.attacks[a - 1].onset_index >= 100);
            }
        }
        REQUIRE(s.segments.size() == s.attacks.size());
        for (std::size_t a = 0; a + 1 < s.segments.size(); ++a) {
            CHECK(s.segments[a].last + 1 == s.segments[a + 1].first);
        }
        CHECK(s.segments.back().last == clean.size() - 1);
    }

    const ScenarioSet again = generate_scenario_set(clean, 1234);
    for (int i = 0; i < kScenarioCount; ++i) {
        REQUIRE(again.scenarios[i].attacks.size() == set.scenarios[i].attacks.size());
        for (std::size_t a = 0; a < set.scenarios[i].attacks.size(); ++a) {
            CHECK(again.scenarios[i].attacks[a].onset_index ==
                  set.scenarios[i].attacks[a].onset_index);
            CHECK(again.scenarios[i].attacks[a].shift_m == set.scenarios[i].attacks[a].shift_m);
        }
    }
}

TEST_CASE("scenario generation rejects short traces") {
    const Trace tiny = stationary_trace(50);
    CHECK_THROWS_WITH_AS(generate_scenario_set(tiny, 1), doctest::Contains("too short"),
                         ValidationError);
}

TEST_CASE("scenario set round-trips through the manifest") {
    const Trace clean = curvy_trace(15.0, 21);
    const ScenarioSet set = generate_scenario_set(clean, 99);

    testutil::TempDir dir("attack_manifest");
    write_scenario_set(set, dir.path());

    const auto entries = load_scenario_manifest(dir.file("manifest.json"));
    REQUIRE(entries.size() == kScenarioCount);
    for (int i = 0; i < kScenarioCount; ++i) {
        CHECK(entries[i].id == set.scenarios[i].id);
        CHECK(entries[i].attacks.size() == set.scenarios[i].attacks.size());
        CHECK(entries[i].trace_path == entries[i].label_path);

        const Trace loaded = load_trace(entries[i].trace_path);
        REQUIRE(loaded.labeled());
        const auto labels = step_labels(loaded);
        std::size_t label_count = 0;
        for (auto l : labels) label_count += l;
        CHECK(label_count == set.scenarios[i].attacks.size());
    }
}
