#ifndef SPOOFDET_TRACE_HPP
#define SPOOFDET_TRACE_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spoofdet/geo.hpp"

namespace spoofdet {

inline constexpr double kFeetPerSecondToMps = 0.3048;

// One time-synchronized GPS + CAN sample. Speed stays in ft/s as it
// appears in the files; convert with kFeetPerSecondToMps where it meets
// metric quantities.
struct SensorRecord {
    double timestamp_s = 0.0;
    GeoPoint position;
    double speed_fps = 0.0;
    double steer_deg = 0.0; // steering wheel angle
    double pedal_pct = 0.0; // relative accelerator pedal position
};

// An ordered drive. step_distance_m[i] is the great-circle distance from
// records[i] to records[i+1], so step i+1 "arrives at" record i+1.
// record_labels, when non-empty, has one 0/1 entry per record; 1 marks a
// record that is the first displaced sample of an injected attack.
struct Trace {
    std::vector<SensorRecord> records;
    std::vector<double> step_distance_m;
    std::vector<std::uint8_t> record_labels;

    std::size_t size() const { return records.size(); }
    std::size_t step_count() const { return step_distance_m.size(); }
    bool labeled() const { return !record_labels.empty(); }
};

// Validates monotone timestamps / finite values and fills step distances.
Trace make_trace(std::vector<SensorRecord> records,
                 std::vector<std::uint8_t> record_labels = {});

// Per-step ground-truth flags, aligned with step_distance_m: the step
// arriving at record i carries record i's label.
std::vector<std::uint8_t> step_labels(const Trace& trace);

// CSV with header timestamp,lat,lon,speed_fps,steer_deg,pedal_pct and an
// optional trailing label column. Values round-trip bit-exactly.
Trace load_trace(const std::filesystem::path& path);
void save_trace(const Trace& trace, const std::filesystem::path& path);

struct GpsSample {
    double timestamp_s = 0.0;
    GeoPoint position;
};

struct CanSample {
    double timestamp_s = 0.0;
    double speed_fps = 0.0;
    double steer_deg = 0.0;
    double pedal_pct = 0.0;
};

// Resamples CAN onto the GPS clock: one record per GPS timestamp that
// falls inside CAN coverage, CAN values from the nearest-in-time sample,
// ties toward the earlier one. GPS timestamps outside coverage are
// dropped; no temporal overlap at all is an error.
Trace synchronize(const std::vector<GpsSample>& gps_stream,
                  const std::vector<CanSample>& can_stream);

} // namespace spoofdet

#endif
