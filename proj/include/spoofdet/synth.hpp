#ifndef SPOOFDET_SYNTH_HPP
#define SPOOFDET_SYNTH_HPP

#include <cstdint>

#include "spoofdet/geo.hpp"
#include "spoofdet/trace.hpp"

namespace spoofdet {

// Driving profile for the synthetic generator. The vehicle follows a
// kinematic bicycle model: the pedal waveform drives longitudinal
// acceleration (with drag so speed saturates), the steering waveform
// drives heading rate, and speed integrates to positions on the sphere.
//
// Recorded CAN values are the actually-applied (noisy) controls and the
// exact integrated speed, so the trace stays kinematically consistent.
// GPS noise is a bounded uniform offset on the recorded coordinates; the
// integrator reserves speed headroom for it, which keeps every step
// distance at or below speed_max_mps / sample_rate_hz for any config.
struct SynthConfig {
    double duration_s = 60.0;
    double sample_rate_hz = 100.0;
    GeoPoint origin{37.393, -122.077};
    double start_time_s = 1500000000.0;
    std::uint64_t rng_seed = 1;

    double initial_speed_mps = 0.0;
    double speed_max_mps = 30.0;
    double initial_heading_deg = 45.0; // clockwise from north

    double pedal_mean_pct = 35.0;
    double pedal_amplitude_pct = 25.0;
    double pedal_period_s = 37.0;
    double pedal_noise_pct = 2.0;     // uniform, +/- this amplitude
    double pedal_gain_mps2 = 3.0;     // acceleration at 100% pedal

    double steer_amplitude_deg = 120.0; // steering wheel angle
    double steer_period_s = 23.0;
    double steer_noise_deg = 1.5;       // uniform, +/- this amplitude

    double wheelbase_m = 2.7;
    double steering_ratio = 15.0; // wheel angle = steer_deg / ratio

    double gps_noise_m = 0.005; // uniform, +/- per east/north component
};

void validate(const SynthConfig& cfg);

// Deterministic under cfg.rng_seed; identical configs produce
// bit-identical traces.
Trace generate_synthetic_trace(const SynthConfig& cfg);

} // namespace spoofdet

#endif
