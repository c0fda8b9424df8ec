#include "spoofdet/synth.hpp"

#include <algorithm>
#include <cmath>

#include "spoofdet/errors.hpp"
#include "spoofdet/rng.hpp"

namespace spoofdet {

void validate(const SynthConfig& cfg) {
    if (!(cfg.duration_s > 0.0)) throw ValidationError("synth: duration_s must be > 0");
    if (!(cfg.sample_rate_hz > 0.0)) throw ValidationError("synth: sample_rate_hz must be > 0");
    if (!is_valid(cfg.origin)) throw ValidationError("synth: invalid origin");
    if (cfg.speed_max_mps < 0.0) throw ValidationError("synth: speed_max_mps must be >= 0");
    if (cfg.initial_speed_mps < 0.0 || cfg.initial_speed_mps > cfg.speed_max_mps)
        throw ValidationError("synth: initial speed outside [0, speed_max]");
    if (!(cfg.pedal_period_s > 0.0) || !(cfg.steer_period_s > 0.0))
        throw ValidationError("synth: waveform periods must be > 0");
    if (cfg.pedal_noise_pct < 0.0 || cfg.steer_noise_deg < 0.0 || cfg.gps_noise_m < 0.0)
        throw ValidationError("synth: noise amplitudes must be >= 0");
    if (!(cfg.wheelbase_m > 0.0) || !(cfg.steering_ratio > 0.0))
        throw ValidationError("synth: wheelbase and steering ratio must be > 0");
    if (!(cfg.pedal_gain_mps2 >= 0.0)) throw ValidationError("synth: pedal gain must be >= 0");
}

Trace generate_synthetic_trace(const SynthConfig& cfg) {
    validate(cfg);

    const double dt = 1.0 / cfg.sample_rate_hz;
    const auto n_records =
        static_cast<std::size_t>(std::floor(cfg.duration_s * cfg.sample_rate_hz)) + 1;
    if (n_records < 2) {
        throw ValidationError("synth: duration too short for the sample rate");
    }

    // Headroom so a step distance plus the worst-case GPS offsets of its
    // two endpoints never exceeds speed_max * dt.
    const double noise_headroom_mps = 2.0 * std::sqrt(2.0) * cfg.gps_noise_m / dt;
    const double v_cap = std::max(0.0, cfg.speed_max_mps - noise_headroom_mps);
    // drag chosen so steady state at full pedal sits at the cap
    const double drag_per_s = v_cap > 0.0 ? cfg.pedal_gain_mps2 / v_cap : 0.0;

    const double earth_r = EarthModel{}.radius_m;
    const double two_pi = 2.0 * 3.141592653589793;

    Rng rng(cfg.rng_seed);

    double v = std::min(cfg.initial_speed_mps, v_cap);
    double heading = cfg.initial_heading_deg * kDegToRad;
    double lat = cfg.origin.lat_deg * kDegToRad;
    double lon = cfg.origin.lon_deg * kDegToRad;

    std::vector<SensorRecord> records;
    records.reserve(n_records);

    for (std::size_t i = 0; i < n_records; ++i) {
        const double t = static_cast<double>(i) * dt;

        double pedal = cfg.pedal_mean_pct +
                       cfg.pedal_amplitude_pct * std::sin(two_pi * t / cfg.pedal_period_s);
        if (cfg.pedal_noise_pct > 0.0) {
            pedal += rng.uniform(-cfg.pedal_noise_pct, cfg.pedal_noise_pct);
        }
        pedal = std::clamp(pedal, 0.0, 100.0);

        double steer = cfg.steer_amplitude_deg * std::sin(two_pi * t / cfg.steer_period_s);
        if (cfg.steer_noise_deg > 0.0) {
            steer += rng.uniform(-cfg.steer_noise_deg, cfg.steer_noise_deg);
        }

        SensorRecord rec;
        rec.timestamp_s = cfg.start_time_s + static_cast<double>(i) * dt;
        rec.speed_fps = v / kFeetPerSecondToMps;
        rec.steer_deg = steer;
        rec.pedal_pct = pedal;

        double noise_e = 0.0;
        double noise_n = 0.0;
        if (cfg.gps_noise_m > 0.0) {
            noise_e = rng.uniform(-cfg.gps_noise_m, cfg.gps_noise_m);
            noise_n = rng.uniform(-cfg.gps_noise_m, cfg.gps_noise_m);
        }
        rec.position.lat_deg = (lat + noise_n / earth_r) * kRadToDeg;
        rec.position.lon_deg = (lon + noise_e / (earth_r * std::cos(lat))) * kRadToDeg;
        records.push_back(rec);

        // advance state to the next sample (forward Euler, bicycle model)
        const double de = v * std::sin(heading) * dt;
        const double dn = v * std::cos(heading) * dt;
        const double dlat = dn / earth_r;
        const double mid_lat = lat + dlat / 2.0;
        lat += dlat;
        lon += de / (earth_r * std::cos(mid_lat));

        const double wheel_rad = (steer / cfg.steering_ratio) * kDegToRad;
        heading += (v / cfg.wheelbase_m) * std::tan(wheel_rad) * dt;

        const double accel = cfg.pedal_gain_mps2 * (pedal / 100.0) - drag_per_s * v;
        v = std::clamp(v + accel * dt, 0.0, v_cap);
    }

    return make_trace(std::move(records));
}

} // namespace spoofdet
