#ifndef SPOOFDET_GEO_HPP
#define SPOOFDET_GEO_HPP

namespace spoofdet {

// Position in degrees, matching the trace file columns. Converted to
// radians only inside the distance math.
struct GeoPoint {
    double lat_deg = 0.0; // [-90, 90]
    double lon_deg = 0.0; // [-180, 180]
};

// Single-radius sphere. The pipeline is calibrated against this exact
// radius; it is not meant to be changed per call site.
struct EarthModel {
    double radius_m = 6378000.0;
};

bool is_valid(const GeoPoint& p);

// Great-circle distance in meters. Throws ValidationError on non-finite
// or out-of-range coordinates. Result is in [0, pi * radius].
double haversine_distance(const GeoPoint& a, const GeoPoint& b,
                          const EarthModel& earth = EarthModel{});

// Point reached from `start` after traveling `distance_m` along the
// initial bearing (degrees clockwise from north) on the sphere.
GeoPoint move_point(const GeoPoint& start, double distance_m, double bearing_deg,
                    const EarthModel& earth = EarthModel{});

inline constexpr double kDegToRad = 0.017453292519943295;
inline constexpr double kRadToDeg = 57.29577951308232;

} // namespace spoofdet

#endif
