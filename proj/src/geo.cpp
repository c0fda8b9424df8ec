#include "spoofdet/geo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spoofdet/errors.hpp"

namespace spoofdet {

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) &&
           p.lat_deg >= -90.0 && p.lat_deg <= 90.0 &&
           p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

static void require_valid(const GeoPoint& p, const char* which) {
    if (!is_valid(p)) {
        std::ostringstream oss;
        oss << "invalid coordinates for point " << which << ": lat=" << p.lat_deg
            << " lon=" << p.lon_deg;
        throw ValidationError(oss.str());
    }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth) {
    require_valid(a, "a");
    require_valid(b, "b");

    const double lat1 = a.lat_deg * kDegToRad;
    const double lat2 = b.lat_deg * kDegToRad;
    const double dlat = (b.lat_deg - a.lat_deg) * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;

    const double sin_lat = std::sin(dlat / 2.0);
    const double sin_lon = std::sin(dlon / 2.0);
    double h = sin_lat * sin_lat + std::cos(lat1) * std::cos(lat2) * sin_lon * sin_lon;
    // rounding can push h just outside [0,1] for near-antipodal points
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * earth.radius_m * std::asin(std::sqrt(h));
}

GeoPoint move_point(const GeoPoint& start, double distance_m, double bearing_deg,
                    const EarthModel& earth) {
    require_valid(start, "start");
    if (!std::isfinite(distance_m) || distance_m < 0.0) {
        throw ValidationError("move_point: distance must be finite and >= 0");
    }

    const double lat1 = start.lat_deg * kDegToRad;
    const double lon1 = start.lon_deg * kDegToRad;
    const double bearing = bearing_deg * kDegToRad;
    const double ang = distance_m / earth.radius_m;

    const double sin_lat2 =
        std::sin(lat1) * std::cos(ang) + std::cos(lat1) * std::sin(ang) * std::cos(bearing);
    const double lat2 = std::asin(std::clamp(sin_lat2, -1.0, 1.0));
    const double lon2 = lon1 + std::atan2(std::sin(bearing) * std::sin(ang) * std::cos(lat1),
                                          std::cos(ang) - std::sin(lat1) * sin_lat2);

    GeoPoint out{lat2 * kRadToDeg, lon2 * kRadToDeg};
    if (out.lon_deg > 180.0) out.lon_deg -= 360.0;
    if (out.lon_deg < -180.0) out.lon_deg += 360.0;
    return out;
}

} // namespace spoofdet
