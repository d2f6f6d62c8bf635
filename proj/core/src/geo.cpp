#include "pst/geo.hpp"

#include <cmath>
#include <string>

#include "pst/error.hpp"

namespace pst {

double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // fmod of a tiny negative can round back up to 360
  return r;
}

double wrap180(double deg) { return wrap360(deg + 180.0) - 180.0; }

double angle_diff_deg(double a_deg, double b_deg) { return std::fabs(wrap180(a_deg - b_deg)); }

void validate(const GeoPoint& p) {
  if (!(p.lat >= -90.0 && p.lat <= 90.0))
    throw DomainError("latitude out of [-90, 90]: " + std::to_string(p.lat));
  if (!(p.lon >= -180.0 && p.lon <= 180.0))
    throw DomainError("longitude out of [-180, 180]: " + std::to_string(p.lon));
}

void validate(const PolarObservation& o) {
  if (!(o.distance_m > 0.0)) throw DomainError("polar distance must be > 0");
  if (!(o.bearing_deg >= 0.0 && o.bearing_deg < 360.0))
    throw DomainError("bearing must lie in [0, 360): " + std::to_string(o.bearing_deg));
}

GeoPoint geo_offset(const GeoPoint& origin, const PolarObservation& obs) {
  const double brg = deg_to_rad(obs.bearing_deg);
  const double lat = origin.lat + obs.distance_m * std::cos(brg) / kMetersPerDegLat;
  const double lon = origin.lon + obs.distance_m * std::sin(brg) /
                                      (kMetersPerDegLat * std::cos(deg_to_rad(lat)));
  return {lat, lon};
}

PolarObservation geo_inverse(const GeoPoint& origin, const GeoPoint& target) {
  if (origin.lat == target.lat && origin.lon == target.lon)
    throw DegenerateInputError("geo_inverse: origin and target coincide, bearing undefined");
  const double north = (target.lat - origin.lat) * kMetersPerDegLat;
  const double east =
      (target.lon - origin.lon) * kMetersPerDegLat * std::cos(deg_to_rad(target.lat));
  const double dist = std::hypot(north, east);
  const double brg = wrap360(rad_to_deg(std::atan2(east, north)));
  return {dist, brg};
}

double geo_distance_m(const GeoPoint& a, const GeoPoint& b) {
  if (a.lat == b.lat && a.lon == b.lon) return 0.0;
  return geo_inverse(a, b).distance_m;
}

}  // namespace pst
