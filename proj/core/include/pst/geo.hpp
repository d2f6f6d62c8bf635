#pragma once

namespace pst {

inline constexpr double kPi = 3.14159265358979323846;

// Spherical Earth radius, meters. All geodesy in this library derives from it.
inline constexpr double kEarthRadiusM = 6371.393e3;

// Meters per degree of latitude on the sphere above.
inline constexpr double kMetersPerDegLat = kEarthRadiusM * 2.0 * kPi / 360.0;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// Normalizes an angle in degrees to [0, 360).
double wrap360(double deg);

// Normalizes an angle in degrees to [-180, 180).
double wrap180(double deg);

// Absolute angular difference on the circle, in [0, 180].
double angle_diff_deg(double a_deg, double b_deg);

// WGS-84-style latitude/longitude pair, degrees.
struct GeoPoint {
  double lat = 0.0;  // [-90, 90]
  double lon = 0.0;  // [-180, 180]
};

// Range and compass bearing of a target relative to an observer.
struct PolarObservation {
  double distance_m = 0.0;   // > 0
  double bearing_deg = 0.0;  // clockwise from North, [0, 360)
};

void validate(const GeoPoint& p);
void validate(const PolarObservation& o);

// Destination point reached from `origin` after `obs.distance_m` meters along
// compass bearing `obs.bearing_deg`. Local spherical approximation; the
// longitude increment scales with the cosine of the destination latitude.
GeoPoint geo_offset(const GeoPoint& origin, const PolarObservation& obs);

// Inverse of geo_offset: range and bearing from `origin` to `target`.
// Closed form, since the forward longitude term uses the destination latitude
// which the latitude equation determines on its own.
// Throws DegenerateInputError when the points coincide.
PolarObservation geo_inverse(const GeoPoint& origin, const GeoPoint& target);

// Convenience: geo_inverse distance, 0 for identical points.
double geo_distance_m(const GeoPoint& a, const GeoPoint& b);

}  // namespace pst
