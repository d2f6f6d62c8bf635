#include "pst/geolocation.hpp"

#include <cmath>
#include <string>

#include "pst/error.hpp"
#include "pst/geo.hpp"

namespace pst {

double azimuth_from_pixel(const CameraParams& cam, double u_px) {
  const double hfov = focal_to_vfov(cam.focal_px, cam.image_w);
  return hfov / cam.image_w * (u_px - cam.image_w / 2.0);
}

double horizon_row(const CameraParams& cam) {
  return cam.image_h / 2.0 - cam.focal_px * std::tan(deg_to_rad(cam.pitch_deg));
}

double longitudinal_distance(const CameraParams& cam, double v_px) {
  const double beta = std::atan((cam.image_h / 2.0 - v_px) / cam.focal_px);
  const double theta = kPi / 2.0 - deg_to_rad(cam.pitch_deg) + beta;
  if (!(theta < kPi / 2.0))
    throw AboveHorizonError("pixel row " + std::to_string(v_px) +
                            " is at or above the horizon row " +
                            std::to_string(horizon_row(cam)));
  if (!(theta > 0.0))
    throw DomainError("pixel row maps behind the camera foot");
  return cam.height_m * std::tan(theta);
}

double range_from_longitudinal(double y_m, double omega_c_deg) {
  if (!(std::fabs(omega_c_deg) < 90.0))
    throw DomainError("azimuth must satisfy |omega_c| < 90: " + std::to_string(omega_c_deg));
  return y_m / std::cos(deg_to_rad(omega_c_deg));
}

LocalizationResult localize(const CameraParams& cam, const PixelObservation& px) {
  LocalizationResult r;
  r.omega_c_deg = azimuth_from_pixel(cam, px.u);
  r.y_longitudinal_m = longitudinal_distance(cam, px.v);
  r.obs.distance_m = range_from_longitudinal(r.y_longitudinal_m, r.omega_c_deg);
  r.obs.bearing_deg = wrap360(cam.heading_deg + r.omega_c_deg);
  r.position = geo_offset(cam.position, r.obs);
  return r;
}

Pixel pixel_from_observation(const CameraParams& cam, const PolarObservation& obs) {
  if (!(obs.distance_m > 0.0)) throw DomainError("observation distance must be > 0");
  const double wc = wrap180(obs.bearing_deg - cam.heading_deg);
  if (!(std::fabs(wc) < 90.0))
    throw DomainError("observation lies behind the camera (|omega_c| >= 90)");
  const double hfov = focal_to_vfov(cam.focal_px, cam.image_w);
  const double u = cam.image_w / 2.0 + wc * cam.image_w / hfov;
  const double y = obs.distance_m * std::cos(deg_to_rad(wc));
  const double beta = std::atan2(y, cam.height_m) - kPi / 2.0 + deg_to_rad(cam.pitch_deg);
  const double v = cam.image_h / 2.0 - cam.focal_px * std::tan(beta);
  return {u, v};
}

}  // namespace pst
