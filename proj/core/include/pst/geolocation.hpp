#pragma once

#include "pst/camera_model.hpp"
#include "pst/types.hpp"

namespace pst {

// Everything the optimizer needs from one localized pixel.
struct LocalizationResult {
  double omega_c_deg = 0.0;    // in-image azimuth, signed; negative left of center
  PolarObservation obs;        // range D and compass bearing omega_d
  GeoPoint position;           // geo_offset(camera.position, obs)
  double y_longitudinal_m = 0.0;
};

// Signed horizontal angle between the pixel column and the optical axis.
// Linear in the column: omega_c = hfov/w * (u - w/2), hfov = 2 atan(w/(2f)).
double azimuth_from_pixel(const CameraParams& cam, double u_px);

// Image row of the horizon implied by (f, pitch): h/2 - f tan(pitch).
double horizon_row(const CameraParams& cam);

// Ground distance along the optical axis for a pixel row:
//   Y = H tan(pi/2 - pitch + atan((h/2 - v)/f)).
// Throws AboveHorizonError for rows at or above the horizon.
double longitudinal_distance(const CameraParams& cam, double v_px);

// D = Y / cos(omega_c). Throws DomainError at |omega_c| >= 90 degrees.
double range_from_longitudinal(double y_m, double omega_c_deg);

// Full chain: pixel -> azimuth -> bearing -> longitudinal distance -> range ->
// geolocation. Intermediate values are exposed for the optimizer.
LocalizationResult localize(const CameraParams& cam, const PixelObservation& px);

// Exact inverse of localize: the pixel whose localization reproduces `obs`.
// Throws DomainError when the observation lies outside the forward half-plane.
Pixel pixel_from_observation(const CameraParams& cam, const PolarObservation& obs);

}  // namespace pst
