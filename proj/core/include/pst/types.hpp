#pragma once

#include <vector>

#include "pst/geo.hpp"

namespace pst {

// Per-camera parameter set refined by the optimizer. The position is a fixed
// survey value and is never optimized.
struct CameraParams {
  double focal_px = 0.0;    // > 0, square pixels
  double pitch_deg = 0.0;   // downward tilt, (0, 90)
  double height_m = 0.0;    // mounting height above the road plane, > 0
  double heading_deg = 0.0; // compass bearing of the optical axis, [0, 360)
  GeoPoint position;
  int image_w = 0;
  int image_h = 0;
};

void validate(const CameraParams& p);

// Bottom-center pixel of a vehicle's 2D detection box in one frame.
struct PixelObservation {
  int frame = 0;
  double u = 0.0;  // column, rightward from the left edge
  double v = 0.0;  // row, downward from the top edge
};

struct CameraTrack {
  int track_id = 0;
  std::vector<PixelObservation> observations;  // strictly increasing frame
};

// Validates ordering/non-emptiness; bounds are checked against `owner` when given.
void validate(const CameraTrack& t, const CameraParams* owner = nullptr);

struct LidarState {
  int frame = 0;
  GeoPoint position;
  double face_deg = 0.0;    // vehicle orientation, compass degrees
  double speed_mps = 0.0;   // >= 0
  double distance_m = 0.0;  // to the reference camera, >= 0
};

struct LidarTrack {
  int track_id = 0;
  std::vector<LidarState> states;  // strictly increasing frame
};

void validate(const LidarTrack& t);

}  // namespace pst
