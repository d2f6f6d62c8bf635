#pragma once

#include <set>
#include <span>
#include <utility>
#include <vector>

#include "pst/types.hpp"

namespace pst {

struct FilterConfig {
  double t_angle_deg = 5.0;   // max |mean face - heading| inside the fusion area
  double t_dist_m = 50.0;     // min track distance must come within this range
  double t_speed_mps = 2.0;   // max speed below this is a stationary vehicle
  double t_pixel = 600.0;     // rows above this sit too close to the horizon
  double displacement_eps_px = 0.5;  // |mean row displacement| below this is stationary
};

// Dense nonnegative cost matrix between camera tracks (rows) and lidar tracks
// (columns).
struct WeightMatrix {
  std::vector<int> camera_ids;
  std::vector<int> lidar_ids;
  std::vector<std::vector<double>> w;
};

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (camera_id, lidar_id)
  double total_cost = 0.0;
};

// Copy of the track with distance_m recomputed against `camera`.
LidarTrack with_distance_to(const LidarTrack& track, const GeoPoint& camera);

// Retains lidar tracks inside the fusion area: mean face within t_angle_deg of
// the camera heading (on the circle), min distance within t_dist_m, max speed
// at least t_speed_mps.
std::vector<int> filter_lidar(std::span<const LidarTrack> tracks, double heading_deg,
                              const FilterConfig& cfg);

// Retains camera tracks that stay below row t_pixel (near vehicles sit low in
// the image) and recede: mean per-frame row displacement below
// -displacement_eps_px.
std::vector<int> filter_camera(std::span<const CameraTrack> tracks, const FilterConfig& cfg);

// w[i][j] = k1 * |d_i - d_j| + k2 * |omega_i - omega_j| with the angle residual
// wrapped to [0, 180]. First-frame observations on both sides.
WeightMatrix build_weights(const std::vector<int>& camera_ids,
                           std::span<const PolarObservation> camera_first,
                           const std::vector<int>& lidar_ids,
                           std::span<const PolarObservation> lidar_first,
                           double k1, double k2);

// Minimum-total-cost matching on the smaller side (Kuhn-Munkres). Ties are
// broken toward the lexicographically smallest pair list, so the result is
// deterministic.
Assignment assign(const WeightMatrix& wm);

using PairBan = std::set<std::pair<int, int>>;

struct AssociationResult {
  Assignment assignment;
  std::vector<int> camera_retained;
  std::vector<int> lidar_retained;
  int camera_skipped = 0;  // retained tracks that were not localizable under the params
};

// Full first-frame association pipeline: outlier filtering on both sides,
// localization of camera first frames under `params`, polar conversion of
// lidar first frames, weight construction and assignment. `banned` pairs are
// excluded; callers retry with a grown ban list when the optimizer fails to
// converge. Throws EmptyInputError when a side has no usable track.
AssociationResult associate(std::span<const CameraTrack> camera_tracks,
                            std::span<const LidarTrack> lidar_tracks,
                            const CameraParams& params, const FilterConfig& cfg,
                            double k1, double k2, const PairBan* banned = nullptr);

}  // namespace pst
