#pragma once

#include <span>

#include "pst/types.hpp"

namespace pst {

struct HeadingConfig {
  double t_stationary_s = 5.0;    // minimum stationary duration for a vote
  double d_max_m = 30.0;          // stationary position must be this close to the camera
  double straightness_tol = 0.02; // max chord deviation as a fraction of chord length
  double mode_bin_deg = 1.0;      // vote bin width; result is a bin center
  double static_eps_m = 1.0;      // displacement below this over the test window counts as still
  double static_window_s = 1.0;   // stride of the stationary displacement test
  double fps = 10.0;
};

// True when no point deviates from the first->last chord by more than
// tol * chord length, measured in local meters. A chord shorter than a meter
// cannot define a direction and fails the test.
// Throws EmptyInputError for fewer than 3 points.
bool check_straight(std::span<const GeoPoint> path, double tol);

// Longest stationary stretch of the track, seconds. A frame counts as
// stationary when the position one test window later has moved less than
// static_eps_m.
double static_find(const LidarTrack& track, const HeadingConfig& cfg);

// Modal heading of straight trajectories that idled near the camera for at
// least t_stationary_s: per retained track, the bearing from its first to its
// last geolocation, voted into mode_bin_deg bins centered on multiples of the
// bin width. Ties go to the bin with more total trajectory length.
// Throws NoRetainedTracksError when every track is filtered out.
double estimate_heading(std::span<const LidarTrack> tracks, const GeoPoint& camera,
                        const HeadingConfig& cfg);

}  // namespace pst
