#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "pst/association.hpp"
#include "pst/geo.hpp"
#include "pst/geolocation.hpp"
#include "pst/optimizer.hpp"
#include "pst/simulator.hpp"

namespace pst::testing {

// 25 frames of one vehicle: video (distance m, angle deg) vs lidar
// (distance m, angle deg). Used as a regression and metrics fixture.
inline constexpr std::array<std::array<double, 4>, 25> kVideoLidarFrames = {{
    {60.59, 275.87, 60.61, 273.30}, {60.50, 275.31, 60.34, 272.96},
    {60.19, 274.79, 60.10, 272.57}, {60.02, 274.35, 59.70, 272.06},
    {59.76, 273.80, 59.27, 271.63}, {59.28, 273.13, 58.89, 271.11},
    {59.07, 272.54, 58.71, 270.68}, {58.84, 271.84, 58.39, 270.15},
    {58.36, 271.41, 58.10, 269.69}, {58.07, 270.89, 57.68, 269.16},
    {57.61, 270.33, 57.38, 268.70}, {57.32, 269.80, 56.83, 268.15},
    {57.29, 269.42, 56.41, 267.68}, {56.66, 268.62, 56.01, 267.11},
    {55.94, 267.68, 55.65, 266.63}, {55.62, 267.25, 55.26, 266.06},
    {55.48, 266.77, 54.90, 265.57}, {55.18, 266.40, 54.47, 264.99},
    {54.48, 265.59, 54.16, 264.51}, {54.09, 264.96, 53.61, 263.92},
    {53.57, 264.46, 53.19, 263.42}, {53.31, 263.98, 52.72, 262.82},
    {52.66, 263.18, 52.19, 262.32}, {52.10, 262.68, 51.60, 261.72},
    {51.62, 261.90, 51.16, 261.21},
}};

// 3x3 weight matrix between video tracks {1, 6, 12} and lidar tracks
// {9, 42, 84}; it has two exactly tied optimal assignments.
inline WeightMatrix reference_weight_matrix() {
  WeightMatrix wm;
  wm.camera_ids = {1, 6, 12};
  wm.lidar_ids = {9, 42, 84};
  wm.w = {{31.68642907, 27.60446205, 17.84351904},
          {19.32752349, 17.20332513, 13.44238212},
          {25.31265037, 21.23068335, 11.46974034}};
  return wm;
}

// Parameter set the reference deployment converged to (west-facing 4K camera).
inline CameraParams reference_camera() {
  CameraParams cam;
  cam.focal_px = 3362.7385;
  cam.pitch_deg = 8.6503;
  cam.height_m = 9.3041;
  cam.heading_deg = 275.6085;
  cam.position = {30.0, 120.0};
  cam.image_w = 3840;
  cam.image_h = 2160;
  return cam;
}

// Ground-truth camera for synthetic scenes: same optics, but a height that
// leaves room inside the box constraints for a +2 m perturbation.
inline CameraParams west_scene_camera() {
  CameraParams cam = reference_camera();
  cam.height_m = 7.5;
  cam.pitch_deg = 8.6503;
  cam.heading_deg = 270.0;
  return cam;
}

// 1080p wide-angle camera (hfov 60 deg) used by the outlier-filter scenes,
// where the 600-pixel row threshold is meaningful.
inline CameraParams filter_scene_camera() {
  CameraParams cam;
  cam.image_w = 1920;
  cam.image_h = 1080;
  cam.focal_px = 960.0 / std::tan(deg_to_rad(30.0));
  cam.pitch_deg = 8.0;
  cam.height_m = 7.5;
  cam.heading_deg = 270.0;
  cam.position = {30.0, 120.0};
  return cam;
}

inline TrajectorySpec straight_vehicle(double east, double north, double heading, double speed) {
  TrajectorySpec v;
  v.kind = TrajectorySpec::Kind::kStraight;
  v.start_east_m = east;
  v.start_north_m = north;
  v.heading_deg = heading;
  v.speed_mps = speed;
  return v;
}

inline TrajectorySpec stop_go_vehicle(double east, double north, double heading, double speed,
                                      double stop_s) {
  TrajectorySpec v;
  v.kind = TrajectorySpec::Kind::kStationaryThenGo;
  v.start_east_m = east;
  v.start_north_m = north;
  v.heading_deg = heading;
  v.speed_mps = speed;
  v.stop_duration_s = stop_s;
  return v;
}

inline TrajectorySpec parked_vehicle(double east, double north, double heading) {
  TrajectorySpec v = stop_go_vehicle(east, north, heading, 0.0, 1e9);
  return v;
}

inline TrajectorySpec turning_vehicle(double east, double north, double heading, double speed,
                                      double turn_start_s, double turn_rate_deg_s) {
  TrajectorySpec v;
  v.kind = TrajectorySpec::Kind::kTurn;
  v.start_east_m = east;
  v.start_north_m = north;
  v.heading_deg = heading;
  v.speed_mps = speed;
  v.turn_start_s = turn_start_s;
  v.turn_rate_deg_s = turn_rate_deg_s;
  v.turn_duration_s = 5.0;
  return v;
}

// One west-facing camera, n receding westbound vehicles spread in range and
// across lanes. The workhorse for optimizer and association scenes.
inline SceneConfig westbound_scene(std::uint64_t seed, int n_vehicles = 6,
                                   double duration_s = 5.0) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.duration_s = duration_s;
  cfg.cameras.push_back(west_scene_camera());
  const double lanes[3] = {0.0, 3.5, -3.5};
  for (int i = 0; i < n_vehicles; ++i) {
    const double start = -20.0 - 9.0 * i - 0.7 * double(seed % 5);
    const double speed = 6.0 + 0.7 * (i % 4) + 0.1 * double(seed % 3);
    cfg.vehicles.push_back(straight_vehicle(start, lanes[i % 3], 270.0, speed));
  }
  return cfg;
}

// Start-up-window scene for the outlier filters: five fusion vehicles
// (westbound, near, moving), two opposing, two parked in view, one far
// westbound. Zero noise; the expected fusion set is the first five.
inline SceneConfig filter_scene() {
  SceneConfig cfg;
  cfg.seed = 7;
  cfg.duration_s = 5.0;
  cfg.cameras.push_back(filter_scene_camera());
  cfg.vehicles.push_back(straight_vehicle(-16.0, 0.0, 270.0, 3.5));   // fusion
  cfg.vehicles.push_back(straight_vehicle(-18.0, 3.5, 270.0, 3.6));   // fusion
  cfg.vehicles.push_back(straight_vehicle(-20.0, -3.5, 270.0, 3.4));  // fusion
  cfg.vehicles.push_back(straight_vehicle(-22.0, 7.0, 270.0, 3.2));   // fusion
  cfg.vehicles.push_back(straight_vehicle(-24.0, -7.0, 270.0, 3.0));  // fusion
  cfg.vehicles.push_back(straight_vehicle(-45.0, -10.5, 90.0, 8.0));  // opposing
  cfg.vehicles.push_back(straight_vehicle(-50.0, -12.0, 90.0, 7.0));  // opposing
  cfg.vehicles.push_back(parked_vehicle(-25.0, 10.5, 270.0));         // parked
  cfg.vehicles.push_back(parked_vehicle(-30.0, -14.0, 270.0));        // parked
  cfg.vehicles.push_back(straight_vehicle(-60.0, 0.0, 270.0, 8.0));   // too far
  return cfg;
}

inline std::vector<int> filter_scene_fusion_vehicles() { return {0, 1, 2, 3, 4}; }

// Start-up scene mirroring a westbound arm: eight westbound and two eastbound
// stop-and-go vehicles plus three turners. The road bearing is exactly 270.
inline SceneConfig heading_scene(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.duration_s = 15.0;
  cfg.cameras.push_back(west_scene_camera());
  for (int i = 0; i < 8; ++i) {
    const double east = -8.0 - 2.0 * i;
    const double north = (i % 2 == 0) ? 0.0 : 3.5;
    cfg.vehicles.push_back(stop_go_vehicle(east, north, 270.0, 8.0, 5.5 + 0.2 * i));
  }
  cfg.vehicles.push_back(stop_go_vehicle(-24.0, -3.5, 90.0, 8.0, 6.0));
  cfg.vehicles.push_back(stop_go_vehicle(-20.0, -7.0, 90.0, 8.0, 6.5));
  cfg.vehicles.push_back(turning_vehicle(-3.5, 25.0, 180.0, 6.0, 3.0, -18.0));
  cfg.vehicles.push_back(turning_vehicle(3.5, 35.0, 180.0, 6.0, 4.0, 18.0));
  cfg.vehicles.push_back(turning_vehicle(-40.0, -25.0, 0.0, 6.0, 3.5, 18.0));
  return cfg;
}

// Four cameras on the four approach roads, all aimed at the intersection
// core, with crossing traffic on every arm and one departing stop-and-go
// vehicle per camera (the heading voter).
inline SceneConfig intersection_scene(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.duration_s = 12.0;

  auto camera_at = [](double east, double north, double heading) {
    CameraParams cam = west_scene_camera();
    cam.heading_deg = heading;
    const double d = std::hypot(east, north);
    if (d > 0.0)
      cam.position = geo_offset(cam.position,
                                {d, wrap360(rad_to_deg(std::atan2(east, north)))});
    return cam;
  };
  cfg.cameras.push_back(camera_at(40.0, 0.0, 270.0));   // on the east arm, facing west
  cfg.cameras.push_back(camera_at(-40.0, 0.0, 90.0));   // west arm, facing east
  cfg.cameras.push_back(camera_at(0.0, 40.0, 180.0));   // north arm, facing south
  cfg.cameras.push_back(camera_at(0.0, -40.0, 0.0));    // south arm, facing north

  struct Arm {
    double heading;
    double lane_east, lane_north;  // unit lane offset (right side of travel)
    double dir_east, dir_north;    // travel direction
  };
  const Arm arms[4] = {
      {270.0, 0.0, 3.5, -1.0, 0.0},  // westbound, north lane
      {90.0, 0.0, -3.5, 1.0, 0.0},   // eastbound, south lane
      {180.0, -3.5, 0.0, 0.0, -1.0}, // southbound, west lane
      {0.0, 3.5, 0.0, 0.0, 1.0},     // northbound, east lane
  };
  for (int a = 0; a < 4; ++a) {
    const Arm& arm = arms[a];
    for (int i = 0; i < 3; ++i) {
      const double back = 25.0 + 6.0 * i;  // start behind the center, crossing it
      cfg.vehicles.push_back(straight_vehicle(-arm.dir_east * back + arm.lane_east,
                                              -arm.dir_north * back + arm.lane_north,
                                              arm.heading, 7.0 + 0.8 * i));
    }
    // Departing vehicle stopped 20 m out from its camera, inside its view.
    cfg.vehicles.push_back(stop_go_vehicle(arm.dir_east * 20.0 + arm.lane_east,
                                           arm.dir_north * 20.0 + arm.lane_north, arm.heading,
                                           8.0, 6.0));
  }
  return cfg;
}

// Training samples from the ground-truth correspondence of one camera: pixel
// observations paired with the exact polar truth seen from the camera.
inline std::vector<TrainingSample> samples_from_scene(const GroundTruthScene& scene,
                                                      int camera_index, int frame_stride = 1) {
  std::vector<TrainingSample> samples;
  const CameraParams& cam = scene.cfg.cameras[camera_index];
  for (const CameraTrack& t : scene.camera_tracks[camera_index]) {
    const int veh = scene.camera_id_to_vehicle[camera_index].at(t.track_id);
    for (const PixelObservation& o : t.observations) {
      if (o.frame % frame_stride != 0) continue;
      const GeoPoint& truth = scene.vehicle_geo[veh][o.frame];
      if (truth.lat == cam.position.lat && truth.lon == cam.position.lon) continue;
      samples.push_back({o, geo_inverse(cam.position, truth)});
    }
  }
  return samples;
}

inline CameraParams perturbed(const CameraParams& truth, double focal_rel, double d_height,
                              double d_pitch, double d_heading) {
  CameraParams p = truth;
  p.focal_px *= 1.0 + focal_rel;
  p.height_m += d_height;
  p.pitch_deg += d_pitch;
  p.heading_deg = wrap360(p.heading_deg + d_heading);
  return p;
}

// Exhaustive assignment oracle over all injective matchings of the smaller
// side (feasible up to ~8x8).
inline Assignment brute_force_assignment(const WeightMatrix& wm) {
  const int rows = static_cast<int>(wm.camera_ids.size());
  const int cols = static_cast<int>(wm.lidar_ids.size());
  const bool rows_small = rows <= cols;
  const int small = rows_small ? rows : cols;
  const int large = rows_small ? cols : rows;

  std::vector<int> pick(large);
  std::iota(pick.begin(), pick.end(), 0);
  Assignment best;
  best.total_cost = std::numeric_limits<double>::infinity();
  std::sort(pick.begin(), pick.end());
  do {
    double total = 0.0;
    for (int i = 0; i < small; ++i) {
      const int r = rows_small ? i : pick[i];
      const int c = rows_small ? pick[i] : i;
      total += wm.w[r][c];
    }
    if (total < best.total_cost) {
      best.total_cost = total;
      best.pairs.clear();
      for (int i = 0; i < small; ++i) {
        const int r = rows_small ? i : pick[i];
        const int c = rows_small ? pick[i] : i;
        best.pairs.emplace_back(wm.camera_ids[r], wm.lidar_ids[c]);
      }
    }
  } while (std::next_permutation(pick.begin(), pick.end()));
  std::sort(best.pairs.begin(), best.pairs.end());
  return best;
}

}  // namespace pst::testing
