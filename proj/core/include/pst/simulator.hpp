#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pst/association.hpp"
#include "pst/types.hpp"

namespace pst {

// Additive biases applied to the parameters handed to the pipeline (never to
// the projections that generate the data).
struct ParamBias {
  double focal_rel = 0.0;  // relative, e.g. 0.2 for +20%
  double pitch_deg = 0.0;
  double height_m = 0.0;
  double heading_deg = 0.0;
};

struct NoiseConfig {
  double gnss_sigma_m = 0.0;
  double pixel_sigma_px = 0.0;
  double dropout_rate = 0.0;
  ParamBias param_bias;
  double camera_east_offset_m = 0.0;   // mounting-position error fed to the pipeline
  double camera_north_offset_m = 0.0;
};

struct TrajectorySpec {
  enum class Kind { kStraight, kTurn, kStationaryThenGo };

  Kind kind = Kind::kStraight;
  double start_east_m = 0.0;
  double start_north_m = 0.0;
  double heading_deg = 0.0;    // initial course
  double speed_mps = 10.0;     // cruise speed
  double lane_offset_m = 0.0;  // shift to the right of the course
  double stop_duration_s = 0.0;   // kStationaryThenGo: idle time before moving
  double accel_mps2 = 2.5;        // ramp after the stop
  double turn_start_s = 1.0;      // kTurn: straight until this time
  double turn_rate_deg_s = 18.0;  // then yaw at this signed rate
  double turn_duration_s = 5.0;   // back to straight afterwards
};

struct SceneConfig {
  std::uint64_t seed = 1;
  double duration_s = 5.0;
  double fps = 10.0;
  GeoPoint origin{30.0, 120.0};  // scene anchor; camera 0 is usually placed here
  std::vector<CameraParams> cameras;  // ground truth
  std::vector<TrajectorySpec> vehicles;
  NoiseConfig noise;
};

// Deterministic synthetic scene: geodetic vehicle trajectories, ideal lidar
// tracks, and per-camera pixel tracks projected through the ground-truth
// parameters.
struct GroundTruthScene {
  SceneConfig cfg;
  int n_frames = 0;
  std::vector<std::vector<GeoPoint>> vehicle_geo;       // [vehicle][frame]
  std::vector<LidarTrack> lidar_tracks;                 // one per vehicle
  std::vector<std::vector<CameraTrack>> camera_tracks;  // [camera]
  std::vector<int> lidar_id_of_vehicle;
  std::vector<std::map<int, int>> camera_id_to_vehicle;  // [camera]: track id -> vehicle
  std::vector<std::map<int, int>> vehicle_to_camera_id;  // [camera]: vehicle -> track id

  int vehicle_of_lidar_id(int lidar_id) const;  // -1 when unknown
};

// Throws DomainError on invalid configs (fps <= 0, negative sigmas, ...).
GroundTruthScene generate(const SceneConfig& cfg);

// The observed side of a scene after noise injection: what the pipeline gets.
struct ObservedScene {
  std::vector<LidarTrack> lidar_tracks;
  std::vector<std::vector<CameraTrack>> camera_tracks;
  std::vector<CameraParams> pipeline_params;  // biased/offset per NoiseConfig
};

// Adds GNSS noise to lidar states, pixel noise and dropout to camera tracks,
// and parameter bias / mounting offset to the parameter set handed to the
// pipeline. Zero noise returns the scene unchanged. Deterministic for a fixed
// noise_seed.
ObservedScene perturb(const GroundTruthScene& scene, const NoiseConfig& noise,
                      std::uint64_t noise_seed = 0);

struct OracleMetrics {
  double rmse_d_m = 0.0;
  double rmse_a_deg = 0.0;
  double rmse_geo_m = 0.0;
  int n = 0;
  int skipped = 0;
  double association_rate = -1.0;  // -1 when no assignment was scored
};

// Scores localization of the ideal camera tracks under `params` against the
// ground-truth trajectories, and optionally an assignment against the id
// correspondence. Throws NoOverlapError when the camera saw nothing.
OracleMetrics oracle_metrics(const GroundTruthScene& scene, int camera_index,
                             const CameraParams& params,
                             const Assignment* assignment = nullptr);

}  // namespace pst
