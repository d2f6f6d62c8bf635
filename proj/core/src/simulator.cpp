#include "pst/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pst/error.hpp"
#include "pst/geo.hpp"
#include "pst/geolocation.hpp"

namespace pst {

namespace {

GeoPoint en_to_geo(const GeoPoint& origin, double east_m, double north_m) {
  const double d = std::hypot(east_m, north_m);
  if (d == 0.0) return origin;
  return geo_offset(origin, {d, wrap360(rad_to_deg(std::atan2(east_m, north_m)))});
}

struct VehicleState {
  double east;
  double north;
  double course_deg;
  double speed;
};

VehicleState initial_state(const TrajectorySpec& spec) {
  VehicleState s;
  const double right = deg_to_rad(spec.heading_deg + 90.0);
  s.east = spec.start_east_m + spec.lane_offset_m * std::sin(right);
  s.north = spec.start_north_m + spec.lane_offset_m * std::cos(right);
  s.course_deg = spec.heading_deg;
  s.speed = spec.kind == TrajectorySpec::Kind::kStationaryThenGo ? 0.0 : spec.speed_mps;
  return s;
}

void step(VehicleState& s, const TrajectorySpec& spec, double t, double dt) {
  switch (spec.kind) {
    case TrajectorySpec::Kind::kStraight:
      s.speed = spec.speed_mps;
      break;
    case TrajectorySpec::Kind::kStationaryThenGo:
      s.speed = t < spec.stop_duration_s
                    ? 0.0
                    : std::min(spec.speed_mps, spec.accel_mps2 * (t - spec.stop_duration_s));
      break;
    case TrajectorySpec::Kind::kTurn:
      s.speed = spec.speed_mps;
      if (t >= spec.turn_start_s && t < spec.turn_start_s + spec.turn_duration_s)
        s.course_deg += spec.turn_rate_deg_s * dt;
      break;
  }
  const double c = deg_to_rad(s.course_deg);
  s.east += s.speed * std::sin(c) * dt;
  s.north += s.speed * std::cos(c) * dt;
}

void validate_scene(const SceneConfig& cfg) {
  if (!(cfg.fps > 0.0)) throw DomainError("scene: fps must be > 0");
  if (!(cfg.duration_s > 0.0)) throw DomainError("scene: duration_s must be > 0");
  validate(cfg.origin);
  for (const CameraParams& c : cfg.cameras) validate(c);
  for (const TrajectorySpec& v : cfg.vehicles) {
    if (v.speed_mps < 0.0) throw DomainError("scene: vehicle speed must be >= 0");
    if (v.kind == TrajectorySpec::Kind::kStationaryThenGo && v.accel_mps2 <= 0.0)
      throw DomainError("scene: accel_mps2 must be > 0 for stationary-then-go vehicles");
  }
  const NoiseConfig& n = cfg.noise;
  if (n.gnss_sigma_m < 0.0 || n.pixel_sigma_px < 0.0)
    throw DomainError("scene: noise sigmas must be >= 0");
  if (n.dropout_rate < 0.0 || n.dropout_rate >= 1.0)
    throw DomainError("scene: dropout_rate must lie in [0, 1)");
}

}  // namespace

int GroundTruthScene::vehicle_of_lidar_id(int lidar_id) const {
  for (std::size_t i = 0; i < lidar_id_of_vehicle.size(); ++i)
    if (lidar_id_of_vehicle[i] == lidar_id) return static_cast<int>(i);
  return -1;
}

GroundTruthScene generate(const SceneConfig& cfg) {
  validate_scene(cfg);
  GroundTruthScene scene;
  scene.cfg = cfg;
  scene.n_frames = std::max(1, static_cast<int>(std::lround(cfg.duration_s * cfg.fps)));
  const double dt = 1.0 / cfg.fps;
  const int n_vehicles = static_cast<int>(cfg.vehicles.size());
  const int n_cameras = static_cast<int>(cfg.cameras.size());

  scene.vehicle_geo.assign(n_vehicles, {});
  scene.lidar_tracks.clear();
  scene.lidar_id_of_vehicle.resize(n_vehicles);
  scene.camera_tracks.assign(n_cameras, {});
  scene.camera_id_to_vehicle.assign(n_cameras, {});
  scene.vehicle_to_camera_id.assign(n_cameras, {});

  const GeoPoint reference =
      n_cameras > 0 ? cfg.cameras.front().position : cfg.origin;

  for (int vi = 0; vi < n_vehicles; ++vi) {
    const TrajectorySpec& spec = cfg.vehicles[vi];
    VehicleState st = initial_state(spec);
    LidarTrack lt;
    lt.track_id = 9 + 7 * vi;
    scene.lidar_id_of_vehicle[vi] = lt.track_id;
    auto& geo = scene.vehicle_geo[vi];
    geo.reserve(scene.n_frames);
    for (int k = 0; k < scene.n_frames; ++k) {
      const GeoPoint pos = en_to_geo(cfg.origin, st.east, st.north);
      geo.push_back(pos);
      LidarState ls;
      ls.frame = k;
      ls.position = pos;
      ls.face_deg = wrap360(st.course_deg);
      ls.speed_mps = st.speed;
      ls.distance_m = geo_distance_m(reference, pos);
      lt.states.push_back(ls);
      step(st, spec, k * dt, dt);
    }
    scene.lidar_tracks.push_back(std::move(lt));
  }

  for (int ci = 0; ci < n_cameras; ++ci) {
    const CameraParams& cam = cfg.cameras[ci];
    for (int vi = 0; vi < n_vehicles; ++vi) {
      CameraTrack track;
      track.track_id = vi + 1;
      for (int k = 0; k < scene.n_frames; ++k) {
        const GeoPoint& pos = scene.vehicle_geo[vi][k];
        if (pos.lat == cam.position.lat && pos.lon == cam.position.lon) continue;
        const PolarObservation polar = geo_inverse(cam.position, pos);
        const double rel = deg_to_rad(wrap180(polar.bearing_deg - cam.heading_deg));
        const double x = polar.distance_m * std::sin(rel);
        const double y = polar.distance_m * std::cos(rel);
        if (y <= 0.5) continue;  // behind or on top of the camera
        Pixel px;
        try {
          px = project(cam, x, y, 0.0);
        } catch (const BehindCameraError&) {
          continue;
        }
        if (!(px.u >= 0.0 && px.u < cam.image_w && px.v >= 0.0 && px.v < cam.image_h)) continue;
        track.observations.push_back({k, px.u, px.v});
      }
      if (track.observations.empty()) continue;
      scene.camera_id_to_vehicle[ci][track.track_id] = vi;
      scene.vehicle_to_camera_id[ci][vi] = track.track_id;
      scene.camera_tracks[ci].push_back(std::move(track));
    }
  }
  return scene;
}

ObservedScene perturb(const GroundTruthScene& scene, const NoiseConfig& noise,
                      std::uint64_t noise_seed) {
  if (noise.gnss_sigma_m < 0.0 || noise.pixel_sigma_px < 0.0)
    throw DomainError("perturb: noise sigmas must be >= 0");
  if (noise.dropout_rate < 0.0 || noise.dropout_rate >= 1.0)
    throw DomainError("perturb: dropout_rate must lie in [0, 1)");

  std::mt19937_64 rng(noise_seed ^ (scene.cfg.seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ObservedScene out;
  out.lidar_tracks = scene.lidar_tracks;

  const GeoPoint reference = scene.cfg.cameras.empty() ? scene.cfg.origin
                                                       : scene.cfg.cameras.front().position;
  if (noise.gnss_sigma_m > 0.0) {
    for (LidarTrack& t : out.lidar_tracks) {
      for (LidarState& s : t.states) {
        const double de = gauss(rng) * noise.gnss_sigma_m;
        const double dn = gauss(rng) * noise.gnss_sigma_m;
        const double d = std::hypot(de, dn);
        if (d > 0.0)
          s.position = geo_offset(s.position, {d, wrap360(rad_to_deg(std::atan2(de, dn)))});
        s.distance_m = geo_distance_m(reference, s.position);
      }
    }
  }

  out.camera_tracks.resize(scene.camera_tracks.size());
  for (std::size_t ci = 0; ci < scene.camera_tracks.size(); ++ci) {
    const CameraParams& cam = scene.cfg.cameras[ci];
    for (const CameraTrack& t : scene.camera_tracks[ci]) {
      CameraTrack noisy;
      noisy.track_id = t.track_id;
      for (const PixelObservation& o : t.observations) {
        if (noise.dropout_rate > 0.0 && unit(rng) < noise.dropout_rate) continue;
        PixelObservation p = o;
        if (noise.pixel_sigma_px > 0.0) {
          p.u += gauss(rng) * noise.pixel_sigma_px;
          p.v += gauss(rng) * noise.pixel_sigma_px;
          if (!(p.u >= 0.0 && p.u < cam.image_w && p.v >= 0.0 && p.v < cam.image_h)) continue;
        }
        noisy.observations.push_back(p);
      }
      if (!noisy.observations.empty()) out.camera_tracks[ci].push_back(std::move(noisy));
    }
  }

  out.pipeline_params.reserve(scene.cfg.cameras.size());
  for (const CameraParams& cam : scene.cfg.cameras) {
    CameraParams p = cam;
    p.focal_px *= 1.0 + noise.param_bias.focal_rel;
    p.pitch_deg += noise.param_bias.pitch_deg;
    p.height_m += noise.param_bias.height_m;
    p.heading_deg = wrap360(p.heading_deg + noise.param_bias.heading_deg);
    if (noise.camera_east_offset_m != 0.0 || noise.camera_north_offset_m != 0.0) {
      const double d = std::hypot(noise.camera_east_offset_m, noise.camera_north_offset_m);
      p.position = geo_offset(
          p.position,
          {d, wrap360(rad_to_deg(std::atan2(noise.camera_east_offset_m,
                                            noise.camera_north_offset_m)))});
    }
    validate(p);
    out.pipeline_params.push_back(p);
  }
  return out;
}

OracleMetrics oracle_metrics(const GroundTruthScene& scene, int camera_index,
                             const CameraParams& params, const Assignment* assignment) {
  if (camera_index < 0 || camera_index >= static_cast<int>(scene.camera_tracks.size()))
    throw DomainError("oracle_metrics: camera index out of range");
  const CameraParams& truth_cam = scene.cfg.cameras[camera_index];
  const auto& id2veh = scene.camera_id_to_vehicle[camera_index];

  OracleMetrics m;
  double sd = 0.0, sa = 0.0, sg = 0.0;
  for (const CameraTrack& t : scene.camera_tracks[camera_index]) {
    const int veh = id2veh.at(t.track_id);
    for (const PixelObservation& o : t.observations) {
      const GeoPoint& truth_geo = scene.vehicle_geo[veh][o.frame];
      if (truth_geo.lat == truth_cam.position.lat && truth_geo.lon == truth_cam.position.lon)
        continue;
      const PolarObservation truth_polar = geo_inverse(truth_cam.position, truth_geo);
      LocalizationResult est;
      try {
        est = localize(params, o);
      } catch (const Error&) {
        ++m.skipped;
        continue;
      }
      const double rd = est.obs.distance_m - truth_polar.distance_m;
      const double ra = wrap180(est.obs.bearing_deg - truth_polar.bearing_deg);
      const double rg = geo_distance_m(est.position, truth_geo);
      sd += rd * rd;
      sa += ra * ra;
      sg += rg * rg;
      ++m.n;
    }
  }
  if (m.n == 0)
    throw NoOverlapError("oracle_metrics: no localizable observation overlaps the ground truth");
  m.rmse_d_m = std::sqrt(sd / m.n);
  m.rmse_a_deg = std::sqrt(sa / m.n);
  m.rmse_geo_m = std::sqrt(sg / m.n);

  if (assignment) {
    int correct = 0;
    for (const auto& [cam_id, lidar_id] : assignment->pairs) {
      const auto it = id2veh.find(cam_id);
      if (it != id2veh.end() && scene.vehicle_of_lidar_id(lidar_id) == it->second) ++correct;
    }
    m.association_rate =
        assignment->pairs.empty() ? 0.0 : double(correct) / double(assignment->pairs.size());
  }
  return m;
}

}  // namespace pst
