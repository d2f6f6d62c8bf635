#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "fixtures.hpp"
#include "pst/error.hpp"
#include "pst/geo.hpp"
#include "pst/heading.hpp"
#include "pst/simulator.hpp"

using namespace pst;

namespace {

// Straight path west with optional per-point EN jitter.
std::vector<GeoPoint> west_path(double length_m, int n, double jitter_m, std::uint64_t seed) {
  const GeoPoint origin{30.0, 120.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, jitter_m);
  std::vector<GeoPoint> path;
  for (int i = 0; i < n; ++i) {
    const double e = -length_m * i / (n - 1) + (jitter_m > 0 ? g(rng) : 0.0);
    const double north = jitter_m > 0 ? g(rng) : 0.0;
    const double d = std::hypot(e, north);
    path.push_back(d == 0.0 ? origin
                            : geo_offset(origin, {d, wrap360(rad_to_deg(std::atan2(e, north)))}));
  }
  return path;
}

LidarTrack track_from_en(const std::vector<std::pair<double, double>>& en, double fps,
                         double speed_hint = 0.0) {
  const GeoPoint origin{30.0, 120.0};
  LidarTrack t;
  t.track_id = 1;
  for (std::size_t i = 0; i < en.size(); ++i) {
    const auto [e, n] = en[i];
    const double d = std::hypot(e, n);
    LidarState s;
    s.frame = static_cast<int>(i);
    s.position = d == 0.0 ? origin
                          : geo_offset(origin, {d, wrap360(rad_to_deg(std::atan2(e, n)))});
    s.speed_mps = speed_hint;
    t.states.push_back(s);
  }
  (void)fps;
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("heading");

TEST_CASE("collinear points are straight") {
  CHECK(check_straight(west_path(80.0, 40, 0.0, 1), 0.02));
}

TEST_CASE("a 90-degree turn is not straight") {
  SceneConfig cfg;
  cfg.duration_s = 10.0;
  cfg.vehicles.push_back(pst::testing::turning_vehicle(0.0, 40.0, 180.0, 8.0, 2.0, -18.0));
  const GroundTruthScene scene = generate(cfg);
  std::vector<GeoPoint> path;
  for (const auto& s : scene.lidar_tracks[0].states) path.push_back(s.position);
  CHECK_FALSE(check_straight(path, 0.02));
}

TEST_CASE("gnss jitter within tolerance keeps a long chord straight") {
  CHECK(check_straight(west_path(80.0, 60, 0.2, 99), 0.02));
}

TEST_CASE("check_straight needs at least three points") {
  std::vector<GeoPoint> two{{30.0, 120.0}, {30.001, 120.0}};
  CHECK_THROWS_AS(check_straight(two, 0.02), EmptyInputError);
}

TEST_CASE("a near-zero chord cannot define a direction") {
  std::vector<GeoPoint> cluster(5, GeoPoint{30.0, 120.0});
  CHECK_FALSE(check_straight(cluster, 0.02));
}

TEST_CASE("static_find on an always-moving track is zero") {
  HeadingConfig cfg;
  std::vector<std::pair<double, double>> en;
  for (int i = 0; i < 50; ++i) en.push_back({-0.8 * i, 0.0});  // 8 m/s at 10 fps
  CHECK(static_find(track_from_en(en, cfg.fps), cfg) == 0.0);
}

TEST_CASE("seventy still frames at 10 fps are seven seconds") {
  HeadingConfig cfg;
  std::vector<std::pair<double, double>> en(70, {0.0, 0.0});
  CHECK(static_find(track_from_en(en, cfg.fps), cfg) == doctest::Approx(7.0));
}

TEST_CASE("jitter below the displacement epsilon still counts as stationary") {
  HeadingConfig cfg;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<std::pair<double, double>> en;
  for (int i = 0; i < 70; ++i) en.push_back({g(rng), g(rng)});
  CHECK(static_find(track_from_en(en, cfg.fps), cfg) == doctest::Approx(7.0));
}

TEST_CASE("a single westbound stop-and-go track votes exactly 270") {
  SceneConfig cfg;
  cfg.duration_s = 15.0;
  cfg.cameras.push_back(pst::testing::west_scene_camera());
  cfg.vehicles.push_back(pst::testing::stop_go_vehicle(-10.0, 0.0, 270.0, 8.0, 6.0));
  const GroundTruthScene scene = generate(cfg);
  HeadingConfig hcfg;
  CHECK(estimate_heading(scene.lidar_tracks, cfg.cameras[0].position, hcfg) ==
        doctest::Approx(270.0));
}

TEST_CASE("mixed scene still votes the westbound road bearing") {
  const SceneConfig cfg = pst::testing::heading_scene(11);
  const GroundTruthScene scene = generate(cfg);
  NoiseConfig noise;
  noise.gnss_sigma_m = 0.2;
  const ObservedScene observed = perturb(scene, noise, 123);
  HeadingConfig hcfg;
  const double heading =
      estimate_heading(observed.lidar_tracks, cfg.cameras[0].position, hcfg);
  CHECK(angle_diff_deg(heading, 270.0) <= 1.0);
}

TEST_CASE("every track turning means no retained tracks") {
  SceneConfig cfg;
  cfg.duration_s = 10.0;
  cfg.cameras.push_back(pst::testing::west_scene_camera());
  for (int i = 0; i < 3; ++i)
    cfg.vehicles.push_back(
        pst::testing::turning_vehicle(-5.0 * i, 30.0, 180.0, 6.0, 2.0, -18.0));
  const GroundTruthScene scene = generate(cfg);
  HeadingConfig hcfg;
  CHECK_THROWS_AS(estimate_heading(scene.lidar_tracks, cfg.cameras[0].position, hcfg),
                  NoRetainedTracksError);
}

TEST_CASE("the vote is invariant to track order and rigid translation") {
  const SceneConfig cfg = pst::testing::heading_scene(5);
  const GroundTruthScene scene = generate(cfg);
  HeadingConfig hcfg;
  const GeoPoint cam = cfg.cameras[0].position;
  const double base = estimate_heading(scene.lidar_tracks, cam, hcfg);

  SUBCASE("permutation") {
    std::vector<LidarTrack> shuffled = scene.lidar_tracks;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(estimate_heading(shuffled, cam, hcfg) == base);
  }
  SUBCASE("translation of everything together") {
    const PolarObservation shift{5000.0, 37.0};
    std::vector<LidarTrack> moved = scene.lidar_tracks;
    for (auto& t : moved)
      for (auto& s : t.states) s.position = geo_offset(s.position, shift);
    const GeoPoint cam_moved = geo_offset(cam, shift);
    CHECK(angle_diff_deg(estimate_heading(moved, cam_moved, hcfg), base) < 1.0);
  }
  SUBCASE("adding a turning track changes nothing") {
    SceneConfig extra = cfg;
    extra.vehicles.push_back(pst::testing::turning_vehicle(10.0, 25.0, 180.0, 7.0, 2.0, 18.0));
    const GroundTruthScene scene2 = generate(extra);
    CHECK(estimate_heading(scene2.lidar_tracks, cam, hcfg) == base);
  }
}

TEST_SUITE_END();
