#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pst/association.hpp"
#include "pst/geo.hpp"
#include "pst/geolocation.hpp"
#include "pst/optimizer.hpp"
#include "pst/simulator.hpp"

namespace {

pst::CameraParams bench_camera() {
  pst::CameraParams cam;
  cam.focal_px = 3362.7385;
  cam.pitch_deg = 8.6503;
  cam.height_m = 9.3041;
  cam.heading_deg = 275.6085;
  cam.position = {30.0, 120.0};
  cam.image_w = 3840;
  cam.image_h = 2160;
  return cam;
}

void BM_GeoRoundtrip(benchmark::State& state) {
  const pst::GeoPoint origin{30.0, 120.0};
  const pst::PolarObservation obs{1234.5, 211.25};
  for (auto _ : state) {
    auto p = pst::geo_offset(origin, obs);
    benchmark::DoNotOptimize(pst::geo_inverse(origin, p));
  }
}
BENCHMARK(BM_GeoRoundtrip);

void BM_Localize(benchmark::State& state) {
  const pst::CameraParams cam = bench_camera();
  const pst::PixelObservation px{0, 2000.0, 1400.0};
  for (auto _ : state) benchmark::DoNotOptimize(pst::localize(cam, px));
}
BENCHMARK(BM_Localize);

void BM_GradEpoch(benchmark::State& state) {
  const pst::CameraParams cam = bench_camera();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uu(100.0, 3700.0), uv(1200.0, 2100.0);
  std::vector<pst::TrainingSample> samples;
  for (int i = 0; i < state.range(0); ++i) {
    pst::PixelObservation px{i, uu(rng), uv(rng)};
    samples.push_back({px, pst::localize(cam, px).obs});
  }
  const pst::ParamMask mask;
  for (auto _ : state) benchmark::DoNotOptimize(pst::grad_loc_loss(cam, samples, mask));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GradEpoch)->Range(32, 512)->Complexity();

void BM_Hungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(0.0, 100.0);
  pst::WeightMatrix wm;
  for (int i = 0; i < n; ++i) {
    wm.camera_ids.push_back(i);
    wm.lidar_ids.push_back(100 + i);
  }
  wm.w.assign(n, std::vector<double>(n));
  for (auto& row : wm.w)
    for (auto& x : row) x = w(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pst::assign(wm));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void BM_SceneGenerate(benchmark::State& state) {
  pst::SceneConfig cfg;
  cfg.duration_s = 5.0;
  cfg.cameras.push_back(bench_camera());
  for (int i = 0; i < 8; ++i) {
    pst::TrajectorySpec v;
    v.start_east_m = -20.0 - 8.0 * i;
    v.start_north_m = 3.5 * (i % 3);
    v.heading_deg = 270.0;
    v.speed_mps = 8.0;
    cfg.vehicles.push_back(v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(pst::generate(cfg));
}
BENCHMARK(BM_SceneGenerate);

}  // namespace

BENCHMARK_MAIN();
