#include <array>
#include <cmath>
#include <random>

#include <doctest.h>

#include "fixtures.hpp"
#include "pst/camera_model.hpp"
#include "pst/error.hpp"
#include "pst/geo.hpp"

using namespace pst;

namespace {

CameraParams simple_camera(double f, double pitch, double height) {
  CameraParams cam;
  cam.focal_px = f;
  cam.pitch_deg = pitch;
  cam.height_m = height;
  cam.heading_deg = 0.0;
  cam.position = {30.0, 120.0};
  cam.image_w = 1920;
  cam.image_h = 1080;
  return cam;
}

}  // namespace

TEST_SUITE_BEGIN("camera_model");

TEST_CASE("principal ground ray maps to the image center") {
  const CameraParams cam = simple_camera(1000.0, 12.0, 8.0);
  const double y0 = cam.height_m / std::tan(deg_to_rad(cam.pitch_deg));
  const Pixel px = project(cam, 0.0, y0, 0.0);
  CHECK(px.u == doctest::Approx(960.0).epsilon(1e-12));
  CHECK(px.v == doctest::Approx(540.0).epsilon(1e-12));
}

TEST_CASE("far ground points approach the horizon row from below") {
  const CameraParams cam = simple_camera(1000.0, 10.0, 8.0);
  const double horizon = cam.image_h / 2.0 - cam.focal_px * std::tan(deg_to_rad(cam.pitch_deg));
  double prev = project(cam, 0.0, 100.0, 0.0).v;
  for (double y : {1e3, 1e5, 1e7, 1e9}) {
    const double v = project(cam, 0.0, y, 0.0).v;
    CHECK(v < prev);   // rows shrink toward the horizon
    CHECK(v > horizon);
    prev = v;
  }
  CHECK(prev == doctest::Approx(horizon).epsilon(1e-6));
}

TEST_CASE("projection agrees with a hand-rolled homogeneous multiply") {
  const CameraParams cam = simple_camera(1000.0, 10.0, 8.0);
  const double sp = std::sin(deg_to_rad(10.0)), cp = std::cos(deg_to_rad(10.0));
  // Written out entry by entry, independent of the implementation path.
  const double M[3][4] = {{1000.0, 0.0, 0.0, 0.0},
                          {0.0, -1000.0 * sp, -1000.0 * cp, 1000.0 * 8.0 * cp},
                          {0.0, cp, -sp, 8.0 * sp}};
  const double X[4] = {2.0, 50.0, 0.0, 1.0};
  double h[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) h[i] += M[i][j] * X[j];
  const Pixel expected{h[0] / h[2] + 960.0, h[1] / h[2] + 540.0};

  const Pixel got = project(cam, 2.0, 50.0, 0.0);
  CHECK(got.u == doctest::Approx(expected.u).epsilon(1e-12));
  CHECK(got.v == doctest::Approx(expected.v).epsilon(1e-12));
}

TEST_CASE("factored K*R*T equals the closed-form matrix entrywise") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uf(500.0, 5000.0), up(1.0, 45.0), uh(3.0, 12.0);
  for (int trial = 0; trial < 50; ++trial) {
    const CameraParams cam = simple_camera(uf(rng), up(rng), uh(rng));
    const Mat34 composed = ProjectionMatrices::from_params(cam).composed();
    const Mat34 closed = projection_matrix(cam);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(std::fabs(composed[i][j] - closed[i][j]) <
              1e-12 * std::max(1.0, std::fabs(closed[i][j])));
  }
}

TEST_CASE("points behind the camera are rejected") {
  const CameraParams cam = simple_camera(1000.0, 10.0, 8.0);
  CHECK_THROWS_AS(project(cam, 0.0, -100.0, 0.0), BehindCameraError);
}

TEST_CASE("vfov/focal conversion fixtures") {
  CHECK(vfov_to_focal(90.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Reference focal 3362.7385 on a 2160-row image.
  const double alpha = focal_to_vfov(3362.7385, 2160.0);
  CHECK(alpha == doctest::Approx(rad_to_deg(2.0 * std::atan(1080.0 / 3362.7385))).epsilon(1e-12));
  CHECK(alpha == doctest::Approx(35.6106).epsilon(1e-4));
}

TEST_CASE("vfov/focal conversions are exact inverses") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uf(100.0, 10000.0);
  for (int i = 0; i < 100; ++i) {
    const double f = uf(rng);
    CHECK(vfov_to_focal(focal_to_vfov(f, 1080.0), 1080.0) ==
          doctest::Approx(f).epsilon(1e-9));
  }
  CHECK_THROWS_AS(vfov_to_focal(0.0, 1080.0), DomainError);
  CHECK_THROWS_AS(vfov_to_focal(180.0, 1080.0), DomainError);
  CHECK_THROWS_AS(focal_to_vfov(-1.0, 1080.0), DomainError);
}

TEST_CASE("decode_bins fixtures") {
  SUBCASE("one-hot mass returns that center") {
    BinHead head = BinHead::uniform(-45.0, 45.0, 256);
    head.probs.assign(256, 0.0);
    head.probs[37] = 1.0;
    CHECK(decode_bins(head) == doctest::Approx(head.centers[37]));
  }
  SUBCASE("uniform mass over two adjacent bins returns their midpoint") {
    BinHead head = BinHead::uniform(10.0, 120.0, 256);
    head.probs.assign(256, 0.0);
    head.probs[100] = 0.5;
    head.probs[101] = 0.5;
    CHECK(decode_bins(head) ==
          doctest::Approx((head.centers[100] + head.centers[101]) / 2.0));
  }
  SUBCASE("four-bin dot product") {
    BinHead head;
    head.centers = {0.0, 10.0, 20.0, 30.0};
    head.probs = {0.1, 0.2, 0.3, 0.4};
    CHECK(decode_bins(head) == doctest::Approx(20.0).epsilon(1e-12));
  }
}

TEST_CASE("decode_bins is linear in the probability mass") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BinHead p = BinHead::uniform(-45.0, 45.0, 64);
  BinHead q = p;
  double sp = 0.0, sq = 0.0;
  for (int i = 0; i < 64; ++i) {
    p.probs[i] = u(rng);
    q.probs[i] = u(rng);
    sp += p.probs[i];
    sq += q.probs[i];
  }
  for (int i = 0; i < 64; ++i) {
    p.probs[i] /= sp;
    q.probs[i] /= sq;
  }
  for (double lambda : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    BinHead mix = p;
    for (int i = 0; i < 64; ++i) mix.probs[i] = lambda * p.probs[i] + (1.0 - lambda) * q.probs[i];
    CHECK(decode_bins(mix) ==
          doctest::Approx(lambda * decode_bins(p) + (1.0 - lambda) * decode_bins(q))
              .epsilon(1e-12));
  }
}

TEST_CASE("decode_bins enforces its invariants") {
  BinHead head;
  head.centers = {0.0, 1.0};
  head.probs = {0.5};
  CHECK_THROWS_AS(decode_bins(head), DomainError);
  head.probs = {0.6, 0.6};
  CHECK_THROWS_AS(decode_bins(head), DomainError);
  head.probs = {-0.1, 1.1};
  CHECK_THROWS_AS(decode_bins(head), DomainError);
  head.centers = {1.0, 1.0};
  head.probs = {0.5, 0.5};
  CHECK_THROWS_AS(decode_bins(head), DomainError);
}

TEST_CASE("vfov loss under-penalizes under-prediction") {
  CHECK(vfov_loss(0.7, 0.7) == 0.0);
  CHECK(vfov_loss(0.2, 0.7) == doctest::Approx(0.25 / 1.25));  // r = -0.5
  CHECK(vfov_loss(1.2, 0.7) == doctest::Approx(0.25));         // r = +0.5
  for (double r = 0.05; r < 2.0; r += 0.05)
    CHECK(vfov_loss(1.0 - r, 1.0) < vfov_loss(1.0 + r, 1.0));
}

TEST_CASE("total calibration loss sums pitch, roll and vfov terms") {
  CHECK(calib_loss(0.1, 0.2, 0.7, 0.0, 0.0, 0.7) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("calibration providers") {
  SUBCASE("fixed values echo the configuration") {
    const double vfov = focal_to_vfov(3362.74, 2160.0);
    FixedCalibration provider({8.65, 0.0, vfov});
    const CalibrationEstimate e = provider.estimate_for(3);
    CHECK(e.pitch_deg == doctest::Approx(8.65));
    CHECK(e.vfov_deg == doctest::Approx(vfov));
  }
  SUBCASE("biased truth adds the configured offset") {
    BiasedTruthCalibration provider({{0, {10.0, 0.0, 40.0}}}, {2.0, 0.0, 0.0});
    CHECK(provider.estimate_for(0).pitch_deg == doctest::Approx(12.0));
    CHECK_THROWS_AS(provider.estimate_for(1), MissingEstimateError);
  }
  SUBCASE("table lookups fail for unknown cameras") {
    CalibrationTable provider({{2, {5.0, 0.0, 50.0}}});
    CHECK(provider.estimate_for(2).vfov_deg == doctest::Approx(50.0));
    CHECK_THROWS_AS(provider.estimate_for(7), MissingEstimateError);
  }
}

TEST_SUITE_END();
