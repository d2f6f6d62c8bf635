#include <cmath>
#include <random>

#include <doctest.h>

#include "pst/error.hpp"
#include "pst/geo.hpp"

using namespace pst;

TEST_SUITE_BEGIN("geo");

TEST_CASE("wrap helpers normalize into their ranges") {
  CHECK(wrap360(0.0) == 0.0);
  CHECK(wrap360(360.0) == 0.0);
  CHECK(wrap360(-1.0) == doctest::Approx(359.0));
  CHECK(wrap360(725.0) == doctest::Approx(5.0));
  CHECK(wrap360(-1e-15) >= 0.0);
  CHECK(wrap360(-1e-15) < 360.0);
  CHECK(wrap180(190.0) == doctest::Approx(-170.0));
  CHECK(wrap180(-181.0) == doctest::Approx(179.0));
  CHECK(angle_diff_deg(359.0, 1.0) == doctest::Approx(2.0));
  CHECK(angle_diff_deg(90.0, 270.0) == doctest::Approx(180.0));
}

TEST_CASE("geo_offset vanishes in the zero-distance limit") {
  const GeoPoint origin{30.0, 120.0};
  const GeoPoint p = geo_offset(origin, {1e-9, 0.0});
  CHECK(std::fabs(p.lat - origin.lat) < 1e-12);
  CHECK(std::fabs(p.lon - origin.lon) < 1e-12);
}

TEST_CASE("one degree of latitude north") {
  // Expected offset computed by hand from the spherical radius constant.
  const double one_degree_m = kEarthRadiusM * 2.0 * kPi / 360.0;
  CHECK(one_degree_m == doctest::Approx(111201.78578851908).epsilon(1e-12));
  const GeoPoint p = geo_offset({30.0, 120.0}, {one_degree_m, 0.0});
  CHECK(p.lat == doctest::Approx(31.0).epsilon(1e-12));
  CHECK(p.lon == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("due-east offset leaves latitude and scales longitude by cos(lat)") {
  const GeoPoint p = geo_offset({30.0, 120.0}, {100.0, 90.0});
  CHECK(p.lat == doctest::Approx(30.0).epsilon(1e-15));
  // The longitude term divides by cos of the (here unchanged) destination latitude.
  const double expected_lon = 120.0 + 100.0 / (kMetersPerDegLat * std::cos(deg_to_rad(30.0)));
  CHECK(p.lon == doctest::Approx(expected_lon).epsilon(1e-13));
}

TEST_CASE("geo_inverse recovers the one-degree-north example") {
  const PolarObservation o = geo_inverse({30.0, 120.0}, {31.0, 120.0});
  CHECK(o.distance_m == doctest::Approx(kMetersPerDegLat).epsilon(1e-12));
  CHECK(o.bearing_deg == doctest::Approx(0.0));
}

TEST_CASE("geo_inverse flips to 180 when the origin sits north of the target") {
  const GeoPoint target{30.0, 120.0};
  const GeoPoint origin{30.0 + 1e-5, 120.0};
  CHECK(geo_inverse(origin, target).bearing_deg == doctest::Approx(180.0));
}

TEST_CASE("geo_inverse rejects coincident points") {
  CHECK_THROWS_AS(geo_inverse({30.0, 120.0}, {30.0, 120.0}), DegenerateInputError);
  CHECK(geo_distance_m({30.0, 120.0}, {30.0, 120.0}) == 0.0);
}

TEST_CASE("offset/inverse round-trip closes for 1000 random cases") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> lat(-60.0, 60.0);
  std::uniform_real_distribution<double> lon(-179.0, 179.0);
  std::uniform_real_distribution<double> dist(1.0, 5000.0);
  std::uniform_real_distribution<double> brg(0.0, 360.0);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint origin{lat(rng), lon(rng)};
    const PolarObservation obs{dist(rng), brg(rng)};
    const GeoPoint target = geo_offset(origin, obs);
    const PolarObservation back = geo_inverse(origin, target);
    CHECK(std::fabs(back.distance_m - obs.distance_m) / obs.distance_m < 1e-6);
    CHECK(angle_diff_deg(back.bearing_deg, obs.bearing_deg) < 1e-4);
    // And the opposite composition reproduces the coordinates themselves.
    const GeoPoint again = geo_offset(origin, back);
    CHECK(std::fabs(again.lat - target.lat) < 1e-9);
    CHECK(std::fabs(again.lon - target.lon) < 1e-9);
    CHECK(back.bearing_deg >= 0.0);
    CHECK(back.bearing_deg < 360.0);
  }
}

TEST_CASE("fixed-bearing offsets preserve the distance ordering") {
  const GeoPoint origin{42.0, -71.0};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> brg(0.0, 360.0);
  for (int i = 0; i < 50; ++i) {
    const double b = brg(rng);
    double prev = 0.0;
    for (double d : {10.0, 100.0, 1000.0, 9000.0}) {
      const double sep = geo_distance_m(origin, geo_offset(origin, {d, b}));
      CHECK(sep > prev);
      prev = sep;
    }
  }
}

TEST_CASE("validation rejects out-of-range coordinates and observations") {
  CHECK_THROWS_AS(validate(GeoPoint{91.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(GeoPoint{0.0, 181.0}), DomainError);
  CHECK_THROWS_AS(validate(PolarObservation{0.0, 10.0}), DomainError);
  CHECK_THROWS_AS(validate(PolarObservation{5.0, 360.0}), DomainError);
  CHECK_NOTHROW(validate(PolarObservation{5.0, 359.999}));
}

TEST_SUITE_END();
