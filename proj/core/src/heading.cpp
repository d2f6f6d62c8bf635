#include "pst/heading.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pst/error.hpp"
#include "pst/geo.hpp"

namespace pst {

namespace {

struct StationaryPeriod {
  double duration_s = 0.0;
  int first_idx = -1;  // state indices of the verified-still span, inclusive
  int last_idx = -1;
};

// A frame is stationary when the position one test window later has moved less
// than static_eps_m; the reported span covers the frames actually verified
// still. Adjacent-frame displacements drown in GNSS noise, which is why the
// test strides a whole window.
StationaryPeriod find_stationary(const LidarTrack& track, const HeadingConfig& cfg) {
  const auto& st = track.states;
  const int n = static_cast<int>(st.size());
  const int k = std::max(1, static_cast<int>(std::lround(cfg.static_window_s * cfg.fps)));
  StationaryPeriod best;
  int run_start = -1;
  for (int i = 0; i + k < n; ++i) {
    const bool still = geo_distance_m(st[i].position, st[i + k].position) < cfg.static_eps_m;
    if (still && run_start < 0) run_start = i;
    if ((!still || i + k == n - 1) && run_start >= 0) {
      const int run_end = still ? i : i - 1;
      const int span_frames = st[run_end + k].frame - st[run_start].frame + 1;
      const double dur = span_frames / cfg.fps;
      if (dur > best.duration_s) best = {dur, run_start, run_end + k};
      run_start = -1;
    }
  }
  return best;
}

}  // namespace

bool check_straight(std::span<const GeoPoint> path, double tol) {
  if (path.size() < 3) throw EmptyInputError("check_straight needs at least 3 points");
  // Local meter coordinates around the first point.
  const GeoPoint anchor = path.front();
  auto to_en = [&anchor](const GeoPoint& p) -> std::pair<double, double> {
    if (p.lat == anchor.lat && p.lon == anchor.lon) return {0.0, 0.0};
    const PolarObservation o = geo_inverse(anchor, p);
    const double b = deg_to_rad(o.bearing_deg);
    return {o.distance_m * std::sin(b), o.distance_m * std::cos(b)};
  };
  const auto [ce, cn] = to_en(path.back());
  const double chord = std::hypot(ce, cn);
  if (chord < 1.0) return false;  // no direction to speak of
  double max_dev = 0.0;
  for (const GeoPoint& p : path) {
    const auto [e, n] = to_en(p);
    max_dev = std::max(max_dev, std::fabs(ce * n - cn * e) / chord);
  }
  return max_dev <= tol * chord;
}

double static_find(const LidarTrack& track, const HeadingConfig& cfg) {
  validate(track);
  return find_stationary(track, cfg).duration_s;
}

double estimate_heading(std::span<const LidarTrack> tracks, const GeoPoint& camera,
                        const HeadingConfig& cfg) {
  struct Vote {
    double bearing_deg;
    double chord_m;
  };
  std::vector<Vote> votes;
  for (const LidarTrack& t : tracks) {
    if (t.states.size() < 3) continue;
    std::vector<GeoPoint> path;
    path.reserve(t.states.size());
    for (const auto& s : t.states) path.push_back(s.position);
    if (!check_straight(path, cfg.straightness_tol)) continue;

    const StationaryPeriod sp = find_stationary(t, cfg);
    if (sp.duration_s < cfg.t_stationary_s) continue;

    GeoPoint rest{0.0, 0.0};
    for (int i = sp.first_idx; i <= sp.last_idx; ++i) {
      rest.lat += t.states[i].position.lat;
      rest.lon += t.states[i].position.lon;
    }
    const int cnt = sp.last_idx - sp.first_idx + 1;
    rest.lat /= cnt;
    rest.lon /= cnt;
    if (geo_distance_m(camera, rest) > cfg.d_max_m) continue;

    if (path.front().lat == path.back().lat && path.front().lon == path.back().lon) continue;
    const PolarObservation chord = geo_inverse(path.front(), path.back());
    votes.push_back({chord.bearing_deg, chord.distance_m});
  }
  if (votes.empty())
    throw NoRetainedTracksError(
        "heading estimation: no straight, recently stopped, near-camera trajectory found");

  // Modal bin, bins centered on multiples of the bin width.
  const int n_bins = std::max(1, static_cast<int>(std::lround(360.0 / cfg.mode_bin_deg)));
  std::vector<int> counts(n_bins, 0);
  std::vector<double> lengths(n_bins, 0.0);
  for (const Vote& v : votes) {
    int idx = static_cast<int>(std::floor(wrap360(v.bearing_deg) / cfg.mode_bin_deg + 0.5));
    idx %= n_bins;
    counts[idx] += 1;
    lengths[idx] += v.chord_m;
  }
  int winner = 0;
  for (int i = 1; i < n_bins; ++i) {
    if (counts[i] > counts[winner] ||
        (counts[i] == counts[winner] && lengths[i] > lengths[winner]))
      winner = i;
  }
  return wrap360(winner * cfg.mode_bin_deg);
}

}  // namespace pst
