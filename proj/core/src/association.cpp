#include "pst/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pst/error.hpp"
#include "pst/geo.hpp"
#include "pst/geolocation.hpp"

namespace pst {

namespace {

constexpr double kBanPenalty = 1e12;

// Shortest-augmenting-path assignment on a square cost matrix (Kuhn-Munkres in
// its O(n^3) dual form). Fills row_to_col and returns the minimum total cost.
double solve_square(const std::vector<std::vector<double>>& cost, std::vector<int>& row_to_col) {
  const int n = static_cast<int>(cost.size());
  row_to_col.assign(n, -1);
  if (n == 0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j]) {
      row_to_col[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  return total;
}

double solve_subset(const std::vector<std::vector<double>>& cost, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  const int m = static_cast<int>(rows.size());
  std::vector<std::vector<double>> sub(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sub[i][j] = cost[rows[i]][cols[j]];
  std::vector<int> unused;
  return solve_square(sub, unused);
}

double mean_row_slope(const CameraTrack& t) {
  const auto& o = t.observations;
  if (o.size() < 2) return 0.0;
  double acc = 0.0;
  int cnt = 0;
  for (std::size_t i = 1; i < o.size(); ++i) {
    const int df = o[i].frame - o[i - 1].frame;
    acc += (o[i].v - o[i - 1].v) / df;
    ++cnt;
  }
  return acc / cnt;
}

double circular_mean_face(const LidarTrack& t) {
  double se = 0.0, ce = 0.0;
  for (const auto& s : t.states) {
    se += std::sin(deg_to_rad(s.face_deg));
    ce += std::cos(deg_to_rad(s.face_deg));
  }
  return wrap360(rad_to_deg(std::atan2(se, ce)));
}

}  // namespace

LidarTrack with_distance_to(const LidarTrack& track, const GeoPoint& camera) {
  LidarTrack out = track;
  for (auto& s : out.states) s.distance_m = geo_distance_m(camera, s.position);
  return out;
}

std::vector<int> filter_lidar(std::span<const LidarTrack> tracks, double heading_deg,
                              const FilterConfig& cfg) {
  std::vector<int> retained;
  for (const LidarTrack& t : tracks) {
    if (t.states.empty()) continue;
    const double face = circular_mean_face(t);
    if (angle_diff_deg(face, heading_deg) > cfg.t_angle_deg) continue;
    double min_d = std::numeric_limits<double>::infinity();
    double max_v = 0.0;
    for (const auto& s : t.states) {
      min_d = std::min(min_d, s.distance_m);
      max_v = std::max(max_v, s.speed_mps);
    }
    if (min_d > cfg.t_dist_m) continue;
    if (max_v < cfg.t_speed_mps) continue;
    retained.push_back(t.track_id);
  }
  return retained;
}

std::vector<int> filter_camera(std::span<const CameraTrack> tracks, const FilterConfig& cfg) {
  std::vector<int> retained;
  for (const CameraTrack& t : tracks) {
    if (t.observations.empty()) continue;
    double min_v = std::numeric_limits<double>::infinity();
    for (const auto& o : t.observations) min_v = std::min(min_v, o.v);
    if (min_v < cfg.t_pixel) continue;  // high in the image: too far from the camera
    // Receding vehicles climb toward the horizon, so their row must shrink.
    if (mean_row_slope(t) > -cfg.displacement_eps_px) continue;
    retained.push_back(t.track_id);
  }
  return retained;
}

WeightMatrix build_weights(const std::vector<int>& camera_ids,
                           std::span<const PolarObservation> camera_first,
                           const std::vector<int>& lidar_ids,
                           std::span<const PolarObservation> lidar_first,
                           double k1, double k2) {
  if (camera_ids.empty() || lidar_ids.empty())
    throw EmptyInputError("build_weights: a side is empty");
  if (camera_ids.size() != camera_first.size() || lidar_ids.size() != lidar_first.size())
    throw DomainError("build_weights: id and observation counts differ");
  if (k1 < 0.0 || k2 < 0.0 || (k1 == 0.0 && k2 == 0.0))
    throw DomainError("build_weights: k1, k2 must be >= 0 and not both 0");
  WeightMatrix wm;
  wm.camera_ids = camera_ids;
  wm.lidar_ids = lidar_ids;
  wm.w.assign(camera_ids.size(), std::vector<double>(lidar_ids.size(), 0.0));
  for (std::size_t i = 0; i < camera_ids.size(); ++i) {
    for (std::size_t j = 0; j < lidar_ids.size(); ++j) {
      wm.w[i][j] = k1 * std::fabs(camera_first[i].distance_m - lidar_first[j].distance_m) +
                   k2 * angle_diff_deg(camera_first[i].bearing_deg, lidar_first[j].bearing_deg);
    }
  }
  return wm;
}

Assignment assign(const WeightMatrix& wm) {
  const int rows = static_cast<int>(wm.camera_ids.size());
  const int cols = static_cast<int>(wm.lidar_ids.size());
  if (rows == 0 || cols == 0) throw EmptyInputError("assign: empty weight matrix");
  if (static_cast<int>(wm.w.size()) != rows)
    throw DomainError("assign: matrix row count does not match camera ids");
  for (const auto& row : wm.w) {
    if (static_cast<int>(row.size()) != cols)
      throw DomainError("assign: matrix column count does not match lidar ids");
    for (double x : row)
      if (!std::isfinite(x)) throw DomainError("assign: weight matrix entries must be finite");
  }

  // Pad to a square with zero-cost dummies; dummies absorb the larger side, so
  // the real pairs form the minimum-cost matching on the smaller side.
  const int n = std::max(rows, cols);
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) cost[i][j] = wm.w[i][j];

  std::vector<int> row_to_col;
  const double optimum = solve_square(cost, row_to_col);
  const double tie_eps = 1e-9 * std::max(1.0, std::fabs(optimum));

  // Among tied optima, commit pairs row by row (ascending camera id), each time
  // taking the smallest lidar id that keeps the total optimal.
  std::vector<int> row_order(rows);
  for (int i = 0; i < rows; ++i) row_order[i] = i;
  std::sort(row_order.begin(), row_order.end(),
            [&](int a, int b) { return wm.camera_ids[a] < wm.camera_ids[b]; });

  std::vector<int> rows_left(n), cols_left(n);
  for (int i = 0; i < n; ++i) rows_left[i] = i;
  for (int j = 0; j < n; ++j) cols_left[j] = j;

  double committed = 0.0;
  Assignment out;
  for (int r : row_order) {
    rows_left.erase(std::find(rows_left.begin(), rows_left.end(), r));
    std::vector<int> candidates(cols_left);
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      const bool ra = a < cols, rb = b < cols;
      if (ra != rb) return ra;  // real columns first: matching beats leaving unmatched
      if (ra && rb) return wm.lidar_ids[a] < wm.lidar_ids[b];
      return a < b;
    });
    for (int c : candidates) {
      std::vector<int> rest_cols;
      rest_cols.reserve(cols_left.size() - 1);
      for (int x : cols_left)
        if (x != c) rest_cols.push_back(x);
      const double t = committed + cost[r][c] + solve_subset(cost, rows_left, rest_cols);
      if (t <= optimum + tie_eps) {
        committed += cost[r][c];
        cols_left = std::move(rest_cols);
        if (c < cols) {
          out.pairs.emplace_back(wm.camera_ids[r], wm.lidar_ids[c]);
          out.total_cost += cost[r][c];
        }
        break;
      }
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

AssociationResult associate(std::span<const CameraTrack> camera_tracks,
                            std::span<const LidarTrack> lidar_tracks,
                            const CameraParams& params, const FilterConfig& cfg,
                            double k1, double k2, const PairBan* banned) {
  if (camera_tracks.empty() || lidar_tracks.empty())
    throw EmptyInputError("associate: an input track set is empty");

  std::vector<LidarTrack> views;
  views.reserve(lidar_tracks.size());
  for (const LidarTrack& t : lidar_tracks) views.push_back(with_distance_to(t, params.position));

  AssociationResult result;
  result.lidar_retained = filter_lidar(views, params.heading_deg, cfg);
  result.camera_retained = filter_camera(camera_tracks, cfg);
  if (result.lidar_retained.empty() || result.camera_retained.empty())
    throw EmptyInputError("associate: no tracks survive outlier filtering");

  std::vector<int> cam_ids;
  std::vector<PolarObservation> cam_first;
  for (int id : result.camera_retained) {
    const auto it = std::find_if(camera_tracks.begin(), camera_tracks.end(),
                                 [id](const CameraTrack& t) { return t.track_id == id; });
    try {
      cam_first.push_back(localize(params, it->observations.front()).obs);
      cam_ids.push_back(id);
    } catch (const Error&) {
      ++result.camera_skipped;  // first frame not localizable under these params
    }
  }
  if (cam_ids.empty())
    throw EmptyInputError("associate: no retained camera track is localizable");

  std::vector<int> lidar_ids;
  std::vector<PolarObservation> lidar_first;
  for (int id : result.lidar_retained) {
    const auto it = std::find_if(views.begin(), views.end(),
                                 [id](const LidarTrack& t) { return t.track_id == id; });
    const GeoPoint& pos = it->states.front().position;
    if (pos.lat == params.position.lat && pos.lon == params.position.lon) continue;
    lidar_first.push_back(geo_inverse(params.position, pos));
    lidar_ids.push_back(id);
  }
  if (lidar_ids.empty()) throw EmptyInputError("associate: no usable lidar first frame");

  WeightMatrix wm = build_weights(cam_ids, cam_first, lidar_ids, lidar_first, k1, k2);
  if (banned) {
    for (std::size_t i = 0; i < cam_ids.size(); ++i)
      for (std::size_t j = 0; j < lidar_ids.size(); ++j)
        if (banned->count({cam_ids[i], lidar_ids[j]})) wm.w[i][j] += kBanPenalty;
  }

  Assignment asg = assign(wm);
  // A banned pair can still be forced when nothing else is available; drop it.
  Assignment kept;
  for (const auto& [cid, lid] : asg.pairs) {
    const auto i = std::find(cam_ids.begin(), cam_ids.end(), cid) - cam_ids.begin();
    const auto j = std::find(lidar_ids.begin(), lidar_ids.end(), lid) - lidar_ids.begin();
    if (wm.w[i][j] >= kBanPenalty * 0.5) continue;
    kept.pairs.emplace_back(cid, lid);
    kept.total_cost += wm.w[i][j];
  }
  result.assignment = std::move(kept);
  return result;
}

}  // namespace pst
