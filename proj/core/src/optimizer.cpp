#include "pst/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "pst/error.hpp"
#include "pst/geo.hpp"

namespace pst {

namespace {

// Prediction and partials for one pixel. The bearing has no height dependence
// and the range no heading dependence; only the focal touches both through the
// field of view.
struct SampleForward {
  double d_hat = 0.0;   // range, m
  double a_hat = 0.0;   // bearing, deg
  double dD_df = 0.0;
  double dD_dpitch = 0.0;  // per degree
  double dD_dH = 0.0;
  double dA_df = 0.0;  // deg per pixel of focal
};

std::optional<SampleForward> forward_sample(const CameraParams& cam, const PixelObservation& px) {
  const double f = cam.focal_px;
  const double w = cam.image_w;
  const double h = cam.image_h;
  const double H = cam.height_m;

  const double q = h / 2.0 - px.v;
  const double beta = std::atan(q / f);
  const double theta = kPi / 2.0 - deg_to_rad(cam.pitch_deg) + beta;
  if (!(theta > 0.0 && theta < kPi / 2.0)) return std::nullopt;  // at or above the horizon
  const double tan_theta = std::tan(theta);
  const double sec2_theta = 1.0 + tan_theta * tan_theta;
  const double y = H * tan_theta;

  const double du = px.u - w / 2.0;
  const double wc = 2.0 * std::atan(w / (2.0 * f)) * du / w;  // radians
  if (!(std::fabs(wc) < kPi / 2.0)) return std::nullopt;
  const double cos_wc = std::cos(wc);
  const double sin_wc = std::sin(wc);

  const double dbeta_df = -q / (f * f + q * q);
  const double dwc_df = -4.0 * du / (4.0 * f * f + w * w);

  SampleForward out;
  out.d_hat = y / cos_wc;
  out.a_hat = wrap360(cam.heading_deg + rad_to_deg(wc));
  out.dD_df = H * sec2_theta * dbeta_df / cos_wc + y * sin_wc / (cos_wc * cos_wc) * dwc_df;
  out.dD_dpitch = -H * sec2_theta * (kPi / 180.0) / cos_wc;
  out.dD_dH = tan_theta / cos_wc;
  out.dA_df = rad_to_deg(dwc_df);
  return out;
}

struct Accumulated {
  double loss = 0.0;
  Gradient grad;
  int used = 0;
  int skipped = 0;
};

Accumulated accumulate(const CameraParams& cam, std::span<const TrainingSample> samples,
                       std::span<const int> subset, const ParamMask& mask) {
  Accumulated acc;
  auto add = [&](const TrainingSample& s) {
    const auto fw = forward_sample(cam, s.pixel);
    if (!fw) {
      ++acc.skipped;
      return;
    }
    const double ra = wrap180(fw->a_hat - s.truth.bearing_deg);
    const double rd = fw->d_hat - s.truth.distance_m;
    acc.loss += ra * ra + rd * rd;
    if (mask.focal) acc.grad.focal += 2.0 * (ra * fw->dA_df + rd * fw->dD_df);
    if (mask.pitch) acc.grad.pitch += 2.0 * rd * fw->dD_dpitch;
    if (mask.height) acc.grad.height += 2.0 * rd * fw->dD_dH;
    if (mask.heading) acc.grad.heading += 2.0 * ra;
    ++acc.used;
  };
  if (subset.empty()) {
    for (const auto& s : samples) add(s);
  } else {
    for (int i : subset) add(samples[i]);
  }
  if (acc.used > 0) {
    const double inv = 1.0 / acc.used;
    acc.loss *= inv;
    acc.grad.focal *= inv;
    acc.grad.pitch *= inv;
    acc.grad.height *= inv;
    acc.grad.heading *= inv;
  }
  return acc;
}

void check_bounds(const ParamBounds& b) {
  for (const ParamRange& r : {b.focal_px, b.height_m, b.pitch_deg, b.heading_deg})
    if (!(r.lo < r.hi)) throw DomainError("fit: each bound must satisfy lo < hi");
}

// Heading is optimized as an unwrapped real; pick the representation of the
// initial value that falls inside the bounds interval.
double heading_into_bounds(double heading_deg, const ParamRange& r) {
  for (double cand : {heading_deg, heading_deg - 360.0, heading_deg + 360.0})
    if (cand >= r.lo && cand <= r.hi) return cand;
  throw DomainError("fit: initial heading " + std::to_string(heading_deg) +
                    " outside bounds [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
}

}  // namespace

ParamMask parse_mask(const std::string& csv) {
  ParamMask m{false, false, false, false};
  std::string token;
  std::istringstream in(csv);
  bool any = false;
  while (std::getline(in, token, ',')) {
    std::string t;
    for (char c : token)
      if (!std::isspace(static_cast<unsigned char>(c))) t += std::tolower(static_cast<unsigned char>(c));
    if (t.empty()) continue;
    any = true;
    if (t == "f" || t == "focal") m.focal = true;
    else if (t == "phi" || t == "pitch") m.pitch = true;
    else if (t == "h" || t == "height") m.height = true;
    else if (t == "omega_h" || t == "wh" || t == "w_h" || t == "heading") m.heading = true;
    else if (t == "all") m = ParamMask{};
    else throw ConfigError("unknown mask parameter '" + token + "'");
  }
  if (!any) throw ConfigError("empty parameter mask");
  return m;
}

std::string mask_to_string(const ParamMask& m) {
  std::string out;
  auto append = [&out](const char* name) {
    if (!out.empty()) out += "+";
    out += name;
  };
  if (m.focal) append("f");
  if (m.pitch) append("phi");
  if (m.height) append("H");
  if (m.heading) append("omega_h");
  return out.empty() ? "none" : out;
}

LossResult loc_loss(const CameraParams& cam, std::span<const TrainingSample> samples) {
  const Accumulated acc = accumulate(cam, samples, {}, ParamMask{false, false, false, false});
  if (acc.used == 0)
    throw EmptyInputError("loc_loss: no sample is localizable under these parameters");
  return {acc.loss, acc.used, acc.skipped};
}

Gradient grad_loc_loss(const CameraParams& cam, std::span<const TrainingSample> samples,
                       const ParamMask& mask) {
  const Accumulated acc = accumulate(cam, samples, {}, mask);
  if (acc.used == 0)
    throw EmptyInputError("grad_loc_loss: no sample is localizable under these parameters");
  return acc.grad;
}

double dfocal_dvfov(double vfov_deg, double image_h_px) {
  const double half = deg_to_rad(vfov_deg) / 2.0;
  const double s = std::sin(half);
  return -image_h_px / (4.0 * s * s) * (kPi / 180.0);
}

std::pair<double, double> rmse_d_a(const CameraParams& cam,
                                   std::span<const TrainingSample> samples) {
  double sd = 0.0, sa = 0.0;
  int used = 0;
  for (const auto& s : samples) {
    const auto fw = forward_sample(cam, s.pixel);
    if (!fw) continue;
    const double rd = fw->d_hat - s.truth.distance_m;
    const double ra = wrap180(fw->a_hat - s.truth.bearing_deg);
    sd += rd * rd;
    sa += ra * ra;
    ++used;
  }
  if (used == 0) throw EmptyInputError("rmse: no sample is localizable under these parameters");
  return {std::sqrt(sd / used), std::sqrt(sa / used)};
}

FitReport fit(const CameraParams& params0, std::span<const TrainingSample> samples,
              const OptimizerConfig& cfg) {
  if (samples.empty()) throw EmptyInputError("fit: no training samples");
  validate(params0);
  if (!(cfg.lr > 0.0)) throw DomainError("fit: learning rate must be > 0");
  if (cfg.mask.count() == 0) throw DomainError("fit: parameter mask is empty");
  if (cfg.epochs <= 0) throw DomainError("fit: epochs must be > 0");
  check_bounds(cfg.bounds);
  const ParamBounds& b = cfg.bounds;
  if (params0.focal_px < b.focal_px.lo || params0.focal_px > b.focal_px.hi ||
      params0.height_m < b.height_m.lo || params0.height_m > b.height_m.hi ||
      params0.pitch_deg < b.pitch_deg.lo || params0.pitch_deg > b.pitch_deg.hi)
    throw DomainError("fit: params0 outside bounds");

  FitReport report;
  report.params_before = params0;
  std::tie(report.rmse_d_before, report.rmse_a_before) = rmse_d_a(params0, samples);

  CameraParams cur = params0;
  // The focal is steered through the vfov, so one variable drives f and hfov.
  double vfov = focal_to_vfov(cur.focal_px, cur.image_h);
  double heading = heading_into_bounds(params0.heading_deg, b.heading_deg);

  double m[4] = {0, 0, 0, 0};
  double v[4] = {0, 0, 0, 0};
  int t = 0;

  const int n = static_cast<int>(samples.size());
  const bool minibatch = cfg.batch > 0 && cfg.batch < n;
  std::vector<int> indices;
  std::mt19937_64 rng(cfg.seed);
  if (minibatch) {
    indices.resize(n);
    std::iota(indices.begin(), indices.end(), 0);
  }

  const int curve_stride = std::max(1, cfg.epochs / 1000);
  double window_start_loss = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int epoch = 0;

  for (epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::span<const int> subset;
    if (minibatch) {
      std::shuffle(indices.begin(), indices.end(), rng);
      subset = std::span<const int>(indices.data(), cfg.batch);
    }
    const Accumulated acc = accumulate(cur, samples, subset, cfg.mask);
    if (acc.used == 0)
      throw DivergenceError("fit: no sample localizable at epoch " + std::to_string(epoch));
    if (!std::isfinite(acc.loss))
      throw DivergenceError("fit: loss became non-finite at epoch " + std::to_string(epoch));

    double g[4] = {acc.grad.focal * dfocal_dvfov(vfov, cur.image_h), acc.grad.pitch,
                   acc.grad.height, acc.grad.heading};
    const bool on[4] = {cfg.mask.focal, cfg.mask.pitch, cfg.mask.height, cfg.mask.heading};
    double x[4] = {vfov, cur.pitch_deg, cur.height_m, heading};

    ++t;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
    for (int k = 0; k < 4; ++k) {
      if (!on[k]) continue;
      m[k] = cfg.adam_beta1 * m[k] + (1.0 - cfg.adam_beta1) * g[k];
      v[k] = cfg.adam_beta2 * v[k] + (1.0 - cfg.adam_beta2) * g[k] * g[k];
      x[k] -= cfg.lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + cfg.adam_eps);
    }

    // Project onto the box; the focal constraint acts in focal space.
    vfov = x[0];
    double focal = vfov_to_focal(vfov, cur.image_h);
    if (focal < b.focal_px.lo || focal > b.focal_px.hi) {
      focal = std::clamp(focal, b.focal_px.lo, b.focal_px.hi);
      vfov = focal_to_vfov(focal, cur.image_h);
    }
    cur.focal_px = focal;
    cur.pitch_deg = std::clamp(x[1], b.pitch_deg.lo, b.pitch_deg.hi);
    cur.height_m = std::clamp(x[2], b.height_m.lo, b.height_m.hi);
    heading = std::clamp(x[3], b.heading_deg.lo, b.heading_deg.hi);
    cur.heading_deg = wrap360(heading);
    if (!std::isfinite(cur.focal_px) || !std::isfinite(cur.pitch_deg) ||
        !std::isfinite(cur.height_m) || !std::isfinite(cur.heading_deg))
      throw DivergenceError("fit: parameters became non-finite at epoch " + std::to_string(epoch));

    if (epoch == 1 || epoch % curve_stride == 0 || epoch == cfg.epochs)
      report.loss_curve.emplace_back(epoch, acc.loss);

    if (std::isnan(window_start_loss)) window_start_loss = acc.loss;
    if (epoch % cfg.converge_window == 0) {
      const double rel = (window_start_loss - acc.loss) /
                         std::max(std::fabs(window_start_loss), 1e-30);
      if (std::fabs(rel) < cfg.converge_rel_tol) {
        converged = true;
        if (cfg.early_stop) break;
      }
      window_start_loss = acc.loss;
    }
  }

  report.params_after = cur;
  report.converged = converged;
  report.epochs_run = std::min(epoch, cfg.epochs);
  std::tie(report.rmse_d_after, report.rmse_a_after) = rmse_d_a(cur, samples);
  report.skipped_samples = loc_loss(cur, samples).skipped;
  return report;
}

std::vector<CameraFitOutcome> fit_all_cameras(std::span<const CameraFitInput> inputs,
                                              int workers) {
  std::vector<CameraFitOutcome> out(inputs.size());
  if (inputs.empty()) return out;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      CameraFitOutcome& r = out[i];
      r.camera_id = inputs[i].camera_id;
      try {
        r.report = fit(inputs[i].params0, inputs[i].samples, inputs[i].cfg);
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  const int nw = std::clamp<int>(workers, 1, static_cast<int>(inputs.size()));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace pst
