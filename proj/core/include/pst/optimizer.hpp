#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pst/geolocation.hpp"
#include "pst/types.hpp"

namespace pst {

// Which of {f, pitch, H, heading} the optimizer updates.
struct ParamMask {
  bool focal = true;
  bool pitch = true;
  bool height = true;
  bool heading = true;

  int count() const { return int(focal) + int(pitch) + int(height) + int(heading); }
};

// Parses "f,phi,H,omega_h"-style lists (also accepts "pitch", "height",
// "heading", "w_h"). Throws ConfigError on unknown names.
ParamMask parse_mask(const std::string& csv);
std::string mask_to_string(const ParamMask& m);

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Hard box constraints applied after every step. Defaults follow the ranges
// the reference deployment converged under.
struct ParamBounds {
  ParamRange focal_px{1000.0, 5000.0};
  ParamRange height_m{5.0, 10.0};
  ParamRange pitch_deg{1.0, 90.0};
  ParamRange heading_deg{240.0, 300.0};
};

struct OptimizerConfig {
  double lr = 1e-3;
  int epochs = 30000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  ParamBounds bounds;
  ParamMask mask;
  int batch = 0;  // samples per step; 0 means full batch
  double converge_rel_tol = 1e-8;
  int converge_window = 1000;
  bool early_stop = true;  // stop once a window shows no relative improvement
  std::uint64_t seed = 0;  // mini-batch sampling only
};

// One supervised pair: a pixel and the polar truth from the lidar.
struct TrainingSample {
  PixelObservation pixel;
  PolarObservation truth;
};

struct LossResult {
  double value = 0.0;
  int used = 0;
  int skipped = 0;  // samples not localizable under the parameters
};

// Mean over samples of (bearing residual deg)^2 + (range residual m)^2, the
// angle residual wrapped to [-180, 180). Unlocalizable samples are skipped and
// counted. Throws EmptyInputError when nothing is localizable.
LossResult loc_loss(const CameraParams& cam, std::span<const TrainingSample> samples);

struct Gradient {
  double focal = 0.0;
  double pitch = 0.0;
  double height = 0.0;
  double heading = 0.0;
};

// Analytic gradient of loc_loss with respect to the masked parameters;
// unmasked components are zero. The bearing prediction has no height
// dependence, so d/dH only carries range residuals.
Gradient grad_loc_loss(const CameraParams& cam, std::span<const TrainingSample> samples,
                       const ParamMask& mask);

// Derivative of vfov_to_focal at the given vfov; the chain factor that lets a
// single vfov gradient drive both focal and hfov.
double dfocal_dvfov(double vfov_deg, double image_h_px);

struct FitReport {
  CameraParams params_before;
  CameraParams params_after;
  double rmse_d_before = 0.0;
  double rmse_d_after = 0.0;
  double rmse_a_before = 0.0;
  double rmse_a_after = 0.0;
  std::vector<std::pair<int, double>> loss_curve;  // (epoch, loss) samples
  bool converged = false;
  int epochs_run = 0;
  int skipped_samples = 0;
};

// RMSE of range (m) and bearing (deg) residuals over the samples.
std::pair<double, double> rmse_d_a(const CameraParams& cam,
                                   std::span<const TrainingSample> samples);

// Adam refinement of {f, pitch, H, heading} under hard box constraints. The
// focal is driven through the vfov so the field of view updates with it.
// Runs up to cfg.epochs steps, stopping early once a converge_window shows
// relative improvement below converge_rel_tol (when early_stop is set).
// Throws DomainError when params0 violates the bounds and DivergenceError when
// the loss becomes non-finite.
FitReport fit(const CameraParams& params0, std::span<const TrainingSample> samples,
              const OptimizerConfig& cfg);

struct CameraFitInput {
  int camera_id = 0;
  CameraParams params0;
  std::vector<TrainingSample> samples;
  OptimizerConfig cfg;
};

struct CameraFitOutcome {
  int camera_id = 0;
  bool ok = false;
  std::string error;
  FitReport report;
};

// Runs fit independently per camera on up to `workers` threads. Cameras share
// no state, so each result is bit-identical regardless of the worker count;
// per-camera failures are reported without aborting the rest.
std::vector<CameraFitOutcome> fit_all_cameras(std::span<const CameraFitInput> inputs,
                                              int workers);

}  // namespace pst
