#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "pst/types.hpp"

namespace pst {

using Mat33 = std::array<std::array<double, 3>, 3>;
using Mat34 = std::array<std::array<double, 4>, 3>;

// Intrinsic, rotation (pitch only) and translation factors of the road-scene
// projection. Kept separate so the composition can be checked against the
// closed-form matrix entrywise.
struct ProjectionMatrices {
  Mat33 K;
  Mat33 R;
  Mat34 T;

  static ProjectionMatrices from_params(const CameraParams& cam);

  // K * R * T.
  Mat34 composed() const;
};

// Closed-form 3x4 projection matrix for a pitch-only roadside camera:
//   [ f        0          0         0        ]
//   [ 0   -f sin(phi) -f cos(phi)  f H cos(phi) ]
//   [ 0    cos(phi)   -sin(phi)    H sin(phi)   ]
Mat34 projection_matrix(const CameraParams& cam);

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Projects a road-frame point (x right, y forward along the heading, z up,
// origin at the camera foot) to top-left-origin pixel coordinates.
// Throws BehindCameraError when the projective scale is <= 0.
Pixel project(const CameraParams& cam, double x_m, double y_m, double z_m);

// f = h / (2 tan(alpha/2)) and its inverse. Angles in degrees.
double vfov_to_focal(double vfov_deg, double image_h_px);
double focal_to_vfov(double focal_px, double image_h_px);

// Discretized angle head: bin centers with a probability mass over them.
struct BinHead {
  std::vector<double> centers;  // monotone increasing
  std::vector<double> probs;    // >= 0, sums to 1 within 1e-6

  // Uniform bin centers over [lo, hi] (midpoint of each of `bins` cells) with
  // a uniform probability mass.
  static BinHead uniform(double lo, double hi, int bins = 256);
};

// Expected value of the probability mass: sum_i p_i * center_i.
// Throws DomainError when the BinHead invariants do not hold.
double decode_bins(const BinHead& head);

// Robust vfov loss, radians: Geman-McClure r^2/(r^2+1) when the prediction is
// not above the truth, plain r^2 otherwise. Under-prediction is penalized less.
double vfov_loss(double vfov_pred_rad, double vfov_truth_rad);

// Squared pitch and roll errors plus the robust vfov term. Radians.
double calib_loss(double pitch_pred_rad, double roll_pred_rad, double vfov_pred_rad,
                  double pitch_truth_rad, double roll_truth_rad, double vfov_truth_rad);

// Initial calibration of one camera. Roll is carried but not used by the
// localization chain.
struct CalibrationEstimate {
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double vfov_deg = 0.0;  // (0, 180)
};

void validate(const CalibrationEstimate& e);

// Source of initial per-camera calibration estimates. Implementations must be
// reentrant.
class CalibrationProvider {
 public:
  virtual ~CalibrationProvider() = default;

  // Throws MissingEstimateError for unknown camera ids.
  virtual CalibrationEstimate estimate_for(int camera_id) const = 0;
};

// Same fixed estimate for every camera.
class FixedCalibration : public CalibrationProvider {
 public:
  explicit FixedCalibration(CalibrationEstimate estimate);
  CalibrationEstimate estimate_for(int camera_id) const override;

 private:
  CalibrationEstimate estimate_;
};

// Per-camera estimates, e.g. parsed from a calibration file.
class CalibrationTable : public CalibrationProvider {
 public:
  explicit CalibrationTable(std::map<int, CalibrationEstimate> table);
  CalibrationEstimate estimate_for(int camera_id) const override;

 private:
  std::map<int, CalibrationEstimate> table_;
};

// Ground-truth estimates with a fixed additive bias, emulating the
// domain-shift error of a calibration network on unseen scenes.
class BiasedTruthCalibration : public CalibrationProvider {
 public:
  BiasedTruthCalibration(std::map<int, CalibrationEstimate> truth, CalibrationEstimate bias);
  CalibrationEstimate estimate_for(int camera_id) const override;

 private:
  std::map<int, CalibrationEstimate> truth_;
  CalibrationEstimate bias_;
};

}  // namespace pst
