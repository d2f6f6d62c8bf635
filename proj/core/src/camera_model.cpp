#include "pst/camera_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pst/error.hpp"
#include "pst/geo.hpp"

namespace pst {

ProjectionMatrices ProjectionMatrices::from_params(const CameraParams& cam) {
  const double f = cam.focal_px;
  const double sp = std::sin(deg_to_rad(cam.pitch_deg));
  const double cp = std::cos(deg_to_rad(cam.pitch_deg));
  const double H = cam.height_m;
  ProjectionMatrices m;
  m.K = {{{f, 0.0, 0.0}, {0.0, f, 0.0}, {0.0, 0.0, 1.0}}};
  m.R = {{{1.0, 0.0, 0.0}, {0.0, -sp, -cp}, {0.0, cp, -sp}}};
  m.T = {{{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, -H}}};
  return m;
}

Mat34 ProjectionMatrices::composed() const {
  Mat33 kr{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += K[i][k] * R[k][j];
      kr[i][j] = acc;
    }
  Mat34 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += kr[i][k] * T[k][j];
      out[i][j] = acc;
    }
  return out;
}

Mat34 projection_matrix(const CameraParams& cam) {
  const double f = cam.focal_px;
  const double sp = std::sin(deg_to_rad(cam.pitch_deg));
  const double cp = std::cos(deg_to_rad(cam.pitch_deg));
  const double H = cam.height_m;
  return {{{f, 0.0, 0.0, 0.0},
           {0.0, -f * sp, -f * cp, f * H * cp},
           {0.0, cp, -sp, H * sp}}};
}

Pixel project(const CameraParams& cam, double x_m, double y_m, double z_m) {
  const double sp = std::sin(deg_to_rad(cam.pitch_deg));
  const double cp = std::cos(deg_to_rad(cam.pitch_deg));
  const double s = y_m * cp - z_m * sp + cam.height_m * sp;
  if (!(s > 0.0)) throw BehindCameraError("projective scale <= 0: point behind the camera");
  const double su = cam.focal_px * x_m;
  const double sv = -cam.focal_px * sp * y_m - cam.focal_px * cp * z_m +
                    cam.focal_px * cam.height_m * cp;
  // The centered row coordinate grows downward, so converting to a top-left
  // origin only shifts by half the image.
  return {su / s + cam.image_w / 2.0, sv / s + cam.image_h / 2.0};
}

double vfov_to_focal(double vfov_deg, double image_h_px) {
  if (!(vfov_deg > 0.0 && vfov_deg < 180.0))
    throw DomainError("vfov must lie in (0, 180): " + std::to_string(vfov_deg));
  if (!(image_h_px > 0.0)) throw DomainError("image height must be > 0");
  return image_h_px / (2.0 * std::tan(deg_to_rad(vfov_deg) / 2.0));
}

double focal_to_vfov(double focal_px, double image_h_px) {
  if (!(focal_px > 0.0)) throw DomainError("focal must be > 0");
  if (!(image_h_px > 0.0)) throw DomainError("image height must be > 0");
  return rad_to_deg(2.0 * std::atan(image_h_px / (2.0 * focal_px)));
}

BinHead BinHead::uniform(double lo, double hi, int bins) {
  if (!(hi > lo) || bins <= 0) throw DomainError("BinHead::uniform: empty range");
  BinHead head;
  head.centers.resize(bins);
  head.probs.assign(bins, 1.0 / bins);
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) head.centers[i] = lo + (i + 0.5) * width;
  return head;
}

double decode_bins(const BinHead& head) {
  if (head.centers.empty() || head.centers.size() != head.probs.size())
    throw DomainError("decode_bins: centers and probs must be non-empty and equal length");
  double sum = 0.0;
  for (std::size_t i = 0; i < head.probs.size(); ++i) {
    if (head.probs[i] < 0.0) throw DomainError("decode_bins: negative probability");
    if (i > 0 && !(head.centers[i] > head.centers[i - 1]))
      throw DomainError("decode_bins: centers must be strictly increasing");
    sum += head.probs[i];
  }
  if (std::fabs(sum - 1.0) > 1e-6)
    throw DomainError("decode_bins: probabilities sum to " + std::to_string(sum));
  double expected = 0.0;
  for (std::size_t i = 0; i < head.probs.size(); ++i) expected += head.probs[i] * head.centers[i];
  return expected;
}

double vfov_loss(double vfov_pred_rad, double vfov_truth_rad) {
  const double r = vfov_pred_rad - vfov_truth_rad;
  const double r2 = r * r;
  return vfov_pred_rad <= vfov_truth_rad ? r2 / (r2 + 1.0) : r2;
}

double calib_loss(double pitch_pred_rad, double roll_pred_rad, double vfov_pred_rad,
                  double pitch_truth_rad, double roll_truth_rad, double vfov_truth_rad) {
  const double dp = pitch_pred_rad - pitch_truth_rad;
  const double dr = roll_pred_rad - roll_truth_rad;
  return dp * dp + dr * dr + vfov_loss(vfov_pred_rad, vfov_truth_rad);
}

void validate(const CalibrationEstimate& e) {
  if (!(e.vfov_deg > 0.0 && e.vfov_deg < 180.0))
    throw DomainError("calibration vfov must lie in (0, 180): " + std::to_string(e.vfov_deg));
}

FixedCalibration::FixedCalibration(CalibrationEstimate estimate) : estimate_(estimate) {
  validate(estimate_);
}

CalibrationEstimate FixedCalibration::estimate_for(int) const { return estimate_; }

CalibrationTable::CalibrationTable(std::map<int, CalibrationEstimate> table)
    : table_(std::move(table)) {
  for (const auto& [id, e] : table_) validate(e);
}

CalibrationEstimate CalibrationTable::estimate_for(int camera_id) const {
  auto it = table_.find(camera_id);
  if (it == table_.end())
    throw MissingEstimateError("no calibration estimate for camera " + std::to_string(camera_id));
  return it->second;
}

BiasedTruthCalibration::BiasedTruthCalibration(std::map<int, CalibrationEstimate> truth,
                                               CalibrationEstimate bias)
    : truth_(std::move(truth)), bias_(bias) {}

CalibrationEstimate BiasedTruthCalibration::estimate_for(int camera_id) const {
  auto it = truth_.find(camera_id);
  if (it == truth_.end())
    throw MissingEstimateError("no ground truth for camera " + std::to_string(camera_id));
  CalibrationEstimate e = it->second;
  e.pitch_deg += bias_.pitch_deg;
  e.roll_deg += bias_.roll_deg;
  e.vfov_deg += bias_.vfov_deg;
  validate(e);
  return e;
}

}  // namespace pst
