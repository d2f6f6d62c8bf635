#include "pst/types.hpp"

#include <string>

#include "pst/error.hpp"

namespace pst {

void validate(const CameraParams& p) {
  if (!(p.focal_px > 0.0)) throw DomainError("focal_px must be > 0");
  if (!(p.height_m > 0.0)) throw DomainError("height_m must be > 0");
  if (!(p.pitch_deg > 0.0 && p.pitch_deg < 90.0))
    throw DomainError("pitch_deg must lie in (0, 90): " + std::to_string(p.pitch_deg));
  if (!(p.heading_deg >= 0.0 && p.heading_deg < 360.0))
    throw DomainError("heading_deg must lie in [0, 360): " + std::to_string(p.heading_deg));
  if (p.image_w <= 0 || p.image_h <= 0) throw DomainError("image dimensions must be positive");
  validate(p.position);
}

void validate(const CameraTrack& t, const CameraParams* owner) {
  if (t.observations.empty()) throw DomainError("camera track must be non-empty");
  int prev = t.observations.front().frame - 1;
  for (const auto& o : t.observations) {
    if (o.frame <= prev) throw DomainError("camera track frames must strictly increase");
    prev = o.frame;
    if (owner) {
      if (!(o.u >= 0.0 && o.u < owner->image_w && o.v >= 0.0 && o.v < owner->image_h))
        throw DomainError("pixel observation outside the owning image");
    }
  }
}

void validate(const LidarTrack& t) {
  if (t.states.empty()) throw DomainError("lidar track must be non-empty");
  int prev = t.states.front().frame - 1;
  for (const auto& s : t.states) {
    if (s.frame <= prev) throw DomainError("lidar track frames must strictly increase");
    prev = s.frame;
    if (s.speed_mps < 0.0) throw DomainError("speed_mps must be >= 0");
    if (s.distance_m < 0.0) throw DomainError("distance_m must be >= 0");
    validate(s.position);
  }
}

}  // namespace pst
