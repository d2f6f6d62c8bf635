#pragma once

#include <string>
#include <vector>

#include "pst/config.hpp"

namespace pst {

struct CameraRunResult {
  int camera_id = 0;
  bool ok = false;
  std::string error;       // stage-tagged message when !ok
  double heading_initial_deg = 0.0;
  Assignment assignment;
  FitReport fit;
  int retries_used = 0;
};

struct RunSummary {
  std::vector<CameraRunResult> cameras;
  int failures = 0;
};

// Association + fit with the retry loop: when the fit fails to converge, the
// matched pair with the worst post-fit residual is banned and the association
// is redone, up to max_retries times.
CameraRunResult associate_and_fit(int camera_id, const CameraParams& params0,
                                  std::span<const CameraTrack> camera_tracks,
                                  std::span<const LidarTrack> lidar_tracks,
                                  const FilterConfig& filter, const OptimizerConfig& optimizer,
                                  double k1, double k2, int max_retries);

// Full per-camera pipeline over every camera (heading -> localize -> filter ->
// associate -> fit), cameras in parallel up to cfg.parallel. Writes per-camera
// fit reports, the matched-pair table, and the BEV trajectory export under
// out_dir. Per-camera failures are recorded, not propagated.
RunSummary run_pipeline(const PipelineConfig& cfg, const std::string& out_dir);

// Renders the delimiter-separated summary table (one row per fit report found
// under run_dir). Throws IoError when the directory has no reports.
std::string summarize_run(const std::string& run_dir);

// Writes ground-truth + observed track files and a manifest for a scene.
void write_scene_files(const SceneConfig& cfg, const std::string& out_dir);

}  // namespace pst
