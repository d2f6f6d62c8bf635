#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pst/association.hpp"
#include "pst/heading.hpp"
#include "pst/optimizer.hpp"
#include "pst/simulator.hpp"

namespace pst {

// How a camera's initial pitch/roll/vfov is obtained.
struct CalibrationSpec {
  enum class Mode { kSceneBias, kFixed, kFile };
  Mode mode = Mode::kSceneBias;  // scene truth plus the scene's param_bias
  CalibrationEstimate fixed;     // kFixed
  std::string path;              // kFile
};

// Recorded-data inputs: a track file plus per-camera survey data.
struct RecordedInputs {
  std::string tracks_path;
  struct CameraEntry {
    int id = 0;
    GeoPoint position;
    double height_m = 0.0;
    int image_w = 0;
    int image_h = 0;
    std::optional<double> heading_deg;  // absent: estimate via the heading module
  };
  std::vector<CameraEntry> cameras;
};

struct PipelineConfig {
  std::optional<SceneConfig> scene;     // exactly one of scene / inputs
  std::optional<RecordedInputs> inputs;

  HeadingConfig heading;
  FilterConfig filter;
  OptimizerConfig optimizer;

  // Heading bounds interpretation: absolute uses optimizer.bounds.heading_deg
  // as-is; relative recenters a band of the same width on the initial heading.
  bool heading_bounds_relative = false;

  double k1 = 1.0;  // weight per meter of range residual
  double k2 = 1.0;  // weight per degree of bearing residual
  int max_retries = 3;

  CalibrationSpec calibration;

  std::string output_dir = "out";
  int parallel = 1;
  bool estimate_heading = true;  // run the heading module; otherwise keep initial values
  bool verbose = false;
};

// Parses the JSON config; unknown or ill-typed fields raise ConfigError with
// the offending key in the message. Every threshold has its documented default
// and may be omitted.
PipelineConfig load_pipeline_config(const std::string& path);
SceneConfig load_scene_config(const std::string& path);

SceneConfig scene_config_from_json_text(const std::string& text, const std::string& origin_name);
PipelineConfig pipeline_config_from_json_text(const std::string& text,
                                              const std::string& origin_name);

}  // namespace pst
