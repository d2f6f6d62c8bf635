#include "pst/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pst/error.hpp"

namespace pst {

namespace {

using nlohmann::json;

json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void bad_field(const std::string& ctx, const std::string& key,
                            const std::string& what) {
  throw ConfigError(ctx + ": field '" + key + "' " + what);
}

double num_req(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key)) bad_field(ctx, key, "is required");
  if (!j.at(key).is_number()) bad_field(ctx, key, "must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& ctx, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) bad_field(ctx, key, "must be a number");
  return j.at(key).get<double>();
}

int int_or(const json& j, const std::string& ctx, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer()) bad_field(ctx, key, "must be an integer");
  return j.at(key).get<int>();
}

bool bool_or(const json& j, const std::string& ctx, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) bad_field(ctx, key, "must be a boolean");
  return j.at(key).get<bool>();
}

std::string str_or(const json& j, const std::string& ctx, const char* key,
                   const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) bad_field(ctx, key, "must be a string");
  return j.at(key).get<std::string>();
}

ParamBias read_param_bias(const json& j, const std::string& ctx) {
  ParamBias b;
  b.focal_rel = num_or(j, ctx, "focal_rel", 0.0);
  b.pitch_deg = num_or(j, ctx, "pitch_deg", 0.0);
  b.height_m = num_or(j, ctx, "height_m", 0.0);
  b.heading_deg = num_or(j, ctx, "heading_deg", 0.0);
  return b;
}

NoiseConfig read_noise(const json& j, const std::string& ctx) {
  NoiseConfig n;
  n.gnss_sigma_m = num_or(j, ctx, "gnss_sigma_m", 0.0);
  n.pixel_sigma_px = num_or(j, ctx, "pixel_sigma_px", 0.0);
  n.dropout_rate = num_or(j, ctx, "dropout_rate", 0.0);
  if (j.contains("param_bias")) n.param_bias = read_param_bias(j.at("param_bias"), ctx + ".param_bias");
  n.camera_east_offset_m = num_or(j, ctx, "camera_east_offset_m", 0.0);
  n.camera_north_offset_m = num_or(j, ctx, "camera_north_offset_m", 0.0);
  return n;
}

CameraParams read_camera(const json& j, const std::string& ctx) {
  CameraParams c;
  c.focal_px = num_req(j, ctx, "focal_px");
  c.pitch_deg = num_req(j, ctx, "pitch_deg");
  c.height_m = num_req(j, ctx, "height_m");
  c.heading_deg = num_req(j, ctx, "heading_deg");
  c.position.lat = num_req(j, ctx, "lat");
  c.position.lon = num_req(j, ctx, "lon");
  c.image_w = int_or(j, ctx, "image_w", 1920);
  c.image_h = int_or(j, ctx, "image_h", 1080);
  return c;
}

TrajectorySpec read_vehicle(const json& j, const std::string& ctx) {
  TrajectorySpec v;
  const std::string kind = str_or(j, ctx, "kind", "straight");
  if (kind == "straight") v.kind = TrajectorySpec::Kind::kStraight;
  else if (kind == "turn") v.kind = TrajectorySpec::Kind::kTurn;
  else if (kind == "stationary_then_go") v.kind = TrajectorySpec::Kind::kStationaryThenGo;
  else bad_field(ctx, "kind", "must be straight, turn or stationary_then_go");
  v.start_east_m = num_or(j, ctx, "start_east_m", 0.0);
  v.start_north_m = num_or(j, ctx, "start_north_m", 0.0);
  v.heading_deg = num_or(j, ctx, "heading_deg", 0.0);
  v.speed_mps = num_or(j, ctx, "speed_mps", 10.0);
  v.lane_offset_m = num_or(j, ctx, "lane_offset_m", 0.0);
  v.stop_duration_s = num_or(j, ctx, "stop_duration_s", 0.0);
  v.accel_mps2 = num_or(j, ctx, "accel_mps2", 2.5);
  v.turn_start_s = num_or(j, ctx, "turn_start_s", 1.0);
  v.turn_rate_deg_s = num_or(j, ctx, "turn_rate_deg_s", 18.0);
  v.turn_duration_s = num_or(j, ctx, "turn_duration_s", 5.0);
  return v;
}

SceneConfig read_scene(const json& j, const std::string& ctx) {
  SceneConfig s;
  s.seed = static_cast<std::uint64_t>(num_or(j, ctx, "seed", 1.0));
  s.duration_s = num_or(j, ctx, "duration_s", 5.0);
  s.fps = num_or(j, ctx, "fps", 10.0);
  if (j.contains("origin")) {
    s.origin.lat = num_req(j.at("origin"), ctx + ".origin", "lat");
    s.origin.lon = num_req(j.at("origin"), ctx + ".origin", "lon");
  }
  if (j.contains("cameras")) {
    if (!j.at("cameras").is_array()) bad_field(ctx, "cameras", "must be an array");
    int i = 0;
    for (const auto& c : j.at("cameras"))
      s.cameras.push_back(read_camera(c, ctx + ".cameras[" + std::to_string(i++) + "]"));
  }
  if (j.contains("vehicles")) {
    if (!j.at("vehicles").is_array()) bad_field(ctx, "vehicles", "must be an array");
    int i = 0;
    for (const auto& v : j.at("vehicles"))
      s.vehicles.push_back(read_vehicle(v, ctx + ".vehicles[" + std::to_string(i++) + "]"));
  }
  if (j.contains("noise")) s.noise = read_noise(j.at("noise"), ctx + ".noise");
  return s;
}

HeadingConfig read_heading(const json& j, const std::string& ctx) {
  HeadingConfig h;
  h.t_stationary_s = num_or(j, ctx, "t_stationary_s", h.t_stationary_s);
  h.d_max_m = num_or(j, ctx, "d_max_m", h.d_max_m);
  h.straightness_tol = num_or(j, ctx, "straightness_tol", h.straightness_tol);
  h.mode_bin_deg = num_or(j, ctx, "mode_bin_deg", h.mode_bin_deg);
  h.static_eps_m = num_or(j, ctx, "static_eps_m", h.static_eps_m);
  h.static_window_s = num_or(j, ctx, "static_window_s", h.static_window_s);
  h.fps = num_or(j, ctx, "fps", h.fps);
  return h;
}

FilterConfig read_filter(const json& j, const std::string& ctx) {
  FilterConfig f;
  f.t_angle_deg = num_or(j, ctx, "t_angle_deg", f.t_angle_deg);
  f.t_dist_m = num_or(j, ctx, "t_dist_m", f.t_dist_m);
  f.t_speed_mps = num_or(j, ctx, "t_speed_mps", f.t_speed_mps);
  f.t_pixel = num_or(j, ctx, "t_pixel", f.t_pixel);
  f.displacement_eps_px = num_or(j, ctx, "displacement_eps_px", f.displacement_eps_px);
  return f;
}

ParamRange read_range(const json& j, const std::string& ctx, const char* key, ParamRange dflt) {
  if (!j.contains(key)) return dflt;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bad_field(ctx, key, "must be a [lower, upper] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

OptimizerConfig read_optimizer(const json& j, const std::string& ctx) {
  OptimizerConfig o;
  o.lr = num_or(j, ctx, "lr", o.lr);
  o.epochs = int_or(j, ctx, "epochs", o.epochs);
  o.adam_beta1 = num_or(j, ctx, "adam_beta1", o.adam_beta1);
  o.adam_beta2 = num_or(j, ctx, "adam_beta2", o.adam_beta2);
  o.adam_eps = num_or(j, ctx, "adam_eps", o.adam_eps);
  o.batch = int_or(j, ctx, "batch", o.batch);
  o.converge_rel_tol = num_or(j, ctx, "converge_rel_tol", o.converge_rel_tol);
  o.converge_window = int_or(j, ctx, "converge_window", o.converge_window);
  o.early_stop = bool_or(j, ctx, "early_stop", o.early_stop);
  o.seed = static_cast<std::uint64_t>(num_or(j, ctx, "seed", 0.0));
  if (j.contains("mask")) {
    try {
      o.mask = parse_mask(str_or(j, ctx, "mask", "all"));
    } catch (const ConfigError& e) {
      bad_field(ctx, "mask", e.what());
    }
  }
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    const std::string bctx = ctx + ".bounds";
    o.bounds.focal_px = read_range(b, bctx, "focal_px", o.bounds.focal_px);
    o.bounds.height_m = read_range(b, bctx, "height_m", o.bounds.height_m);
    o.bounds.pitch_deg = read_range(b, bctx, "pitch_deg", o.bounds.pitch_deg);
    o.bounds.heading_deg = read_range(b, bctx, "heading_deg", o.bounds.heading_deg);
  }
  return o;
}

CalibrationSpec read_calibration(const json& j, const std::string& ctx) {
  CalibrationSpec c;
  const std::string mode = str_or(j, ctx, "mode", "scene_bias");
  if (mode == "scene_bias") {
    c.mode = CalibrationSpec::Mode::kSceneBias;
  } else if (mode == "fixed") {
    c.mode = CalibrationSpec::Mode::kFixed;
    c.fixed.pitch_deg = num_req(j, ctx, "pitch_deg");
    c.fixed.roll_deg = num_or(j, ctx, "roll_deg", 0.0);
    c.fixed.vfov_deg = num_req(j, ctx, "vfov_deg");
  } else if (mode == "file") {
    c.mode = CalibrationSpec::Mode::kFile;
    c.path = str_or(j, ctx, "path", "");
    if (c.path.empty()) bad_field(ctx, "path", "is required for mode 'file'");
  } else {
    bad_field(ctx, "mode", "must be scene_bias, fixed or file");
  }
  return c;
}

RecordedInputs read_inputs(const json& j, const std::string& ctx) {
  RecordedInputs in;
  in.tracks_path = str_or(j, ctx, "tracks", "");
  if (in.tracks_path.empty()) bad_field(ctx, "tracks", "is required");
  if (!j.contains("cameras") || !j.at("cameras").is_array() || j.at("cameras").empty())
    bad_field(ctx, "cameras", "must be a non-empty array");
  int i = 0;
  for (const auto& c : j.at("cameras")) {
    const std::string cctx = ctx + ".cameras[" + std::to_string(i++) + "]";
    RecordedInputs::CameraEntry e;
    e.id = int_or(c, cctx, "id", 0);
    e.position.lat = num_req(c, cctx, "lat");
    e.position.lon = num_req(c, cctx, "lon");
    e.height_m = num_req(c, cctx, "height_m");
    e.image_w = int_or(c, cctx, "image_w", 1920);
    e.image_h = int_or(c, cctx, "image_h", 1080);
    if (c.contains("heading_deg")) e.heading_deg = num_req(c, cctx, "heading_deg");
    in.cameras.push_back(e);
  }
  return in;
}

}  // namespace

SceneConfig scene_config_from_json_text(const std::string& text, const std::string& origin_name) {
  return read_scene(parse_text(text, origin_name), origin_name);
}

SceneConfig load_scene_config(const std::string& path) {
  return scene_config_from_json_text(read_file(path), path);
}

PipelineConfig pipeline_config_from_json_text(const std::string& text,
                                              const std::string& origin_name) {
  const json j = parse_text(text, origin_name);
  PipelineConfig cfg;
  const bool has_scene = j.contains("scene");
  const bool has_inputs = j.contains("inputs");
  if (has_scene == has_inputs)
    throw ConfigError(origin_name + ": exactly one of 'scene' or 'inputs' is required");
  if (has_scene) cfg.scene = read_scene(j.at("scene"), origin_name + ".scene");
  if (has_inputs) cfg.inputs = read_inputs(j.at("inputs"), origin_name + ".inputs");

  if (j.contains("heading")) cfg.heading = read_heading(j.at("heading"), origin_name + ".heading");
  if (j.contains("filter")) cfg.filter = read_filter(j.at("filter"), origin_name + ".filter");
  if (j.contains("optimizer"))
    cfg.optimizer = read_optimizer(j.at("optimizer"), origin_name + ".optimizer");
  cfg.heading_bounds_relative = bool_or(j, origin_name, "heading_bounds_relative", false);

  if (j.contains("association")) {
    const auto& a = j.at("association");
    const std::string actx = origin_name + ".association";
    cfg.k1 = num_or(a, actx, "k1", cfg.k1);
    cfg.k2 = num_or(a, actx, "k2", cfg.k2);
    cfg.max_retries = int_or(a, actx, "max_retries", cfg.max_retries);
  }
  if (j.contains("calibration"))
    cfg.calibration = read_calibration(j.at("calibration"), origin_name + ".calibration");

  cfg.output_dir = str_or(j, origin_name, "output_dir", cfg.output_dir);
  cfg.parallel = int_or(j, origin_name, "parallel", cfg.parallel);
  cfg.estimate_heading = bool_or(j, origin_name, "estimate_heading", cfg.estimate_heading);
  cfg.verbose = bool_or(j, origin_name, "verbose", cfg.verbose);

  // Keep the stationary test and the scene clock on the same frame rate.
  if (cfg.scene && !(j.contains("heading") && j.at("heading").contains("fps")))
    cfg.heading.fps = cfg.scene->fps;
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  return pipeline_config_from_json_text(read_file(path), path);
}

}  // namespace pst
