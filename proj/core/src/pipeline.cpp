#include "pst/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pst/error.hpp"
#include "pst/geo.hpp"
#include "pst/geolocation.hpp"
#include "pst/heading.hpp"
#include "pst/track_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pst {

namespace {

json params_to_json(const CameraParams& p) {
  return json{{"focal_px", p.focal_px},   {"pitch_deg", p.pitch_deg},
              {"height_m", p.height_m},   {"heading_deg", p.heading_deg},
              {"lat", p.position.lat},    {"lon", p.position.lon},
              {"image_w", p.image_w},     {"image_h", p.image_h}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_camera_report(const std::string& out_dir, const CameraRunResult& r,
                         const ParamMask& mask) {
  json j;
  j["camera_id"] = r.camera_id;
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["mask"] = mask_to_string(mask);
  j["heading_initial_deg"] = r.heading_initial_deg;
  j["retries_used"] = r.retries_used;
  if (r.ok) {
    j["converged"] = r.fit.converged;
    j["epochs_run"] = r.fit.epochs_run;
    j["skipped_samples"] = r.fit.skipped_samples;
    j["rmse"] = {{"a_before", r.fit.rmse_a_before},
                 {"a_after", r.fit.rmse_a_after},
                 {"d_before", r.fit.rmse_d_before},
                 {"d_after", r.fit.rmse_d_after}};
    j["params_before"] = params_to_json(r.fit.params_before);
    j["params_after"] = params_to_json(r.fit.params_after);
    json pairs = json::array();
    for (const auto& [c, l] : r.assignment.pairs) pairs.push_back({c, l});
    j["pairs"] = pairs;
    j["total_cost"] = r.assignment.total_cost;
    json curve = json::array();
    for (const auto& [epoch, loss] : r.fit.loss_curve) curve.push_back({epoch, loss});
    j["loss_curve"] = curve;
  }
  const std::string name = "fit_cam" + std::to_string(r.camera_id) + "_" +
                           mask_to_string(mask) + ".json";
  write_text((fs::path(out_dir) / name).string(), j.dump(2) + "\n");
}

void write_pairs_table(const std::string& out_dir, const CameraRunResult& r) {
  std::ostringstream out;
  out << "camera_id\tcamera_track\tlidar_track\n";
  for (const auto& [c, l] : r.assignment.pairs)
    out << r.camera_id << "\t" << c << "\t" << l << "\n";
  write_text((fs::path(out_dir) / ("pairs_cam" + std::to_string(r.camera_id) + ".tsv")).string(),
             out.str());
}

void write_bev(const std::string& out_dir, int camera_id,
               std::span<const CameraTrack> cam_tracks, std::span<const LidarTrack> lidar_tracks,
               const CameraRunResult& r) {
  std::ostringstream out;
  auto emit_mono = [&](const CameraParams& params, const char* source) {
    for (const CameraTrack& t : cam_tracks) {
      for (const PixelObservation& o : t.observations) {
        try {
          const LocalizationResult loc = localize(params, o);
          out << camera_id << " " << t.track_id << " " << o.frame << " "
              << format_fixed9(loc.position.lat) << " " << format_fixed9(loc.position.lon) << " "
              << source << "\n";
        } catch (const Error&) {
          // pixel not localizable under these parameters
        }
      }
    }
  };
  emit_mono(r.fit.params_before, "mono");
  emit_mono(r.fit.params_after, "mono-optimized");
  for (const auto& [cam_track, lidar_id] : r.assignment.pairs) {
    const auto it = std::find_if(lidar_tracks.begin(), lidar_tracks.end(),
                                 [lidar_id](const LidarTrack& t) { return t.track_id == lidar_id; });
    if (it == lidar_tracks.end()) continue;
    for (const LidarState& s : it->states)
      out << camera_id << " " << it->track_id << " " << s.frame << " "
          << format_fixed9(s.position.lat) << " " << format_fixed9(s.position.lon) << " lidar\n";
  }
  write_text((fs::path(out_dir) / ("bev_cam" + std::to_string(camera_id) + ".txt")).string(),
             out.str());
}

struct CameraJob {
  int id = 0;
  CameraParams params0;
  std::vector<CameraTrack> cam_tracks;
  bool heading_known = true;  // recorded inputs may omit the heading entirely
};

CameraParams clamp_into_bounds(CameraParams p, const ParamBounds& b, std::string* note) {
  auto clamp1 = [&note](double v, const ParamRange& r, const char* name) {
    if (v < r.lo || v > r.hi) {
      if (note) *note += std::string(note->empty() ? "" : "; ") + name + " clamped into bounds";
      return std::clamp(v, r.lo, r.hi);
    }
    return v;
  };
  p.focal_px = clamp1(p.focal_px, b.focal_px, "focal_px");
  p.height_m = clamp1(p.height_m, b.height_m, "height_m");
  p.pitch_deg = clamp1(p.pitch_deg, b.pitch_deg, "pitch_deg");
  return p;
}

}  // namespace

CameraRunResult associate_and_fit(int camera_id, const CameraParams& params0,
                                  std::span<const CameraTrack> camera_tracks,
                                  std::span<const LidarTrack> lidar_tracks,
                                  const FilterConfig& filter, const OptimizerConfig& optimizer,
                                  double k1, double k2, int max_retries) {
  CameraRunResult result;
  result.camera_id = camera_id;
  result.heading_initial_deg = params0.heading_deg;

  std::map<int, const CameraTrack*> cam_by_id;
  for (const CameraTrack& t : camera_tracks) cam_by_id[t.track_id] = &t;
  std::map<int, const LidarTrack*> lidar_by_id;
  for (const LidarTrack& t : lidar_tracks) lidar_by_id[t.track_id] = &t;

  PairBan banned;
  for (int attempt = 0;; ++attempt) {
    AssociationResult assoc = associate(camera_tracks, lidar_tracks, params0, filter, k1, k2,
                                        banned.empty() ? nullptr : &banned);
    if (assoc.assignment.pairs.empty())
      throw EmptyInputError("association produced no usable pair");

    // Matched pairs become training samples over their common frames.
    std::vector<TrainingSample> samples;
    std::vector<std::pair<std::size_t, std::size_t>> pair_ranges;  // per pair: [begin, end)
    for (const auto& [cam_id, lidar_id] : assoc.assignment.pairs) {
      const std::size_t begin = samples.size();
      const CameraTrack* ct = cam_by_id.at(cam_id);
      const LidarTrack* lt = lidar_by_id.at(lidar_id);
      auto ls = lt->states.begin();
      for (const PixelObservation& o : ct->observations) {
        while (ls != lt->states.end() && ls->frame < o.frame) ++ls;
        if (ls == lt->states.end()) break;
        if (ls->frame != o.frame) continue;
        if (ls->position.lat == params0.position.lat && ls->position.lon == params0.position.lon)
          continue;
        samples.push_back({o, geo_inverse(params0.position, ls->position)});
      }
      pair_ranges.emplace_back(begin, samples.size());
    }
    if (samples.empty()) throw EmptyInputError("matched pairs share no common frames");

    FitReport report = fit(params0, samples, optimizer);
    result.assignment = assoc.assignment;
    result.fit = report;
    result.retries_used = attempt;
    if (report.converged || attempt >= max_retries) return result;

    // Not converged: ban the matched pair with the worst residual under the
    // fitted parameters and associate again.
    double worst = -1.0;
    std::pair<int, int> worst_pair = assoc.assignment.pairs.front();
    for (std::size_t i = 0; i < pair_ranges.size(); ++i) {
      const auto [b, e] = pair_ranges[i];
      if (b == e) continue;
      double mean = std::numeric_limits<double>::infinity();
      try {
        mean = loc_loss(report.params_after,
                        std::span<const TrainingSample>(samples.data() + b, e - b))
                   .value;
      } catch (const EmptyInputError&) {
      }
      if (mean > worst) {
        worst = mean;
        worst_pair = assoc.assignment.pairs[i];
      }
    }
    banned.insert(worst_pair);
  }
}

RunSummary run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);

  std::vector<LidarTrack> lidar_tracks;
  std::vector<CameraJob> jobs;

  if (cfg.scene) {
    const GroundTruthScene scene = generate(*cfg.scene);
    ObservedScene observed = perturb(scene, cfg.scene->noise);
    lidar_tracks = std::move(observed.lidar_tracks);

    std::unique_ptr<CalibrationProvider> provider;
    if (cfg.calibration.mode == CalibrationSpec::Mode::kFixed)
      provider = std::make_unique<FixedCalibration>(cfg.calibration.fixed);
    else if (cfg.calibration.mode == CalibrationSpec::Mode::kFile)
      provider = std::make_unique<CalibrationTable>(read_calibration_file(cfg.calibration.path));

    for (std::size_t i = 0; i < observed.pipeline_params.size(); ++i) {
      CameraJob job;
      job.id = static_cast<int>(i);
      job.params0 = observed.pipeline_params[i];
      if (provider) {
        const CalibrationEstimate e = provider->estimate_for(job.id);
        job.params0.pitch_deg = e.pitch_deg;
        job.params0.focal_px = vfov_to_focal(e.vfov_deg, job.params0.image_h);
      }
      job.cam_tracks = std::move(observed.camera_tracks[i]);
      jobs.push_back(std::move(job));
    }
  } else {
    const RecordedInputs& in = *cfg.inputs;
    const TrackFile tf = read_tracks(in.tracks_path);
    auto cams = camera_tracks_of(tf);
    lidar_tracks = lidar_tracks_of(tf);

    std::unique_ptr<CalibrationProvider> provider;
    if (cfg.calibration.mode == CalibrationSpec::Mode::kFixed)
      provider = std::make_unique<FixedCalibration>(cfg.calibration.fixed);
    else if (cfg.calibration.mode == CalibrationSpec::Mode::kFile)
      provider = std::make_unique<CalibrationTable>(read_calibration_file(cfg.calibration.path));
    else
      throw ConfigError("recorded inputs need a 'fixed' or 'file' calibration source");

    for (const auto& entry : in.cameras) {
      CameraJob job;
      job.id = entry.id;
      const CalibrationEstimate e = provider->estimate_for(entry.id);
      job.params0.focal_px = vfov_to_focal(e.vfov_deg, entry.image_h);
      job.params0.pitch_deg = e.pitch_deg;
      job.params0.height_m = entry.height_m;
      job.params0.heading_deg = entry.heading_deg.value_or(0.0);
      job.heading_known = entry.heading_deg.has_value();
      job.params0.position = entry.position;
      job.params0.image_w = entry.image_w;
      job.params0.image_h = entry.image_h;
      auto it = cams.find(entry.id);
      if (it != cams.end()) job.cam_tracks = std::move(it->second);
      jobs.push_back(std::move(job));
    }
  }

  RunSummary summary;
  summary.cameras.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      CameraJob& job = jobs[i];
      CameraRunResult& r = summary.cameras[i];
      r.camera_id = job.id;
      std::string note;
      try {
        if (cfg.estimate_heading || !job.heading_known) {
          std::vector<LidarTrack> views;
          views.reserve(lidar_tracks.size());
          for (const LidarTrack& t : lidar_tracks)
            views.push_back(with_distance_to(t, job.params0.position));
          try {
            job.params0.heading_deg =
                estimate_heading(views, job.params0.position, cfg.heading);
          } catch (const NoRetainedTracksError& e) {
            if (!job.heading_known) throw Error(std::string("heading: ") + e.what());
            note += std::string(note.empty() ? "" : "; ") + "heading kept from inputs: " + e.what();
          }
        }

        OptimizerConfig opt = cfg.optimizer;
        if (cfg.heading_bounds_relative) {
          const double half = (opt.bounds.heading_deg.hi - opt.bounds.heading_deg.lo) / 2.0;
          opt.bounds.heading_deg = {job.params0.heading_deg - half,
                                    job.params0.heading_deg + half};
        }
        job.params0 = clamp_into_bounds(job.params0, opt.bounds, &note);

        CameraRunResult fit_result =
            associate_and_fit(job.id, job.params0, job.cam_tracks, lidar_tracks, cfg.filter,
                              opt, cfg.k1, cfg.k2, cfg.max_retries);
        fit_result.error = note;
        summary.cameras[i] = std::move(fit_result);
        summary.cameras[i].ok = true;

        write_camera_report(out_dir, summary.cameras[i], opt.mask);
        write_pairs_table(out_dir, summary.cameras[i]);
        write_bev(out_dir, job.id, job.cam_tracks, lidar_tracks, summary.cameras[i]);
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = note.empty() ? e.what() : note + "; " + e.what();
        write_camera_report(out_dir, r, cfg.optimizer.mask);
      }
    }
  };

  const int workers = std::clamp<int>(cfg.parallel, 1, std::max<int>(1, int(jobs.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (const auto& r : summary.cameras)
    if (!r.ok) ++summary.failures;

  json j;
  j["cameras"] = json::array();
  for (const auto& r : summary.cameras) {
    json c;
    c["camera_id"] = r.camera_id;
    c["ok"] = r.ok;
    c["error"] = r.error;
    if (r.ok) {
      c["converged"] = r.fit.converged;
      c["rmse_d_before"] = r.fit.rmse_d_before;
      c["rmse_d_after"] = r.fit.rmse_d_after;
      c["rmse_a_before"] = r.fit.rmse_a_before;
      c["rmse_a_after"] = r.fit.rmse_a_after;
    }
    j["cameras"].push_back(c);
  }
  j["failures"] = summary.failures;
  write_text((fs::path(out_dir) / "summary.json").string(), j.dump(2) + "\n");
  return summary;
}

std::string summarize_run(const std::string& run_dir) {
  if (!fs::is_directory(run_dir)) throw IoError("run directory '" + run_dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(run_dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("fit_cam", 0) == 0 && e.path().extension() == ".json")
      files.push_back(e.path());
  }
  if (files.empty()) throw IoError("no fit reports found under '" + run_dir + "'");
  std::sort(files.begin(), files.end());

  std::ostringstream out;
  out << "camera_id\tmask\tok\tconverged\tretries\tpairs\trmse_a_before\trmse_a_after"
      << "\trmse_d_before\trmse_d_after\n";
  char buf[64];
  auto f4 = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  for (const fs::path& p : files) {
    std::ifstream in(p);
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw IoError(p.string() + ": " + e.what());
    }
    out << j.value("camera_id", -1) << "\t" << j.value("mask", std::string("?")) << "\t"
        << (j.value("ok", false) ? 1 : 0) << "\t";
    if (j.value("ok", false)) {
      out << (j.value("converged", false) ? 1 : 0) << "\t" << j.value("retries_used", 0) << "\t"
          << j["pairs"].size() << "\t" << f4(j["rmse"].value("a_before", 0.0)) << "\t"
          << f4(j["rmse"].value("a_after", 0.0)) << "\t" << f4(j["rmse"].value("d_before", 0.0))
          << "\t" << f4(j["rmse"].value("d_after", 0.0)) << "\n";
    } else {
      out << "-\t-\t-\t-\t-\t-\t-\n";
    }
  }
  return out.str();
}

void write_scene_files(const SceneConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const GroundTruthScene scene = generate(cfg);
  const ObservedScene observed = perturb(scene, cfg.noise);

  auto tracks_to_file = [&](const std::vector<std::vector<CameraTrack>>& cams,
                            const std::vector<LidarTrack>& lidar) {
    std::map<int, std::vector<CameraTrack>> by_camera;
    for (std::size_t i = 0; i < cams.size(); ++i)
      by_camera[static_cast<int>(i)] = cams[i];
    return to_track_file(cfg.fps, by_camera, lidar);
  };
  write_tracks((fs::path(out_dir) / "tracks_truth.txt").string(),
               tracks_to_file(scene.camera_tracks, scene.lidar_tracks));
  write_tracks((fs::path(out_dir) / "tracks_observed.txt").string(),
               tracks_to_file(observed.camera_tracks, observed.lidar_tracks));

  std::map<int, CalibrationEstimate> calib;
  for (std::size_t i = 0; i < cfg.cameras.size(); ++i) {
    const CameraParams& c = cfg.cameras[i];
    calib[static_cast<int>(i)] = {c.pitch_deg, 0.0, focal_to_vfov(c.focal_px, c.image_h)};
  }
  if (!calib.empty())
    write_calibration_file((fs::path(out_dir) / "calibration_truth.txt").string(), calib);

  json j;
  j["seed"] = cfg.seed;
  j["fps"] = cfg.fps;
  j["n_frames"] = scene.n_frames;
  j["n_vehicles"] = cfg.vehicles.size();
  j["files"] = {{"truth", "tracks_truth.txt"},
                {"observed", "tracks_observed.txt"},
                {"calibration", "calibration_truth.txt"}};
  j["cameras"] = json::array();
  for (std::size_t i = 0; i < cfg.cameras.size(); ++i) {
    json c = params_to_json(cfg.cameras[i]);
    c["id"] = i;
    c["pipeline"] = params_to_json(observed.pipeline_params[i]);
    j["cameras"].push_back(c);
  }
  json corr = json::object();
  for (std::size_t v = 0; v < scene.lidar_id_of_vehicle.size(); ++v) {
    json per_cam = json::object();
    for (std::size_t c = 0; c < scene.vehicle_to_camera_id.size(); ++c) {
      const auto it = scene.vehicle_to_camera_id[c].find(static_cast<int>(v));
      if (it != scene.vehicle_to_camera_id[c].end())
        per_cam[std::to_string(c)] = it->second;
    }
    corr[std::to_string(scene.lidar_id_of_vehicle[v])] = per_cam;
  }
  j["correspondence"] = corr;
  write_text((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace pst
