#include "pst/track_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pst/error.hpp"

namespace pst {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw IoError(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& path, int line, const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(path, line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) fail(path, line, "trailing characters in number '" + tok + "'");
  return v;
}

int parse_int(const std::string& path, int line, const std::string& tok) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    fail(path, line, "expected an integer, got '" + tok + "'");
  }
  if (pos != tok.size()) fail(path, line, "trailing characters in integer '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_fixed9(double value) {
  if (!std::isfinite(value)) throw IoError("cannot serialize a non-finite value");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", value);
  return buf;
}

void write_tracks(const std::string& path, const TrackFile& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "pst-tracks v" << data.version << " fps=" << format_fixed9(data.fps) << "\n";
  for (const auto& r : data.camera_records)
    out << "cam " << r.camera_id << " " << r.track_id << " " << r.frame << " "
        << format_fixed9(r.u) << " " << format_fixed9(r.v) << "\n";
  for (const auto& r : data.lidar_records)
    out << "lidar " << r.track_id << " " << r.frame << " " << format_fixed9(r.lat) << " "
        << format_fixed9(r.lon) << " " << format_fixed9(r.face_deg) << " "
        << format_fixed9(r.speed_mps) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

TrackFile read_tracks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open track file '" + path + "'");
  TrackFile data;
  std::string line;
  int lineno = 0;

  if (!std::getline(in, line)) fail(path, 1, "empty file, expected a header");
  ++lineno;
  {
    auto toks = split_ws(line);
    if (toks.size() != 3 || toks[0] != "pst-tracks" || toks[1].size() < 2 || toks[1][0] != 'v' ||
        toks[2].rfind("fps=", 0) != 0)
      fail(path, lineno, "bad header, expected 'pst-tracks v<N> fps=<rate>'");
    data.version = parse_int(path, lineno, toks[1].substr(1));
    if (data.version != 1) fail(path, lineno, "unsupported schema version " + toks[1]);
    data.fps = parse_double(path, lineno, toks[2].substr(4));
    if (!(data.fps > 0.0)) fail(path, lineno, "fps must be > 0");
  }

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "cam") {
      if (toks.size() != 6) fail(path, lineno, "cam record needs 5 fields");
      data.camera_records.push_back({parse_int(path, lineno, toks[1]),
                                     parse_int(path, lineno, toks[2]),
                                     parse_int(path, lineno, toks[3]),
                                     parse_double(path, lineno, toks[4]),
                                     parse_double(path, lineno, toks[5])});
    } else if (toks[0] == "lidar") {
      if (toks.size() != 7) fail(path, lineno, "lidar record needs 6 fields");
      data.lidar_records.push_back({parse_int(path, lineno, toks[1]),
                                    parse_int(path, lineno, toks[2]),
                                    parse_double(path, lineno, toks[3]),
                                    parse_double(path, lineno, toks[4]),
                                    parse_double(path, lineno, toks[5]),
                                    parse_double(path, lineno, toks[6])});
    } else {
      fail(path, lineno, "unknown record kind '" + toks[0] + "'");
    }
  }
  return data;
}

std::map<int, std::vector<CameraTrack>> camera_tracks_of(const TrackFile& data) {
  std::map<int, std::map<int, CameraTrack>> grouped;
  for (const auto& r : data.camera_records) {
    CameraTrack& t = grouped[r.camera_id][r.track_id];
    t.track_id = r.track_id;
    t.observations.push_back({r.frame, r.u, r.v});
  }
  std::map<int, std::vector<CameraTrack>> out;
  for (auto& [cam, tracks] : grouped) {
    for (auto& [id, t] : tracks) {
      std::sort(t.observations.begin(), t.observations.end(),
                [](const PixelObservation& a, const PixelObservation& b) {
                  return a.frame < b.frame;
                });
      out[cam].push_back(std::move(t));
    }
  }
  return out;
}

std::vector<LidarTrack> lidar_tracks_of(const TrackFile& data) {
  std::map<int, LidarTrack> grouped;
  for (const auto& r : data.lidar_records) {
    LidarTrack& t = grouped[r.track_id];
    t.track_id = r.track_id;
    t.states.push_back({r.frame, {r.lat, r.lon}, r.face_deg, r.speed_mps, 0.0});
  }
  std::vector<LidarTrack> out;
  for (auto& [id, t] : grouped) {
    std::sort(t.states.begin(), t.states.end(),
              [](const LidarState& a, const LidarState& b) { return a.frame < b.frame; });
    out.push_back(std::move(t));
  }
  return out;
}

TrackFile to_track_file(double fps,
                        const std::map<int, std::vector<CameraTrack>>& cams_by_camera,
                        const std::vector<LidarTrack>& lidar) {
  TrackFile data;
  data.fps = fps;
  for (const auto& [cam_id, tracks] : cams_by_camera)
    for (const auto& t : tracks)
      for (const auto& o : t.observations)
        data.camera_records.push_back({cam_id, t.track_id, o.frame, o.u, o.v});
  for (const auto& t : lidar)
    for (const auto& s : t.states)
      data.lidar_records.push_back(
          {t.track_id, s.frame, s.position.lat, s.position.lon, s.face_deg, s.speed_mps});
  return data;
}

std::map<int, CalibrationEstimate> read_calibration_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration file '" + path + "'");
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) fail(path, 1, "empty file, expected a header");
  ++lineno;
  if (split_ws(line) != std::vector<std::string>{"pst-calib", "v1"})
    fail(path, lineno, "bad header, expected 'pst-calib v1'");
  std::map<int, CalibrationEstimate> out;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 4)
      fail(path, lineno, "calibration record needs <camera_id> <pitch> <roll> <vfov>");
    const int id = parse_int(path, lineno, toks[0]);
    CalibrationEstimate e{parse_double(path, lineno, toks[1]),
                          parse_double(path, lineno, toks[2]),
                          parse_double(path, lineno, toks[3])};
    validate(e);
    out[id] = e;
  }
  return out;
}

void write_calibration_file(const std::string& path,
                            const std::map<int, CalibrationEstimate>& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "pst-calib v1\n";
  for (const auto& [id, e] : table)
    out << id << " " << format_fixed9(e.pitch_deg) << " " << format_fixed9(e.roll_deg) << " "
        << format_fixed9(e.vfov_deg) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace pst
