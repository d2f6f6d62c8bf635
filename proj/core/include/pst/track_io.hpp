#pragma once

#include <map>
#include <string>
#include <vector>

#include "pst/camera_model.hpp"
#include "pst/types.hpp"

namespace pst {

// Line-delimited track file. One record per observation:
//   cam <camera_id> <track_id> <frame> <u> <v>
//   lidar <track_id> <frame> <lat> <lon> <face_deg> <speed_mps>
// The header line declares the schema version and frame rate. All reals are
// written with fixed 9-decimal formatting, so write(read(file)) reproduces the
// file byte for byte.
struct TrackFile {
  struct CamRecord {
    int camera_id = 0;
    int track_id = 0;
    int frame = 0;
    double u = 0.0;
    double v = 0.0;
  };
  struct LidarRecord {
    int track_id = 0;
    int frame = 0;
    double lat = 0.0;
    double lon = 0.0;
    double face_deg = 0.0;
    double speed_mps = 0.0;
  };

  int version = 1;
  double fps = 10.0;
  std::vector<CamRecord> camera_records;
  std::vector<LidarRecord> lidar_records;
};

void write_tracks(const std::string& path, const TrackFile& data);

// Throws IoError naming the path and line on any malformed input.
TrackFile read_tracks(const std::string& path);

// Groups records into domain tracks (sorted by frame within each track).
std::map<int, std::vector<CameraTrack>> camera_tracks_of(const TrackFile& data);
std::vector<LidarTrack> lidar_tracks_of(const TrackFile& data);

TrackFile to_track_file(double fps,
                        const std::map<int, std::vector<CameraTrack>>& cams_by_camera,
                        const std::vector<LidarTrack>& lidar);

// Calibration-estimate file: header "pst-calib v1", then one record per line:
//   <camera_id> <pitch_deg> <roll_deg> <vfov_deg>
std::map<int, CalibrationEstimate> read_calibration_file(const std::string& path);
void write_calibration_file(const std::string& path,
                            const std::map<int, CalibrationEstimate>& table);

// Fixed 9-decimal rendering used by every writer above.
std::string format_fixed9(double value);

}  // namespace pst
