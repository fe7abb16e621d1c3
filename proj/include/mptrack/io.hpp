#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mptrack/pipeline.hpp"
#include "mptrack/sequence.hpp"
#include "mptrack/synth.hpp"

namespace mptrack {

/// JSON Lines files, one object per line.
///
/// correspondences: {"frame": int, "ref_frame": int,
///                   "pairs": [[sx, sy, dx, dy], ...]}
///   src in reference-frame coordinates, dst in current-frame coordinates.
/// detections:      {"frame": int, "x","y","w","h","conf": float}
///   the boundary where an external detector's outputs are imported.
/// ground truth:    {"frame": int, "x","y","w","h","vx","vy": float}
/// results:         one object per FrameResult (prediction, search region,
///                  output box, status bits).

struct CorrespondenceRecord {
  int frame_id = 0;
  int ref_frame_id = 0;
  CorrespondenceSet correspondences;
};

std::vector<CorrespondenceRecord> read_correspondences(const std::string& path);
void write_correspondences(const std::string& path,
                           const std::vector<CorrespondenceRecord>& records);

std::vector<std::pair<int, Detection>> read_detections(const std::string& path);
void write_detections(const std::string& path,
                      const std::vector<std::pair<int, Detection>>& records);

std::vector<std::pair<int, GroundTruth>> read_ground_truth(
    const std::string& path);
void write_ground_truth(const std::string& path,
                        const std::vector<std::pair<int, GroundTruth>>& records);

std::vector<FrameResult> read_results(const std::string& path);
void write_results(const std::string& path,
                   const std::vector<FrameResult>& results);

/// Merges per-frame correspondence, detection, and ground-truth files into
/// one record stream keyed by the correspondence file's frame ids. The
/// detection and ground-truth paths may be empty strings (no such data).
std::vector<SequenceRecord> load_sequence(const std::string& correspondences,
                                          const std::string& detections,
                                          const std::string& ground_truth);

/// Sectioned key=value config text covering every TrackerConfig field:
/// [tracker] n, theta_v, theta_d, reinit_skip, velocity_handoff_inflation;
/// [kalman] *_std noise scales; [ransac] iterations, inlier_threshold,
/// min_inliers, max_outlier_ratio, confidence. Unknown sections or keys are
/// validation errors; omitted keys keep their defaults.
TrackerConfig parse_config(const std::string& text);
TrackerConfig load_config(const std::string& path);
std::string render_config(const TrackerConfig& cfg);

/// Scenario specs serialize to a single JSON object; loading validates field
/// types and names, reporting the offending field path.
ScenarioSpec scenario_from_json(const std::string& text);
ScenarioSpec load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioSpec& spec);
void save_scenario(const std::string& path, const ScenarioSpec& spec);

/// Run manifest: one input source (a scenario spec to regenerate, or replay
/// files) plus tracking knobs. Relative paths are resolved against the
/// manifest file's directory when loaded from disk.
struct RunManifest {
  std::string config_path;       // optional; empty = built-in defaults
  std::string scenario_path;     // exactly one of scenario_path ...
  std::string correspondence_path;  // ... or the three replay paths
  std::string detection_path;
  std::string ground_truth_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  AblationFlags ablation;
};

RunManifest manifest_from_json(const std::string& text);
RunManifest load_manifest(const std::string& path);
std::string manifest_to_json(const RunManifest& m);
void save_manifest(const std::string& path, const RunManifest& m);

/// Whole-file helpers; read throws an I/O error naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mptrack
