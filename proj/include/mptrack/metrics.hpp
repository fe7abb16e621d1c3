#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mptrack/pipeline.hpp"
#include "mptrack/sequence.hpp"

namespace mptrack {

/// One scored frame: what the tracker predicted for it against what actually
/// happened, camera coordinates for positions. Excluded entries (failures and
/// reinitialization windows) stay in the log but out of every mean.
struct PredictionLogEntry {
  int frame_id = 0;
  Point2 predicted_pos;
  double predicted_vx = 0.0;
  double predicted_vy = 0.0;
  Point2 gt_pos;
  double gt_vx = 0.0;
  double gt_vy = 0.0;
  bool excluded = false;
};

struct PredictionLog {
  std::vector<PredictionLogEntry> entries;
};

/// Joins frame results with ground truth by frame id. The first result row is
/// the initialization frame, not a prediction, and is not logged. Missing
/// ground truth for a logged frame is an alignment error.
PredictionLog build_log(const std::vector<FrameResult>& results,
                        const std::vector<std::pair<int, GroundTruth>>& gt);
PredictionLog build_log(const std::vector<FrameResult>& results,
                        const std::vector<SequenceRecord>& records);

struct PositionErrorStats {
  double mean = 0.0;
  double rms = 0.0;
};

/// Mean Euclidean distance between predicted and true centers over included
/// frames. Throws UndefinedMetricError when nothing is included.
double position_error(const PredictionLog& log);
PositionErrorStats position_error_stats(const PredictionLog& log);

/// mse: mean |v_pred - v_gt|. cosine: mean cosine of the angle between the
/// two, over frames where both norms exceed eps; absent when no frame
/// qualifies (higher is better). magnitude: mean ||v_pred| - |v_gt||.
struct VelocityErrors {
  double mse = 0.0;
  std::optional<double> cosine;
  double magnitude = 0.0;
};
VelocityErrors velocity_errors(const PredictionLog& log, double eps = 1e-6);

struct MetricSet {
  PositionErrorStats position;
  VelocityErrors velocity;
  int frames_evaluated = 0;
  int failures = 0;
};
MetricSet evaluate(const PredictionLog& log);

/// Runs the configured tracker and the zero-velocity reference (every
/// component switched off) over the same records, detections, and seed.
struct BaselineComparison {
  MetricSet tracker;
  MetricSet baseline;
  double position_reduction = 1.0;  // tracker mean / baseline mean; 1 when
                                    // the baseline error is (near) zero
};
BaselineComparison compare_baseline(const std::vector<SequenceRecord>& frames,
                                    const TrackerConfig& cfg,
                                    std::uint64_t seed);

/// Mean across sequences: unweighted by default (each sequence counts once),
/// optionally weighted by evaluated frame counts.
MetricSet aggregate(const std::vector<MetricSet>& sets,
                    bool weight_by_frames = false);

/// Plain-text tables, one row per named metric set. Cosine renders as "-"
/// when undefined.
std::string render_report(
    const std::vector<std::pair<std::string, MetricSet>>& rows);
std::string render_comparison(const BaselineComparison& cmp);

}  // namespace mptrack
