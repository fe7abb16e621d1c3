#include "mptrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "mptrack/detector.hpp"
#include "mptrack/errors.hpp"

namespace mptrack {
namespace {

PredictionLog join(const std::vector<FrameResult>& results,
                   const std::unordered_map<int, GroundTruth>& gt_by_frame) {
  PredictionLog log;
  if (results.empty()) return log;
  // results[0] is the initialization frame: its output is the seed state, not
  // a prediction, so scoring starts at the second row.
  log.entries.reserve(results.size() - 1);
  for (std::size_t i = 1; i < results.size(); ++i) {
    const FrameResult& r = results[i];
    PredictionLogEntry e;
    e.frame_id = r.frame_id;
    e.excluded = r.failure || r.skipped;
    if (!e.excluded) {
      auto it = gt_by_frame.find(r.frame_id);
      if (it == gt_by_frame.end()) {
        throw ValidationError("metrics: no ground truth for frame " +
                              std::to_string(r.frame_id));
      }
      e.predicted_pos = r.predicted_box_camera.center();
      e.predicted_vx = r.predicted_vx_ref;
      e.predicted_vy = r.predicted_vy_ref;
      e.gt_pos = it->second.box.center();
      e.gt_vx = it->second.vx;
      e.gt_vy = it->second.vy;
    }
    log.entries.push_back(e);
  }
  return log;
}

}  // namespace

PredictionLog build_log(const std::vector<FrameResult>& results,
                        const std::vector<std::pair<int, GroundTruth>>& gt) {
  std::unordered_map<int, GroundTruth> by_frame;
  by_frame.reserve(gt.size());
  for (const auto& [frame, g] : gt) by_frame[frame] = g;
  return join(results, by_frame);
}

PredictionLog build_log(const std::vector<FrameResult>& results,
                        const std::vector<SequenceRecord>& records) {
  std::unordered_map<int, GroundTruth> by_frame;
  by_frame.reserve(records.size());
  for (const SequenceRecord& rec : records) {
    if (rec.gt) by_frame[rec.frame_id] = *rec.gt;
  }
  return join(results, by_frame);
}

double position_error(const PredictionLog& log) {
  return position_error_stats(log).mean;
}

PositionErrorStats position_error_stats(const PredictionLog& log) {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  for (const PredictionLogEntry& e : log.entries) {
    if (e.excluded) continue;
    const double dx = e.predicted_pos.x - e.gt_pos.x;
    const double dy = e.predicted_pos.y - e.gt_pos.y;
    const double d = std::hypot(dx, dy);
    sum += d;
    sum_sq += d * d;
    ++n;
  }
  if (n == 0) {
    throw UndefinedMetricError("position error: no frames to evaluate");
  }
  PositionErrorStats stats;
  stats.mean = sum / n;
  stats.rms = std::sqrt(sum_sq / n);
  return stats;
}

VelocityErrors velocity_errors(const PredictionLog& log, double eps) {
  double mse_sum = 0.0;
  double mag_sum = 0.0;
  double cos_sum = 0.0;
  int n = 0;
  int n_cos = 0;
  for (const PredictionLogEntry& e : log.entries) {
    if (e.excluded) continue;
    const double dvx = e.predicted_vx - e.gt_vx;
    const double dvy = e.predicted_vy - e.gt_vy;
    mse_sum += std::hypot(dvx, dvy);
    const double np = std::hypot(e.predicted_vx, e.predicted_vy);
    const double ng = std::hypot(e.gt_vx, e.gt_vy);
    mag_sum += std::abs(np - ng);
    if (np > eps && ng > eps) {
      cos_sum += (e.predicted_vx * e.gt_vx + e.predicted_vy * e.gt_vy) /
                 (np * ng);
      ++n_cos;
    }
    ++n;
  }
  if (n == 0) {
    throw UndefinedMetricError("velocity error: no frames to evaluate");
  }
  VelocityErrors v;
  v.mse = mse_sum / n;
  v.magnitude = mag_sum / n;
  if (n_cos > 0) v.cosine = cos_sum / n_cos;
  return v;
}

MetricSet evaluate(const PredictionLog& log) {
  MetricSet m;
  m.position = position_error_stats(log);
  m.velocity = velocity_errors(log);
  for (const PredictionLogEntry& e : log.entries) {
    if (!e.excluded) ++m.frames_evaluated;
  }
  return m;
}

BaselineComparison compare_baseline(const std::vector<SequenceRecord>& frames,
                                    const TrackerConfig& cfg,
                                    std::uint64_t seed) {
  if (frames.empty()) {
    throw ValidationError("compare_baseline: empty sequence");
  }
  if (!frames.front().gt) {
    throw ValidationError(
        "compare_baseline: first frame needs ground truth to initialize");
  }
  std::vector<std::pair<int, Detection>> det_records;
  for (const SequenceRecord& rec : frames) {
    if (rec.detection) det_records.emplace_back(rec.frame_id, *rec.detection);
  }
  ReplaySource source(det_records, frames.front().frame_id,
                      frames.back().frame_id);

  const Box b = frames.front().gt->box;
  Detection init;
  init.x = b.x;
  init.y = b.y;
  init.w = b.w;
  init.h = b.h;
  init.confidence = 1.0;

  auto run = [&](const TrackerConfig& c) {
    std::vector<FrameResult> results =
        run_sequence(frames, init, c, source, seed, /*evaluate=*/true);
    MetricSet m = evaluate(build_log(results, frames));
    for (const FrameResult& r : results) {
      if (r.failure) ++m.failures;
    }
    return m;
  };

  BaselineComparison cmp;
  cmp.tracker = run(cfg);
  TrackerConfig base_cfg = cfg;
  base_cfg.ablation.motion_decouple = false;
  base_cfg.ablation.motion_prediction = false;
  base_cfg.ablation.adaptive_search_region = false;
  cmp.baseline = run(base_cfg);
  cmp.position_reduction = cmp.baseline.position.mean > 1e-12
                               ? cmp.tracker.position.mean /
                                     cmp.baseline.position.mean
                               : 1.0;
  return cmp;
}

MetricSet aggregate(const std::vector<MetricSet>& sets,
                    bool weight_by_frames) {
  if (sets.empty()) {
    throw UndefinedMetricError("aggregate: no metric sets");
  }
  MetricSet out;
  double total_w = 0.0;
  double cos_w = 0.0;
  double mean_sq = 0.0;
  double cos_sum = 0.0;
  for (const MetricSet& m : sets) {
    const double w = weight_by_frames ? m.frames_evaluated : 1.0;
    out.position.mean += w * m.position.mean;
    mean_sq += w * m.position.rms * m.position.rms;
    out.velocity.mse += w * m.velocity.mse;
    out.velocity.magnitude += w * m.velocity.magnitude;
    if (m.velocity.cosine) {
      cos_sum += w * *m.velocity.cosine;
      cos_w += w;
    }
    out.frames_evaluated += m.frames_evaluated;
    out.failures += m.failures;
    total_w += w;
  }
  if (total_w <= 0.0) {
    throw UndefinedMetricError("aggregate: zero total weight");
  }
  out.position.mean /= total_w;
  out.position.rms = std::sqrt(mean_sq / total_w);
  out.velocity.mse /= total_w;
  out.velocity.magnitude /= total_w;
  if (cos_w > 0.0) out.velocity.cosine = cos_sum / cos_w;
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string fmt_cos(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string("-");
}

}  // namespace

std::string render_report(
    const std::vector<std::pair<std::string, MetricSet>>& rows) {
  std::size_t name_w = 4;  // "Name"
  for (const auto& [name, m] : rows) name_w = std::max(name_w, name.size());

  struct Col {
    const char* header;
    std::size_t width;
  };
  Col cols[] = {{"Pos Err.", 10}, {"Pos RMS", 10}, {"MSE Err.", 10},
                {"Cosine", 8},    {"Mag.", 8},     {"Frames", 7},
                {"Fails", 6}};

  std::ostringstream os;
  os << std::string(name_w, ' ');
  for (const Col& c : cols) {
    std::string h = c.header;
    os << "  " << std::string(c.width - h.size(), ' ') << h;
  }
  os << '\n';
  for (const auto& [name, m] : rows) {
    os << name << std::string(name_w - name.size(), ' ');
    const std::string cells[] = {fmt(m.position.mean),
                                 fmt(m.position.rms),
                                 fmt(m.velocity.mse),
                                 fmt_cos(m.velocity.cosine),
                                 fmt(m.velocity.magnitude),
                                 std::to_string(m.frames_evaluated),
                                 std::to_string(m.failures)};
    for (int i = 0; i < 7; ++i) {
      os << "  " << std::string(cols[i].width - cells[i].size(), ' ')
         << cells[i];
    }
    os << '\n';
  }
  return os.str();
}

std::string render_comparison(const BaselineComparison& cmp) {
  std::ostringstream os;
  os << render_report({{"tracker", cmp.tracker}, {"baseline", cmp.baseline}});
  os << "position error ratio (tracker/baseline): "
     << fmt(cmp.position_reduction) << '\n';
  return os.str();
}

}  // namespace mptrack
