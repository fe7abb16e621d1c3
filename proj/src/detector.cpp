#include "mptrack/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mptrack {

namespace {

double gauss(std::mt19937& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

double uniform(std::mt19937& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void validate(const Detection& d, int frame_id) {
  if (!(d.w > 0.0) || !(d.h > 0.0) || d.confidence < 0.0 ||
      d.confidence > 1.0) {
    throw ValidationError("invalid detection record at frame " +
                          std::to_string(frame_id));
  }
}

}  // namespace

ReplaySource::ReplaySource(std::vector<std::pair<int, Detection>> records,
                           int first_frame, int last_frame)
    : first_(first_frame), last_(last_frame) {
  if (last_ < first_) {
    throw ValidationError("replay span is empty");
  }
  for (const auto& [frame, det] : records) {
    if (frame < first_ || frame > last_) {
      throw ValidationError("detection record outside replay span at frame " +
                            std::to_string(frame));
    }
    validate(det, frame);
    if (!by_frame_.emplace(frame, det).second) {
      throw ValidationError("duplicate detection record at frame " +
                            std::to_string(frame));
    }
  }
}

ReplaySource ReplaySource::from_records(
    const std::vector<SequenceRecord>& records) {
  if (records.empty()) {
    throw ValidationError("cannot build a replay from zero records");
  }
  std::vector<std::pair<int, Detection>> dets;
  int first = records.front().frame_id;
  int last = records.front().frame_id;
  for (const SequenceRecord& r : records) {
    first = std::min(first, r.frame_id);
    last = std::max(last, r.frame_id);
    if (r.detection) dets.emplace_back(r.frame_id, *r.detection);
  }
  return ReplaySource(std::move(dets), first, last);
}

std::optional<Detection> ReplaySource::lookup(int frame_id) const {
  if (frame_id < first_ || frame_id > last_) {
    throw MissingFrameError("no replay data for frame " +
                            std::to_string(frame_id));
  }
  const auto it = by_frame_.find(frame_id);
  if (it == by_frame_.end()) return std::nullopt;
  return it->second;
}

std::optional<Detection> detect(const MeasurementProvider& source,
                                const DetectorQuery& q) {
  if (!(q.region.side > 0.0)) {
    throw ValidationError("search region side must be positive");
  }
  const std::optional<Detection> raw = source.lookup(q.frame_id);
  if (!raw) return std::nullopt;

  const double half = q.region.side / 2.0;
  double xmin = q.region.center.x - half, xmax = q.region.center.x + half;
  double ymin = q.region.center.y - half, ymax = q.region.center.y + half;
  if (q.frame_bounds) {
    const Box& f = *q.frame_bounds;
    xmin = std::max(xmin, f.x - f.w / 2.0);
    xmax = std::min(xmax, f.x + f.w / 2.0);
    ymin = std::max(ymin, f.y - f.h / 2.0);
    ymax = std::min(ymax, f.y + f.h / 2.0);
  }
  if (raw->x < xmin || raw->x > xmax || raw->y < ymin || raw->y > ymax) {
    return std::nullopt;
  }
  return raw;
}

std::optional<Detection> synthetic_detect(const Box& gt, const NoiseSpec& noise,
                                          bool occluded, std::mt19937& rng) {
  if (!(gt.w > 0.0) || !(gt.h > 0.0)) {
    throw ValidationError("true box must have positive size");
  }
  if (occluded) {
    if (noise.occlusion == NoiseSpec::OcclusionPolicy::drop) {
      return std::nullopt;
    }
    Detection junk;
    junk.x = gt.x + gauss(rng, noise.junk_sigma_pos);
    junk.y = gt.y + gauss(rng, noise.junk_sigma_pos);
    junk.w = std::max(0.01, gt.w + gauss(rng, noise.sigma_size));
    junk.h = std::max(0.01, gt.h + gauss(rng, noise.sigma_size));
    junk.confidence = std::clamp(
        uniform(rng, noise.junk_conf_low, noise.junk_conf_high), 0.0, 1.0);
    return junk;
  }

  const double glitch_draw = uniform(rng, 0.0, 1.0);
  const double sp = glitch_draw < noise.glitch_fraction ? noise.glitch_sigma_pos
                                                        : noise.sigma_pos;
  Detection d;
  d.x = gt.x + gauss(rng, sp);
  d.y = gt.y + gauss(rng, sp);
  d.w = std::max(0.01, gt.w + gauss(rng, noise.sigma_size));
  d.h = std::max(0.01, gt.h + gauss(rng, noise.sigma_size));
  d.confidence =
      std::clamp(uniform(rng, noise.conf_low, noise.conf_high), 0.0, 1.0);
  return d;
}

}  // namespace mptrack
