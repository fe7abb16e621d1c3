#pragma once

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "mptrack/kalman.hpp"
#include "mptrack/search_region.hpp"
#include "mptrack/sequence.hpp"

namespace mptrack {

/// What the tracker asks a detector: one frame, one camera-coordinate crop.
/// When frame_bounds is set, the region is intersected with that rectangle
/// before the containment test.
struct DetectorQuery {
  int frame_id = 0;
  SearchRegion region;
  std::optional<Box> frame_bounds;
};

/// Anything that can hand back one raw detection per frame. The tracker never
/// sees detector internals: replayed files and synthetic generators are
/// interchangeable behind this interface.
class MeasurementProvider {
 public:
  virtual ~MeasurementProvider() = default;

  /// Raw detection for a frame, before any search-region filtering; absent
  /// when the detector produced nothing (occlusion). Implementations may
  /// throw MissingFrameError for frames they know nothing about.
  virtual std::optional<Detection> lookup(int frame_id) const = 0;
};

/// Detection records loaded from a finished run. Knows which frame span it
/// covers: queries outside [first_frame, last_frame] are an error, frames
/// inside the span without a record are occlusions.
class ReplaySource final : public MeasurementProvider {
 public:
  ReplaySource(std::vector<std::pair<int, Detection>> records, int first_frame,
               int last_frame);

  /// Builds the span and the per-frame records from a record list.
  static ReplaySource from_records(const std::vector<SequenceRecord>& records);

  std::optional<Detection> lookup(int frame_id) const override;

  int first_frame() const { return first_; }
  int last_frame() const { return last_; }

 private:
  std::map<int, Detection> by_frame_;
  int first_ = 0;
  int last_ = 0;
};

/// Region-filtered detector front end: returns the source's detection for the
/// queried frame iff its center lies inside the (frame-clipped) region.
std::optional<Detection> detect(const MeasurementProvider& source,
                                const DetectorQuery& q);

/// Error model for the synthetic detector.
/// Visible frames perturb the truth with zero-mean Gaussian noise and draw a
/// confidence from the high band; a glitch_fraction of them use
/// glitch_sigma_pos instead of sigma_pos, modelling confident mislocations.
/// Occluded frames either drop the detection or emit low-confidence junk.
struct NoiseSpec {
  double sigma_pos = 0.0;
  double sigma_size = 0.0;
  double conf_low = 0.85;
  double conf_high = 1.0;
  double glitch_fraction = 0.0;
  double glitch_sigma_pos = 0.0;

  enum class OcclusionPolicy { drop, junk };
  OcclusionPolicy occlusion = OcclusionPolicy::drop;
  double junk_sigma_pos = 10.0;
  double junk_conf_low = 0.0;
  double junk_conf_high = 0.3;
};

/// Synthetic detection for one frame given its true box.
std::optional<Detection> synthetic_detect(const Box& gt, const NoiseSpec& noise,
                                          bool occluded, std::mt19937& rng);

}  // namespace mptrack
