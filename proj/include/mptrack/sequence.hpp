#pragma once

#include <optional>

#include "mptrack/geometry.hpp"
#include "mptrack/kalman.hpp"

namespace mptrack {

/// Annotated truth for one frame, camera coordinates. Velocity is the
/// difference between this frame's center and the previous frame's center
/// (zero on the first frame).
struct GroundTruth {
  Box box;
  double vx = 0.0;
  double vy = 0.0;
};

/// Per-frame replay bundle. Correspondence sources live in the coordinates of
/// ref_frame_id; detection and ground truth are in this frame's camera
/// coordinates. A missing detection models occlusion; ground truth is only
/// needed for evaluation and reinitialization.
struct SequenceRecord {
  int frame_id = 0;
  int ref_frame_id = 0;
  CorrespondenceSet correspondences;
  std::optional<Detection> detection;
  std::optional<GroundTruth> gt;
};

}  // namespace mptrack
