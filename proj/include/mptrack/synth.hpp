#pragma once

#include <cstdint>
#include <vector>

#include "mptrack/detector.hpp"
#include "mptrack/geometry.hpp"
#include "mptrack/sequence.hpp"

namespace mptrack {

/// Camera motion over the static background plane.
/// pan: constant drift. shake: circular sinusoidal translation of amplitude
/// `shake_amplitude` px with the given period in frames, plus an optional
/// small rotation about rot_center. composite: pan and shake together.
struct CameraSpec {
  enum class Kind { none, pan, shake, composite };
  Kind kind = Kind::none;
  double pan_vx = 0.0;
  double pan_vy = 0.0;
  double shake_amplitude = 0.0;
  double shake_period = 20.0;
  double shake_rot_amplitude = 0.0;  // radians
  double rot_center_x = 200.0;
  double rot_center_y = 150.0;
};

/// Object trajectory in world coordinates. `segments` (piecewise kind) give
/// the velocity from each start frame onward; the first must start at 0.
struct VelocitySegment {
  int start_frame = 0;
  double vx = 0.0;
  double vy = 0.0;
};

struct ObjectSpec {
  enum class Kind { fixed, constant_velocity, piecewise, accelerating };
  Kind kind = Kind::fixed;
  double x0 = 200.0;
  double y0 = 150.0;
  double w = 24.0;
  double h = 18.0;
  double vx = 0.0;
  double vy = 0.0;
  std::vector<VelocitySegment> segments;
  double ax = 0.0;
  double ay = 0.0;
};

struct CorrespondenceSpec {
  int count = 100;
  double noise_sigma = 0.5;      // px, on the pending-frame side
  double outlier_fraction = 0.1; // replaced by uniform junk matches
};

/// Half-open frame window [start, end) with no visible object.
struct OcclusionWindow {
  int start = 0;
  int end = 0;
};

struct ScenarioSpec {
  int length = 100;
  CameraSpec camera;
  ObjectSpec object;
  std::vector<OcclusionWindow> occlusions;
  CorrespondenceSpec correspondence;
  NoiseSpec detection_noise;
  std::uint64_t seed = 1;
  int ref_interval = 10;  // reference-frame spacing baked into the records

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Full synthetic sequence: per-frame correspondences against the records'
/// reference frames, detections (absent inside occlusion windows for the
/// drop policy), and ground-truth boxes with camera-coordinate velocities.
/// Same spec, same seed: bit-identical output.
std::vector<SequenceRecord> generate(const ScenarioSpec& spec);

/// World-to-camera placement of frame t (an affine similarity).
Eigen::Matrix3d camera_matrix(const CameraSpec& camera, int t);

/// Exact map from the image of frame `from` to the image of frame `to`.
Homography true_homography(const CameraSpec& camera, int from, int to);

/// World-coordinate object center at frame t.
Point2 object_world_position(const ObjectSpec& object, int t);

}  // namespace mptrack
