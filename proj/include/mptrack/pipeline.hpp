#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mptrack/detector.hpp"
#include "mptrack/geometry.hpp"
#include "mptrack/kalman.hpp"
#include "mptrack/search_region.hpp"
#include "mptrack/sequence.hpp"

namespace mptrack {

/// Component switches for ablation runs. With everything off the tracker
/// degrades to the zero-velocity reference predictor: camera coordinates,
/// position pass-through from the last accepted detection, fixed region.
struct AblationFlags {
  bool motion_decouple = true;
  bool motion_prediction = true;
  bool adaptive_search_region = true;
  double fixed_k = 2.0;  // region factor used when the adaptive one is off
};

struct TrackerConfig {
  int n = 10;             // reference-frame interval used at generation time
  double theta_v = 5.0;   // speed threshold (px/frame) for the region factor
  double theta_d = 0.7;   // detector confidence gate (strict >)
  KalmanNoise kalman;
  RansacConfig ransac;
  int reinit_skip = 5;    // frames between a failure and reinitialization
  double velocity_handoff_inflation = 2.0;  // velocity covariance factor
  AblationFlags ablation;

  void validate() const;
};

/// Mutable tracking state between frames. The object state is expressed in
/// the coordinates of the reference frame while decoupling is active, camera
/// coordinates otherwise. current_homography maps reference coordinates into
/// the most recently processed frame; it is absent whenever the per-frame
/// fit fell back (no usable correspondences), in which case the frame was
/// handled as if the camera had not moved.
struct TrackerSession {
  int ref_frame_id = 0;
  int last_frame_id = 0;
  std::optional<Homography> current_homography;
  ObjectState state;
  bool decouple_active = true;
};

/// Per-frame output. Boxes and the search region are camera coordinates; the
/// predicted velocity is in reference coordinates (where prediction runs).
struct FrameResult {
  int frame_id = 0;
  Box predicted_box_camera;
  double predicted_vx_ref = 0.0;
  double predicted_vy_ref = 0.0;
  SearchRegion search_region_camera;
  Box output_box_camera;
  bool updated = false;  // a detection passed the gate and was folded in
  bool failure = false;  // evaluation found zero overlap with ground truth
  bool skipped = false;  // inside a reinitialization window, no tracking ran
};

TrackerSession init_session(int frame_id, const Detection& init,
                            const TrackerConfig& cfg);

/// One frame: fit the camera map, predict, size the region, project to
/// camera coordinates, query the detector, pull the accepted detection back
/// and update. Numerical failures inside the geometry degrade the frame to
/// prediction-only output instead of aborting the run.
std::pair<TrackerSession, FrameResult> step(const TrackerSession& session,
                                            const SequenceRecord& record,
                                            const TrackerConfig& cfg,
                                            const MeasurementProvider& provider,
                                            std::mt19937& rng);

/// Re-anchors the session on the last processed frame: state transported
/// through the current homography (position and size through the map,
/// velocity as a transported point pair), velocity covariance inflated by
/// cfg.velocity_handoff_inflation, homography reset to identity. An absent
/// homography hands off through the identity map.
TrackerSession advance_reference(const TrackerSession& session,
                                 const TrackerConfig& cfg);

/// Full run over a record list: initialize on the first record, step through
/// the rest, re-anchor whenever the records switch reference frame. With
/// `evaluate` set and ground truth present, a zero-overlap output marks a
/// failure, the next cfg.reinit_skip frames are skipped, and tracking
/// restarts from ground truth at the end of the window.
std::vector<FrameResult> run_sequence(const std::vector<SequenceRecord>& frames,
                                      const Detection& init,
                                      const TrackerConfig& cfg,
                                      const MeasurementProvider& provider,
                                      std::uint64_t seed, bool evaluate = true);

/// The six switch combinations reported by the ablation command, weakest
/// first: nothing, region only, decouple+region, prediction only,
/// decouple+prediction, everything.
struct AblationRow {
  std::string name;
  AblationFlags flags;
};
std::vector<AblationRow> ablation_grid();

}  // namespace mptrack
