#include "mptrack/pipeline.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mptrack {

namespace {

Detection pull_back(const Homography& h, const Detection& d) {
  const Box b = project_box(h.inverse(), d.box());
  return {b.x, b.y, b.w, b.h, d.confidence};
}

/// Position/size pass-through used when motion prediction is off: the state
/// snaps to the accepted detection and velocity stays pinned at zero.
ObjectState passthrough_state(const Detection& d, const ObjectState& prior) {
  ObjectState st = prior;
  st.s << d.x, d.y, d.w, d.h, 0.0, 0.0;
  return st;
}

SearchRegion make_region(const ObjectState& prior, const TrackerConfig& cfg) {
  return cfg.ablation.adaptive_search_region
             ? adaptive_region(prior, cfg.theta_v)
             : fixed_region(prior, cfg.ablation.fixed_k);
}

TrackerSession session_from_detection(int frame_id, int ref_frame_id,
                                      std::optional<Homography> h,
                                      const Detection& d,
                                      const TrackerConfig& cfg) {
  TrackerSession s;
  s.ref_frame_id = ref_frame_id;
  s.last_frame_id = frame_id;
  s.current_homography = std::move(h);
  s.state = init_state(d, cfg.kalman);
  s.decouple_active = cfg.ablation.motion_decouple;
  return s;
}

/// Fresh session at a mid-sequence frame: the camera-coordinate detection is
/// pulled back into the record's reference frame when a map can be fitted.
TrackerSession reinit_session(const SequenceRecord& rec, const Detection& d,
                              const TrackerConfig& cfg, std::mt19937& rng) {
  std::optional<Homography> h;
  if (cfg.ablation.motion_decouple && !rec.correspondences.empty()) {
    h = ransac_homography(rec.correspondences, cfg.ransac, rng).homography;
  }
  Detection anchored = d;
  if (h) {
    try {
      anchored = pull_back(*h, d);
    } catch (const NumericalError&) {
      h.reset();
      anchored = d;
    }
  }
  return session_from_detection(rec.frame_id, rec.ref_frame_id, h, anchored,
                                cfg);
}

}  // namespace

void TrackerConfig::validate() const {
  if (n < 2) throw ValidationError("reference interval must be at least 2");
  if (theta_d < 0.0 || theta_d > 1.0) {
    throw ValidationError("confidence gate must lie in [0, 1]");
  }
  if (!std::isfinite(theta_v)) {
    throw ValidationError("speed threshold must be finite");
  }
  if (reinit_skip < 0) {
    throw ValidationError("reinitialization skip must be non-negative");
  }
  if (velocity_handoff_inflation < 1.0) {
    throw ValidationError("velocity handoff inflation must be at least 1");
  }
  if (!(ablation.fixed_k > 0.0)) {
    throw ValidationError("fixed region factor must be positive");
  }
}

TrackerSession init_session(int frame_id, const Detection& init,
                            const TrackerConfig& cfg) {
  // The first frame is its own reference, so camera and reference
  // coordinates coincide and the detection initializes the state directly.
  return session_from_detection(frame_id, frame_id, Homography::identity(),
                                init, cfg);
}

std::pair<TrackerSession, FrameResult> step(const TrackerSession& session,
                                            const SequenceRecord& record,
                                            const TrackerConfig& cfg,
                                            const MeasurementProvider& provider,
                                            std::mt19937& rng) {
  if (record.frame_id != session.last_frame_id + 1) {
    throw ValidationError("frames must be consecutive: frame " +
                          std::to_string(record.frame_id) + " after " +
                          std::to_string(session.last_frame_id));
  }
  if (record.ref_frame_id != session.ref_frame_id) {
    throw ValidationError(
        "record is anchored to reference frame " +
        std::to_string(record.ref_frame_id) + " but the session is on " +
        std::to_string(session.ref_frame_id) + "; advance the reference");
  }

  TrackerSession next = session;
  next.last_frame_id = record.frame_id;
  next.decouple_active = cfg.ablation.motion_decouple;

  std::optional<Homography> h;
  if (cfg.ablation.motion_decouple) {
    h = ransac_homography(record.correspondences, cfg.ransac, rng).homography;
  }
  next.current_homography = h;

  const KalmanModel model = make_constant_velocity_model(cfg.kalman);
  const ObjectState prior = cfg.ablation.motion_prediction
                                ? predict(session.state, model)
                                : session.state;
  const SearchRegion region_ref = make_region(prior, cfg);

  FrameResult out;
  out.frame_id = record.frame_id;
  out.predicted_vx_ref = prior.vx();
  out.predicted_vy_ref = prior.vy();

  ObjectState posterior = prior;
  try {
    Box prior_cam = prior.box();
    SearchRegion region_cam = region_ref;
    if (h) {
      prior_cam = project_box(*h, prior.box());
      region_cam.center = apply_homography(*h, region_ref.center);
      // The side was sized in reference coordinates; rescale it only when
      // the map meaningfully changes areas around the region center.
      const double s = local_scale(*h, region_ref.center);
      if (std::abs(s - 1.0) > 0.1) region_cam.side = region_ref.side * s;
    }

    std::optional<Detection> det =
        detect(provider, DetectorQuery{record.frame_id, region_cam, {}});
    if (det && h) det = pull_back(*h, *det);

    if (cfg.ablation.motion_prediction) {
      posterior = gated_update(prior, model, det, cfg.theta_d);
      out.updated = det && det->confidence > cfg.theta_d;
    } else if (det && det->confidence > cfg.theta_d) {
      posterior = passthrough_state(*det, prior);
      out.updated = true;
    }

    out.predicted_box_camera = prior_cam;
    out.search_region_camera = region_cam;
    out.output_box_camera =
        h ? project_box(*h, posterior.box()) : posterior.box();
  } catch (const NumericalError&) {
    // Frame-level geometric failure: emit the prediction in reference
    // coordinates as-is and drop the unusable map.
    posterior = prior;
    out.updated = false;
    out.predicted_box_camera = prior.box();
    out.search_region_camera = region_ref;
    out.output_box_camera = prior.box();
    next.current_homography.reset();
  }

  next.state = posterior;
  return {next, out};
}

TrackerSession advance_reference(const TrackerSession& session,
                                 const TrackerConfig& cfg) {
  if (session.last_frame_id <= session.ref_frame_id) {
    throw ValidationError("nothing to re-anchor: no frame beyond the reference");
  }
  TrackerSession next = session;
  next.ref_frame_id = session.last_frame_id;
  next.current_homography = Homography::identity();

  if (session.current_homography) {
    const Homography& h = *session.current_homography;
    const ObjectState& st = session.state;
    const Point2 pos = apply_homography(h, {st.x(), st.y()});
    const Point2 moved =
        apply_homography(h, {st.x() + st.vx(), st.y() + st.vy()});
    const Box nb = project_box(h, st.box());
    next.state.s << nb.x, nb.y, nb.w, nb.h, moved.x - pos.x, moved.y - pos.y;
  }
  // Position/size uncertainty carries over; velocity uncertainty is inflated
  // through a diagonal congruence so the covariance stays PSD.
  const double f = std::sqrt(cfg.velocity_handoff_inflation);
  Vector6d d;
  d << 1.0, 1.0, 1.0, 1.0, f, f;
  next.state.V =
      d.asDiagonal() * session.state.V * d.asDiagonal();
  return next;
}

std::vector<FrameResult> run_sequence(const std::vector<SequenceRecord>& frames,
                                      const Detection& init,
                                      const TrackerConfig& cfg,
                                      const MeasurementProvider& provider,
                                      std::uint64_t seed, bool evaluate) {
  cfg.validate();
  if (frames.empty()) throw ValidationError("record list is empty");
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));

  TrackerSession session = init_session(frames.front().frame_id, init, cfg);
  std::vector<FrameResult> results;
  results.reserve(frames.size());

  // The first record is the initialization frame, not a prediction.
  {
    FrameResult fr;
    fr.frame_id = frames.front().frame_id;
    fr.predicted_box_camera = init.box();
    fr.output_box_camera = init.box();
    fr.search_region_camera = make_region(session.state, cfg);
    results.push_back(fr);
  }

  Box last_output = init.box();
  long long skip_until = std::numeric_limits<long long>::min();

  for (std::size_t i = 1; i < frames.size(); ++i) {
    const SequenceRecord& rec = frames[i];

    if (static_cast<long long>(rec.frame_id) <= skip_until) {
      FrameResult fr;
      fr.frame_id = rec.frame_id;
      fr.skipped = true;
      if (static_cast<long long>(rec.frame_id) == skip_until) {
        if (!rec.gt) {
          throw ValidationError("reinitialization at frame " +
                                std::to_string(rec.frame_id) +
                                " requires ground truth");
        }
        const Detection anchor{rec.gt->box.x, rec.gt->box.y, rec.gt->box.w,
                               rec.gt->box.h, 1.0};
        session = reinit_session(rec, anchor, cfg, rng);
        last_output = rec.gt->box;
      }
      fr.predicted_box_camera = last_output;
      fr.output_box_camera = last_output;
      fr.search_region_camera = make_region(session.state, cfg);
      results.push_back(fr);
      continue;
    }

    if (rec.ref_frame_id != session.ref_frame_id) {
      if (rec.ref_frame_id != session.last_frame_id) {
        throw ValidationError(
            "reference grid misaligned at frame " +
            std::to_string(rec.frame_id) + ": record expects reference " +
            std::to_string(rec.ref_frame_id) + " but the previous frame is " +
            std::to_string(session.last_frame_id));
      }
      session = advance_reference(session, cfg);
    }

    auto [next, fr] = step(session, rec, cfg, provider, rng);
    session = std::move(next);

    if (evaluate && rec.gt && iou(fr.output_box_camera, rec.gt->box) <= 0.0) {
      fr.failure = true;
      if (cfg.reinit_skip == 0) {
        const Detection anchor{rec.gt->box.x, rec.gt->box.y, rec.gt->box.w,
                               rec.gt->box.h, 1.0};
        session = reinit_session(rec, anchor, cfg, rng);
        last_output = rec.gt->box;
      } else {
        skip_until = static_cast<long long>(rec.frame_id) + cfg.reinit_skip;
      }
    }
    if (!fr.failure) last_output = fr.output_box_camera;
    results.push_back(fr);
  }
  return results;
}

std::vector<AblationRow> ablation_grid() {
  auto flags = [](bool md, bool mp, bool asr) {
    AblationFlags f;
    f.motion_decouple = md;
    f.motion_prediction = mp;
    f.adaptive_search_region = asr;
    return f;
  };
  return {
      {"baseline", flags(false, false, false)},
      {"asr", flags(false, false, true)},
      {"md+asr", flags(true, false, true)},
      {"mp", flags(false, true, false)},
      {"md+mp", flags(true, true, false)},
      {"md+mp+asr", flags(true, true, true)},
  };
}

}  // namespace mptrack
