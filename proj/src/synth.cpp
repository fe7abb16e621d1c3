#include "mptrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mptrack {

namespace {

// World box from which background matches are sampled, and (reused) the box
// junk matches land in. Wide enough to straddle every scenario in the suite.
constexpr double kFieldHalfWidth = 280.0;
constexpr double kFieldHalfHeight = 210.0;

void fail(const std::string& field, const std::string& why) {
  throw ValidationError("scenario: " + field + ": " + why);
}

Point2 camera_offset(const CameraSpec& c, int t) {
  Point2 o{0.0, 0.0};
  const bool pans = c.kind == CameraSpec::Kind::pan ||
                    c.kind == CameraSpec::Kind::composite;
  const bool shakes = c.kind == CameraSpec::Kind::shake ||
                      c.kind == CameraSpec::Kind::composite;
  if (pans) {
    o.x += c.pan_vx * t;
    o.y += c.pan_vy * t;
  }
  if (shakes) {
    const double phase = 2.0 * std::numbers::pi * t / c.shake_period;
    o.x += c.shake_amplitude * std::sin(phase);
    o.y += c.shake_amplitude * std::cos(phase);
  }
  return o;
}

double camera_rotation(const CameraSpec& c, int t) {
  const bool shakes = c.kind == CameraSpec::Kind::shake ||
                      c.kind == CameraSpec::Kind::composite;
  if (!shakes || c.shake_rot_amplitude == 0.0) return 0.0;
  const double phase = 2.0 * std::numbers::pi * t / c.shake_period;
  return c.shake_rot_amplitude * std::sin(phase);
}

Point2 apply_affine(const Eigen::Matrix3d& m, const Point2& p) {
  return {m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2),
          m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)};
}

}  // namespace

void ScenarioSpec::validate() const {
  if (length < 1) fail("length", "must be at least 1");
  if (ref_interval < 2) fail("ref_interval", "must be at least 2");
  if (camera.kind == CameraSpec::Kind::shake ||
      camera.kind == CameraSpec::Kind::composite) {
    if (!(camera.shake_period > 0.0)) fail("camera.period", "must be positive");
    if (camera.shake_amplitude < 0.0) {
      fail("camera.amplitude", "must be non-negative");
    }
  }
  if (!(object.w > 0.0)) fail("object.size", "width must be positive");
  if (!(object.h > 0.0)) fail("object.size", "height must be positive");
  if (object.kind == ObjectSpec::Kind::piecewise) {
    if (object.segments.empty()) {
      fail("object.segments", "piecewise motion needs at least one segment");
    }
    if (object.segments.front().start_frame != 0) {
      fail("object.segments[0].start_frame", "must be 0");
    }
    for (std::size_t i = 1; i < object.segments.size(); ++i) {
      if (object.segments[i].start_frame <=
          object.segments[i - 1].start_frame) {
        fail("object.segments[" + std::to_string(i) + "].start_frame",
             "must increase");
      }
    }
  }
  for (std::size_t i = 0; i < occlusions.size(); ++i) {
    const OcclusionWindow& w = occlusions[i];
    if (w.start < 0 || w.end > length || w.start >= w.end) {
      fail("occlusions[" + std::to_string(i) + "]",
           "window must satisfy 0 <= start < end <= length");
    }
  }
  if (correspondence.count < 0) {
    fail("correspondences.count", "must be non-negative");
  }
  if (correspondence.noise_sigma < 0.0) {
    fail("correspondences.noise_sigma", "must be non-negative");
  }
  if (correspondence.outlier_fraction < 0.0 ||
      correspondence.outlier_fraction >= 1.0) {
    fail("correspondences.outlier_fraction", "must lie in [0, 1)");
  }
  const NoiseSpec& d = detection_noise;
  if (d.sigma_pos < 0.0 || d.sigma_size < 0.0 || d.glitch_sigma_pos < 0.0 ||
      d.junk_sigma_pos < 0.0) {
    fail("detections", "noise magnitudes must be non-negative");
  }
  if (d.conf_low < 0.0 || d.conf_high > 1.0 || d.conf_low > d.conf_high) {
    fail("detections.confidence", "band must satisfy 0 <= low <= high <= 1");
  }
  if (d.junk_conf_low < 0.0 || d.junk_conf_high > 1.0 ||
      d.junk_conf_low > d.junk_conf_high) {
    fail("detections.junk_confidence",
         "band must satisfy 0 <= low <= high <= 1");
  }
  if (d.glitch_fraction < 0.0 || d.glitch_fraction > 1.0) {
    fail("detections.glitch_fraction", "must lie in [0, 1]");
  }
}

Eigen::Matrix3d camera_matrix(const CameraSpec& camera, int t) {
  const Point2 o = camera_offset(camera, t);
  const double th = camera_rotation(camera, t);
  const double c = std::cos(th), s = std::sin(th);
  const double rx = camera.rot_center_x, ry = camera.rot_center_y;
  // p' = R (p - rc) + rc - o
  Eigen::Matrix3d m;
  m << c, -s, -c * rx + s * ry + rx - o.x,
       s, c, -s * rx - c * ry + ry - o.y,
       0.0, 0.0, 1.0;
  return m;
}

Homography true_homography(const CameraSpec& camera, int from, int to) {
  const Eigen::Matrix3d a = camera_matrix(camera, from);
  const Eigen::Matrix3d b = camera_matrix(camera, to);
  return Homography::from_matrix(b * a.inverse());
}

Point2 object_world_position(const ObjectSpec& object, int t) {
  switch (object.kind) {
    case ObjectSpec::Kind::fixed:
      return {object.x0, object.y0};
    case ObjectSpec::Kind::constant_velocity:
      return {object.x0 + object.vx * t, object.y0 + object.vy * t};
    case ObjectSpec::Kind::accelerating:
      return {object.x0 + object.vx * t + 0.5 * object.ax * t * t,
              object.y0 + object.vy * t + 0.5 * object.ay * t * t};
    case ObjectSpec::Kind::piecewise: {
      // Velocity of the latest segment that has started applies per frame.
      Point2 p{object.x0, object.y0};
      std::size_t seg = 0;
      for (int tau = 0; tau < t; ++tau) {
        while (seg + 1 < object.segments.size() &&
               object.segments[seg + 1].start_frame <= tau) {
          ++seg;
        }
        p.x += object.segments[seg].vx;
        p.y += object.segments[seg].vy;
      }
      return p;
    }
  }
  throw ValidationError("scenario: object.kind: unknown value");
}

std::vector<SequenceRecord> generate(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937 rng(static_cast<std::mt19937::result_type>(spec.seed));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const double fx0 = spec.camera.rot_center_x - kFieldHalfWidth;
  const double fx1 = spec.camera.rot_center_x + kFieldHalfWidth;
  const double fy0 = spec.camera.rot_center_y - kFieldHalfHeight;
  const double fy1 = spec.camera.rot_center_y + kFieldHalfHeight;

  const auto occluded_at = [&](int t) {
    return std::any_of(spec.occlusions.begin(), spec.occlusions.end(),
                       [&](const OcclusionWindow& w) {
                         return t >= w.start && t < w.end;
                       });
  };

  std::vector<SequenceRecord> records;
  records.reserve(spec.length);
  Point2 prev_center{0.0, 0.0};

  for (int t = 0; t < spec.length; ++t) {
    SequenceRecord rec;
    rec.frame_id = t;
    rec.ref_frame_id = t == 0 ? 0 : ((t - 1) / spec.ref_interval) *
                                        spec.ref_interval;

    const Eigen::Matrix3d cam_t = camera_matrix(spec.camera, t);
    const Eigen::Matrix3d cam_ref = camera_matrix(spec.camera,
                                                  rec.ref_frame_id);

    rec.correspondences.pairs.reserve(spec.correspondence.count);
    for (int i = 0; i < spec.correspondence.count; ++i) {
      const Point2 world{fx0 + (fx1 - fx0) * u01(rng),
                         fy0 + (fy1 - fy0) * u01(rng)};
      Correspondence c;
      c.src = apply_affine(cam_ref, world);
      c.dst = apply_affine(cam_t, world);
      if (u01(rng) < spec.correspondence.outlier_fraction) {
        c.dst = {fx0 + (fx1 - fx0) * u01(rng), fy0 + (fy1 - fy0) * u01(rng)};
      } else if (spec.correspondence.noise_sigma > 0.0) {
        std::normal_distribution<double> g(0.0,
                                           spec.correspondence.noise_sigma);
        c.dst.x += g(rng);
        c.dst.y += g(rng);
      }
      rec.correspondences.pairs.push_back(c);
    }

    const Point2 world_center = object_world_position(spec.object, t);
    const Homography world_to_cam = Homography::from_matrix(cam_t);
    const Box cam_box = project_box(
        world_to_cam,
        Box{world_center.x, world_center.y, spec.object.w, spec.object.h});
    GroundTruth gt;
    gt.box = cam_box;
    if (t > 0) {
      gt.vx = cam_box.x - prev_center.x;
      gt.vy = cam_box.y - prev_center.y;
    }
    prev_center = {cam_box.x, cam_box.y};
    rec.gt = gt;

    rec.detection =
        synthetic_detect(cam_box, spec.detection_noise, occluded_at(t), rng);

    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace mptrack
