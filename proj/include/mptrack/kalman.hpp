#pragma once

#include <Eigen/Dense>
#include <optional>

#include "mptrack/errors.hpp"
#include "mptrack/geometry.hpp"

namespace mptrack {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix46d = Eigen::Matrix<double, 4, 6>;

/// Measured box with detector confidence, camera coordinates.
struct Detection {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 1.0;  // in [0, 1]

  Box box() const { return {x, y, w, h}; }
};

/// Tracked state s = (x, y, w, h, vx, vy) with covariance V.
/// Position and velocity are expressed in whichever frame the owner of the
/// state has chosen (the tracking session keeps it in reference coordinates).
struct ObjectState {
  Vector6d s = Vector6d::Zero();
  Matrix6d V = Matrix6d::Zero();

  double x() const { return s(0); }
  double y() const { return s(1); }
  double w() const { return s(2); }
  double h() const { return s(3); }
  double vx() const { return s(4); }
  double vy() const { return s(5); }
  Box box() const { return {s(0), s(1), s(2), s(3)}; }
};

/// Noise magnitudes as standard deviations (px, px/frame).
struct KalmanNoise {
  double process_pos_std = 1.0;
  double process_size_std = 1.0;
  double process_vel_std = 0.25;
  double meas_pos_std = 4.0;
  double meas_size_std = 4.0;
  double init_pos_std = 10.0;
  double init_size_std = 10.0;
  double init_vel_std = 10.0;
};

/// Constant-velocity transition with a position/size observation.
/// B is the control matrix; tracked objects take no control input, so it is
/// identically zero and the transition reduces to s' = F s.
struct KalmanModel {
  Matrix6d F = Matrix6d::Identity();
  Vector6d B = Vector6d::Zero();
  Matrix6d Q = Matrix6d::Zero();
  Matrix46d O = Matrix46d::Zero();
  Eigen::Matrix4d R = Eigen::Matrix4d::Zero();
};

KalmanModel make_constant_velocity_model(const KalmanNoise& noise,
                                         double dt = 1.0);

/// Fresh state from a detection: velocity zero, diagonal covariance from the
/// configured initial standard deviations.
ObjectState init_state(const Detection& d, const KalmanNoise& noise);

/// Time update: s' = F s, V' = F V F^T + Q (re-symmetrized).
ObjectState predict(const ObjectState& state, const KalmanModel& model);

/// Measurement update with gain K = V O^T (O V O^T + R)^-1.
/// Throws SingularMatrixError when the innovation covariance cannot be
/// inverted, NumericalError when the posterior size turns non-positive.
ObjectState update(const ObjectState& prior, const KalmanModel& model,
                   const Detection& d);

/// Applies `update` only when a detection is present with confidence
/// strictly above theta_d; otherwise returns the prior bit-identically.
ObjectState gated_update(const ObjectState& prior, const KalmanModel& model,
                         const std::optional<Detection>& d, double theta_d);

}  // namespace mptrack
