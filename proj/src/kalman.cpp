#include "mptrack/kalman.hpp"

#include <cmath>

namespace mptrack {

KalmanModel make_constant_velocity_model(const KalmanNoise& noise, double dt) {
  if (dt <= 0.0) throw ValidationError("time step must be positive");
  KalmanModel m;
  m.F(0, 4) = dt;
  m.F(1, 5) = dt;
  const double qp = noise.process_pos_std * noise.process_pos_std;
  const double qs = noise.process_size_std * noise.process_size_std;
  const double qv = noise.process_vel_std * noise.process_vel_std;
  m.Q.diagonal() << qp, qp, qs, qs, qv, qv;
  m.O(0, 0) = 1.0;
  m.O(1, 1) = 1.0;
  m.O(2, 2) = 1.0;
  m.O(3, 3) = 1.0;
  const double rp = noise.meas_pos_std * noise.meas_pos_std;
  const double rs = noise.meas_size_std * noise.meas_size_std;
  m.R.diagonal() << rp, rp, rs, rs;
  return m;
}

ObjectState init_state(const Detection& d, const KalmanNoise& noise) {
  if (!(d.w > 0.0) || !(d.h > 0.0)) {
    throw ValidationError("detection must have positive size");
  }
  if (d.confidence < 0.0 || d.confidence > 1.0) {
    throw ValidationError("detection confidence must lie in [0, 1]");
  }
  ObjectState st;
  st.s << d.x, d.y, d.w, d.h, 0.0, 0.0;
  const double ip = noise.init_pos_std * noise.init_pos_std;
  const double is = noise.init_size_std * noise.init_size_std;
  const double iv = noise.init_vel_std * noise.init_vel_std;
  st.V.diagonal() << ip, ip, is, is, iv, iv;
  return st;
}

ObjectState predict(const ObjectState& state, const KalmanModel& model) {
  ObjectState out;
  out.s = model.F * state.s;  // control input is identically zero
  const Matrix6d v = model.F * state.V * model.F.transpose() + model.Q;
  out.V = (v + v.transpose()) / 2.0;
  return out;
}

ObjectState update(const ObjectState& prior, const KalmanModel& model,
                   const Detection& d) {
  Eigen::Matrix4d s =
      model.O * prior.V * model.O.transpose() + model.R;
  s = (s + s.transpose().eval()) / 2.0;
  Eigen::FullPivLU<Eigen::Matrix4d> lu(s);
  if (!lu.isInvertible()) {
    throw SingularMatrixError("innovation covariance is singular");
  }
  // K = V O^T S^-1; computed transposed so one solve covers all columns.
  const Eigen::Matrix<double, 6, 4> k =
      lu.solve(model.O * prior.V).transpose();
  const Eigen::Vector4d innovation =
      Eigen::Vector4d(d.x, d.y, d.w, d.h) - model.O * prior.s;

  ObjectState out;
  out.s = prior.s + k * innovation;
  const Matrix6d v = (Matrix6d::Identity() - k * model.O) * prior.V;
  out.V = (v + v.transpose()) / 2.0;
  if (!(out.w() > 0.0) || !(out.h() > 0.0)) {
    throw NumericalError("posterior size is non-positive");
  }
  return out;
}

ObjectState gated_update(const ObjectState& prior, const KalmanModel& model,
                         const std::optional<Detection>& d, double theta_d) {
  if (!d || !(d->confidence > theta_d)) return prior;
  return update(prior, model, *d);
}

}  // namespace mptrack
