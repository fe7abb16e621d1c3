#include <random>

#include "doctest.h"
#include "mptrack/kalman.hpp"

using namespace mptrack;

namespace {

/// Independent reference: treat (state, measurement) as one joint Gaussian
/// and condition on the measurement directly.
ObjectState conditioning_oracle(const ObjectState& prior,
                                const KalmanModel& m, const Detection& d) {
  const Eigen::Matrix4d s = m.O * prior.V * m.O.transpose() + m.R;
  const Eigen::Matrix<double, 6, 4> cross = prior.V * m.O.transpose();
  const Eigen::Matrix<double, 6, 4> gain = cross * s.inverse();
  const Eigen::Vector4d z(d.x, d.y, d.w, d.h);
  ObjectState out;
  out.s = prior.s + gain * (z - m.O * prior.s);
  out.V = prior.V - gain * cross.transpose();
  return out;
}

ObjectState sample_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-100.0, 100.0);
  std::uniform_real_distribution<double> size(20.0, 40.0);
  std::uniform_real_distribution<double> vel(-5.0, 5.0);
  std::normal_distribution<double> g(0.0, 1.0);
  ObjectState st;
  st.s << pos(rng), pos(rng), size(rng), size(rng), vel(rng), vel(rng);
  Matrix6d a;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) a(r, c) = g(rng);
  }
  st.V = a * a.transpose() + 0.1 * Matrix6d::Identity();
  return st;
}

}  // namespace

TEST_CASE("constant-velocity model wiring") {
  KalmanNoise noise;
  const KalmanModel m = make_constant_velocity_model(noise, 1.0);
  CHECK(m.F(0, 4) == 1.0);
  CHECK(m.F(1, 5) == 1.0);
  CHECK(m.F(0, 0) == 1.0);
  CHECK(m.F(2, 3) == 0.0);
  CHECK(m.B.isZero());
  CHECK(m.Q(0, 0) == doctest::Approx(1.0));
  CHECK(m.Q(4, 4) == doctest::Approx(0.0625));
  CHECK(m.R(0, 0) == doctest::Approx(16.0));
  CHECK(m.O(0, 0) == 1.0);
  CHECK(m.O(3, 3) == 1.0);
  CHECK(m.O(0, 4) == 0.0);
  CHECK_THROWS_AS(make_constant_velocity_model(noise, 0.0), ValidationError);
}

TEST_CASE("predict advances position by velocity and inflates covariance") {
  KalmanNoise noise;
  const KalmanModel m = make_constant_velocity_model(noise);
  ObjectState st;
  st.s << 10.0, 20.0, 8.0, 6.0, 2.0, -1.0;
  st.V = Matrix6d::Identity();
  const ObjectState out = predict(st, m);
  CHECK(out.x() == doctest::Approx(12.0));
  CHECK(out.y() == doctest::Approx(19.0));
  CHECK(out.w() == doctest::Approx(8.0));
  CHECK(out.h() == doctest::Approx(6.0));
  CHECK(out.vx() == doctest::Approx(2.0));
  CHECK(out.vy() == doctest::Approx(-1.0));
  // Var(x') = Var(x) + Var(vx) + q_pos = 1 + 1 + 1.
  CHECK(out.V(0, 0) == doctest::Approx(3.0));
  // Cov(x', vx') = Var(vx) = 1.
  CHECK(out.V(0, 4) == doctest::Approx(1.0));
  CHECK((out.V - out.V.transpose()).norm() == 0.0);
}

TEST_CASE("update matches the joint-Gaussian conditioning oracle") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> meas_off(-3.0, 3.0);
  KalmanNoise noise;
  const KalmanModel m = make_constant_velocity_model(noise);
  for (int trial = 0; trial < 50; ++trial) {
    const ObjectState prior = sample_state(rng);
    Detection d;
    d.x = prior.x() + meas_off(rng);
    d.y = prior.y() + meas_off(rng);
    d.w = prior.w() + meas_off(rng);
    d.h = prior.h() + meas_off(rng);
    const ObjectState got = update(prior, m, d);
    const ObjectState want = conditioning_oracle(prior, m, d);
    CHECK((got.s - want.s).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((got.V - want.V).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("near-zero measurement noise snaps observed components") {
  KalmanNoise noise;
  noise.meas_pos_std = 1e-6;
  noise.meas_size_std = 1e-6;
  const KalmanModel m = make_constant_velocity_model(noise);
  ObjectState prior;
  prior.s << 0.0, 0.0, 10.0, 10.0, 1.0, 1.0;
  prior.V = 25.0 * Matrix6d::Identity();
  Detection d;
  d.x = 3.0;
  d.y = -2.0;
  d.w = 12.0;
  d.h = 9.0;
  const ObjectState out = update(prior, m, d);
  CHECK(out.x() == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(out.y() == doctest::Approx(-2.0).epsilon(1e-4));
  CHECK(out.w() == doctest::Approx(12.0).epsilon(1e-4));
  CHECK(out.h() == doctest::Approx(9.0).epsilon(1e-4));
}

TEST_CASE("zero prior covariance keeps the prior") {
  KalmanNoise noise;
  const KalmanModel m = make_constant_velocity_model(noise);
  ObjectState prior;
  prior.s << 5.0, 6.0, 7.0, 8.0, 0.5, -0.5;
  prior.V = Matrix6d::Zero();
  Detection d;
  d.x = 50.0;
  d.y = 60.0;
  d.w = 70.0;
  d.h = 80.0;
  const ObjectState out = update(prior, m, d);
  CHECK((out.s - prior.s).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.V.norm() == 0.0);
}

TEST_CASE("update refuses a singular innovation covariance") {
  KalmanModel m = make_constant_velocity_model(KalmanNoise{});
  m.R = Eigen::Matrix4d::Zero();
  ObjectState prior;
  prior.s << 0.0, 0.0, 10.0, 10.0, 0.0, 0.0;
  prior.V = Matrix6d::Zero();
  Detection d;
  d.w = d.h = 10.0;
  CHECK_THROWS_AS(update(prior, m, d), SingularMatrixError);
}

TEST_CASE("update rejects a collapsed posterior size") {
  KalmanNoise noise;
  noise.meas_size_std = 1e-6;
  const KalmanModel m = make_constant_velocity_model(noise);
  ObjectState prior;
  prior.s << 0.0, 0.0, 10.0, 10.0, 0.0, 0.0;
  prior.V = 100.0 * Matrix6d::Identity();
  Detection d;
  d.x = 0.0;
  d.y = 0.0;
  d.w = -5.0;  // detector handed us garbage; posterior w would go negative
  d.h = 10.0;
  CHECK_THROWS_AS(update(prior, m, d), NumericalError);
}

TEST_CASE("gated update applies strictly above the threshold") {
  KalmanNoise noise;
  const KalmanModel m = make_constant_velocity_model(noise);
  const ObjectState prior = init_state(Detection{1.0, 2.0, 10.0, 10.0, 1.0},
                                       noise);
  Detection d;
  d.x = 5.0;
  d.y = 5.0;
  d.w = 11.0;
  d.h = 11.0;

  SUBCASE("confidence equal to the gate is rejected, bit for bit") {
    d.confidence = 0.7;
    const ObjectState out = gated_update(prior, m, d, 0.7);
    CHECK((out.s.array() == prior.s.array()).all());
    CHECK((out.V.array() == prior.V.array()).all());
  }
  SUBCASE("absent detection is rejected, bit for bit") {
    const ObjectState out = gated_update(prior, m, std::nullopt, 0.7);
    CHECK((out.s.array() == prior.s.array()).all());
    CHECK((out.V.array() == prior.V.array()).all());
  }
  SUBCASE("confidence above the gate updates") {
    d.confidence = 0.71;
    const ObjectState out = gated_update(prior, m, d, 0.7);
    CHECK(out.x() != prior.x());
    CHECK(out.x() == doctest::Approx(update(prior, m, d).x()));
  }
}

TEST_CASE("updates contract the observed uncertainty") {
  std::mt19937 rng(7);
  KalmanNoise noise;
  const KalmanModel m = make_constant_velocity_model(noise);
  for (int trial = 0; trial < 20; ++trial) {
    const ObjectState prior = sample_state(rng);
    Detection d;
    d.x = prior.x();
    d.y = prior.y();
    d.w = prior.w();
    d.h = prior.h();
    const ObjectState post = update(prior, m, d);
    for (int i = 0; i < 4; ++i) {
      CHECK(post.V(i, i) <= prior.V(i, i) + 1e-12);
    }
  }
}

TEST_CASE("repeated identical measurements converge on them") {
  KalmanNoise noise;
  noise.process_pos_std = 0.0;
  noise.process_size_std = 0.0;
  noise.process_vel_std = 0.0;
  noise.meas_pos_std = 0.1;
  noise.meas_size_std = 0.1;
  const KalmanModel m = make_constant_velocity_model(noise);
  ObjectState st = init_state(Detection{0.0, 0.0, 10.0, 10.0, 1.0}, noise);
  Detection d;
  d.x = 4.0;
  d.y = -4.0;
  d.w = 12.0;
  d.h = 8.0;
  for (int i = 0; i < 10; ++i) {
    st = update(predict(st, m), m, d);
  }
  // With zero process noise the posterior approaches the repeated
  // measurement asymptotically; 10 rounds land within a few 1e-5.
  CHECK(st.x() == doctest::Approx(4.0).epsilon(1e-4));
  CHECK(st.y() == doctest::Approx(-4.0).epsilon(1e-4));
  CHECK(st.w() == doctest::Approx(12.0).epsilon(1e-4));
  CHECK(st.h() == doctest::Approx(8.0).epsilon(1e-4));
  CHECK(std::abs(st.vx()) < 1e-2);
  CHECK(std::abs(st.vy()) < 1e-2);
}

TEST_CASE("initial state validation") {
  KalmanNoise noise;
  CHECK_THROWS_AS(init_state(Detection{0.0, 0.0, 0.0, 5.0, 1.0}, noise),
                  ValidationError);
  CHECK_THROWS_AS(init_state(Detection{0.0, 0.0, 5.0, 5.0, 1.5}, noise),
                  ValidationError);
  const ObjectState st = init_state(Detection{1.0, 2.0, 3.0, 4.0, 0.9}, noise);
  CHECK(st.vx() == 0.0);
  CHECK(st.vy() == 0.0);
  CHECK(st.V(0, 0) == doctest::Approx(100.0));
  CHECK(st.V(4, 4) == doctest::Approx(100.0));
  CHECK(st.V(0, 1) == 0.0);
}
