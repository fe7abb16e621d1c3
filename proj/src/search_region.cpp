#include "mptrack/search_region.hpp"

#include <cmath>

namespace mptrack {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double footprint_side(const ObjectState& state, double k) {
  if (!(state.w() > 0.0) || !(state.h() > 0.0)) {
    throw ValidationError("search region needs a positive box size");
  }
  const double p = (state.w() + state.h()) / 2.0;
  return k * std::sqrt((state.w() + p) * (state.h() + p));
}

}  // namespace

SearchRegion adaptive_region(const ObjectState& state, double theta_v) {
  if (!std::isfinite(theta_v)) {
    throw ValidationError("speed threshold must be finite");
  }
  const double speed = std::hypot(state.vx(), state.vy());
  const double k = 1.0 + 2.0 * sigmoid(speed - theta_v);
  return {{state.x(), state.y()}, footprint_side(state, k)};
}

SearchRegion fixed_region(const ObjectState& state, double k) {
  if (!(k > 0.0)) throw ValidationError("region factor must be positive");
  return {{state.x(), state.y()}, footprint_side(state, k)};
}

}  // namespace mptrack
