#pragma once

#include "mptrack/geometry.hpp"
#include "mptrack/kalman.hpp"

namespace mptrack {

/// Square detector crop, center-plus-side, same coordinates as the state it
/// was derived from. Clipping to frame bounds is the consumer's business.
struct SearchRegion {
  Point2 center;
  double side = 0.0;
};

/// Speed-adaptive region: with pad p = (w + h) / 2 the side is
/// k * sqrt((w + p)(h + p)) where k = 1 + 2 / (1 + exp(theta_v - |v|)).
/// k runs over (1, 3), hits exactly 2 at |v| = theta_v, and grows strictly
/// with speed, so the side does too.
SearchRegion adaptive_region(const ObjectState& state, double theta_v);

/// Same footprint formula with a caller-fixed k (the non-adaptive fallback).
SearchRegion fixed_region(const ObjectState& state, double k);

}  // namespace mptrack
