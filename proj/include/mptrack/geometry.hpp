#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <vector>

#include "mptrack/errors.hpp"

namespace mptrack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box; (x, y) is the box center, image convention (y grows down).
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Point2 center() const { return {x, y}; }
};

/// Intersection-over-union of two center-size boxes.
/// Boxes that merely touch along an edge have zero overlap area and score 0.
double iou(const Box& a, const Box& b);

/// Plane-induced projective map between two camera views.
///
/// The matrix is kept in canonical form so maps can be compared entrywise:
/// scaled to h33 == 1 whenever h33 is safely away from zero, otherwise to
/// unit Frobenius norm with a positive first nonzero entry.
class Homography {
 public:
  /// Identity map (also the default-constructed value).
  Homography() : m_(Eigen::Matrix3d::Identity()) {}

  static Homography identity() { return Homography(); }

  /// Canonicalizes `m` and validates invertibility.
  /// Throws DegenerateConfigurationError when |det| <= det_epsilon after
  /// scale normalization, ValidationError on non-finite entries.
  static Homography from_matrix(const Eigen::Matrix3d& m,
                                double det_epsilon = 1e-12);

  const Eigen::Matrix3d& matrix() const { return m_; }

  Homography inverse() const;

 private:
  Eigen::Matrix3d m_;
};

/// One background match: src in the reference frame, dst in the pending frame.
struct Correspondence {
  Point2 src;
  Point2 dst;
};

struct CorrespondenceSet {
  std::vector<Correspondence> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

struct RansacConfig {
  int iterations = 500;            // sampling rounds upper bound
  double inlier_threshold = 3.0;   // px reprojection error
  int min_inliers = 8;             // minimum support for a usable model
  double max_outlier_ratio = 0.7;  // above this the estimate is rejected
  double confidence = 0.99;        // adaptive early-stop confidence
};

struct RansacReport {
  std::optional<Homography> homography;  // absent when no usable model
  int inlier_count = 0;
  double outlier_ratio = 1.0;  // 1 - inlier_count / pairs
  double mean_inlier_reprojection_error = 0.0;
  int iterations_run = 0;
};

/// Maps a point through `h`. Throws PointAtInfinityError when the projective
/// weight vanishes, ValidationError on non-finite input.
Point2 apply_homography(const Homography& h, const Point2& p);

/// Euclidean distance between h(src) and dst.
double reprojection_error(const Homography& h, const Correspondence& c);

/// Direct linear transform with isotropic pre-normalization of both point
/// sets (centroids to the origin, mean distance sqrt(2)). Needs at least 4
/// pairs (InsufficientDataError) in general position
/// (DegenerateConfigurationError otherwise).
Homography dlt_homography(const CorrespondenceSet& pairs);

/// Robust homography fit: repeated 4-point minimal fits on `rng`-drawn
/// samples, consensus scoring at cfg.inlier_threshold, then a least-squares
/// refit on the best consensus set. Degenerate samples (any 3 source points
/// collinear within 1e-6 of the sample span squared) are skipped. The report
/// carries an absent homography when pairs are empty, when support stays
/// below cfg.min_inliers, or when the outlier ratio exceeds
/// cfg.max_outlier_ratio; diagnostic counts are reported either way.
RansacReport ransac_homography(const CorrespondenceSet& pairs,
                               const RansacConfig& cfg, std::mt19937& rng);

/// Maps a center-size box through `h`: the center maps directly, the output
/// width/height are the means of opposite projected edge lengths, so a
/// similarity transform scales both by exactly its scale factor.
Box project_box(const Homography& h, const Box& box);

/// Local area-change factor of `h` at `p`: sqrt(|det J|) of the projective
/// map's 2x2 Jacobian. Equals the scale factor for similarity transforms.
double local_scale(const Homography& h, const Point2& p);

}  // namespace mptrack
