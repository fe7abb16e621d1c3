#include "mptrack/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace mptrack {

namespace {

bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

Eigen::Matrix3d canonicalize(const Eigen::Matrix3d& m) {
  // Scale-normalize first so the h33 test is invariant to the input scale.
  Eigen::Matrix3d c = m / m.norm();
  if (std::abs(c(2, 2)) > 1e-12) {
    return c / c(2, 2);
  }
  // h33 is (numerically) zero: keep unit Frobenius norm, fix the sign by the
  // first nonzero entry in row-major order.
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      if (c(r, col) != 0.0) {
        return c(r, col) > 0.0 ? c : Eigen::Matrix3d(-c);
      }
    }
  }
  return c;  // unreachable for nonzero input
}

/// Similarity that moves the centroid to the origin and the mean distance
/// from it to sqrt(2).
Eigen::Matrix3d normalizing_similarity(const std::vector<Correspondence>& pairs,
                                       bool use_src) {
  const double n = static_cast<double>(pairs.size());
  double cx = 0.0, cy = 0.0;
  for (const Correspondence& c : pairs) {
    const Point2& p = use_src ? c.src : c.dst;
    cx += p.x;
    cy += p.y;
  }
  cx /= n;
  cy /= n;
  double mean_dist = 0.0;
  for (const Correspondence& c : pairs) {
    const Point2& p = use_src ? c.src : c.dst;
    mean_dist += std::hypot(p.x - cx, p.y - cy);
  }
  mean_dist /= n;
  if (mean_dist < 1e-12 * (1.0 + std::abs(cx) + std::abs(cy))) {
    throw DegenerateConfigurationError(
        "homography fit: all points on one side coincide");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0;
  return t;
}

/// True if any 3 of the sample's source points are collinear within an area
/// tolerance of 1e-6 times the squared coordinate span of the sample.
bool degenerate_sample(const std::array<Correspondence, 4>& sample) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = xmax;
  for (const Correspondence& c : sample) {
    xmin = std::min(xmin, c.src.x);
    xmax = std::max(xmax, c.src.x);
    ymin = std::min(ymin, c.src.y);
    ymax = std::max(ymax, c.src.y);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double tol = 1e-6 * span * span;
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2, 3> t;
    int k = 0;
    for (int i = 0; i < 4; ++i) {
      if (i != skip) t[k++] = sample[i].src;
    }
    const double cross = (t[1].x - t[0].x) * (t[2].y - t[0].y) -
                         (t[1].y - t[0].y) * (t[2].x - t[0].x);
    if (std::abs(cross) <= 2.0 * tol) return true;  // area = |cross| / 2
  }
  return false;
}

struct Consensus {
  std::vector<int> inliers;
  double mean_error = 0.0;  // over inliers
};

Consensus score(const Homography& h, const CorrespondenceSet& pairs,
                double threshold) {
  Consensus c;
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    const double e = reprojection_error(h, pairs.pairs[i]);
    if (e < threshold) {
      c.inliers.push_back(i);
      sum += e;
    }
  }
  if (!c.inliers.empty()) sum /= static_cast<double>(c.inliers.size());
  c.mean_error = sum;
  return c;
}

}  // namespace

double iou(const Box& a, const Box& b) {
  const double ix = std::min(a.x + a.w / 2.0, b.x + b.w / 2.0) -
                    std::max(a.x - a.w / 2.0, b.x - b.w / 2.0);
  const double iy = std::min(a.y + a.h / 2.0, b.y + b.h / 2.0) -
                    std::max(a.y - a.h / 2.0, b.y - b.h / 2.0);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Homography Homography::from_matrix(const Eigen::Matrix3d& m,
                                   double det_epsilon) {
  if (!m.allFinite() || m.norm() == 0.0) {
    throw ValidationError("homography entries must be finite and nonzero");
  }
  Eigen::Matrix3d c = canonicalize(m);
  // Invertibility is tested on the unit-Frobenius form so the threshold does
  // not depend on the (arbitrary) projective scale of the input.
  if (std::abs(Eigen::Matrix3d(c / c.norm()).determinant()) <= det_epsilon) {
    throw DegenerateConfigurationError("homography is not invertible");
  }
  Homography h;
  h.m_ = c;
  return h;
}

Homography Homography::inverse() const {
  return from_matrix(m_.inverse());
}

Point2 apply_homography(const Homography& h, const Point2& p) {
  if (!finite(p)) throw ValidationError("point must be finite");
  const Eigen::Vector3d v = h.matrix() * Eigen::Vector3d(p.x, p.y, 1.0);
  if (std::abs(v(2)) <= 1e-12 * v.norm()) {
    throw PointAtInfinityError("point maps to infinity under homography");
  }
  return {v(0) / v(2), v(1) / v(2)};
}

double reprojection_error(const Homography& h, const Correspondence& c) {
  const Point2 mapped = apply_homography(h, c.src);
  return std::hypot(mapped.x - c.dst.x, mapped.y - c.dst.y);
}

Homography dlt_homography(const CorrespondenceSet& pairs) {
  const int n = static_cast<int>(pairs.size());
  if (n < 4) {
    throw InsufficientDataError("homography fit needs at least 4 pairs, got " +
                                std::to_string(n));
  }
  const Eigen::Matrix3d t_src = normalizing_similarity(pairs.pairs, true);
  const Eigen::Matrix3d t_dst = normalizing_similarity(pairs.pairs, false);

  Eigen::MatrixXd a(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const Point2& s = pairs.pairs[i].src;
    const Point2& d = pairs.pairs[i].dst;
    const double x = t_src(0, 0) * s.x + t_src(0, 2);
    const double y = t_src(1, 1) * s.y + t_src(1, 2);
    const double u = t_dst(0, 0) * d.x + t_dst(0, 2);
    const double v = t_dst(1, 1) * d.y + t_dst(1, 2);
    a.row(2 * i) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
    a.row(2 * i + 1) << x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, -u;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // The system must determine the solution up to one scale: rank >= 8.
  if (sv(7) <= 1e-9 * sv(0)) {
    throw DegenerateConfigurationError(
        "homography fit: point configuration is degenerate");
  }
  const Eigen::VectorXd hvec = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7),
      hvec(8);
  const Eigen::Matrix3d h = t_dst.inverse() * hn * t_src;
  return Homography::from_matrix(h);
}

RansacReport ransac_homography(const CorrespondenceSet& pairs,
                               const RansacConfig& cfg, std::mt19937& rng) {
  if (cfg.iterations < 1 || cfg.inlier_threshold <= 0.0 ||
      cfg.min_inliers < 4 || cfg.max_outlier_ratio < 0.0 ||
      cfg.confidence <= 0.0 || cfg.confidence >= 1.0) {
    throw ValidationError("invalid robust-fit configuration");
  }
  RansacReport report;
  const int n = static_cast<int>(pairs.size());
  if (n < 4) return report;  // absent homography, outlier_ratio 1

  std::optional<Homography> best;
  Consensus best_consensus;
  std::uniform_int_distribution<int> pick(0, n - 1);
  int required = cfg.iterations;

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    report.iterations_run = iter;

    std::array<int, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      int candidate = 0;
      bool fresh = false;
      while (!fresh) {
        candidate = pick(rng);
        fresh = true;
        for (int j = 0; j < k; ++j) {
          if (idx[j] == candidate) fresh = false;
        }
      }
      idx[k] = candidate;
    }
    std::array<Correspondence, 4> sample{pairs.pairs[idx[0]],
                                         pairs.pairs[idx[1]],
                                         pairs.pairs[idx[2]],
                                         pairs.pairs[idx[3]]};
    if (degenerate_sample(sample)) continue;

    Homography model;
    try {
      CorrespondenceSet minimal;
      minimal.pairs.assign(sample.begin(), sample.end());
      model = dlt_homography(minimal);
    } catch (const NumericalError&) {
      continue;
    }

    Consensus consensus = score(model, pairs, cfg.inlier_threshold);
    const bool better =
        consensus.inliers.size() > best_consensus.inliers.size() ||
        (consensus.inliers.size() == best_consensus.inliers.size() &&
         !consensus.inliers.empty() &&
         consensus.mean_error < best_consensus.mean_error);
    if (better) {
      best = model;
      best_consensus = std::move(consensus);
      const double w = static_cast<double>(best_consensus.inliers.size()) /
                       static_cast<double>(n);
      const double miss = 1.0 - w * w * w * w;
      if (miss <= 0.0) {
        required = iter;
      } else {
        const double need = std::log(1.0 - cfg.confidence) / std::log(miss);
        required = static_cast<int>(
            std::clamp(std::ceil(need), 1.0,
                       static_cast<double>(cfg.iterations)));
      }
    }
    if (iter >= required) break;
  }

  if (!best || static_cast<int>(best_consensus.inliers.size()) < 4) {
    report.inlier_count = static_cast<int>(best_consensus.inliers.size());
    report.outlier_ratio =
        1.0 - static_cast<double>(report.inlier_count) / n;
    report.mean_inlier_reprojection_error = best_consensus.mean_error;
    return report;
  }

  // Least-squares refit on the winning consensus set; fall back to the
  // minimal-sample model if the refit itself is degenerate.
  Homography refined = *best;
  {
    CorrespondenceSet support;
    support.pairs.reserve(best_consensus.inliers.size());
    for (int i : best_consensus.inliers) support.pairs.push_back(pairs.pairs[i]);
    try {
      refined = dlt_homography(support);
    } catch (const NumericalError&) {
    }
  }

  const Consensus final_consensus = score(refined, pairs, cfg.inlier_threshold);
  report.inlier_count = static_cast<int>(final_consensus.inliers.size());
  report.outlier_ratio = 1.0 - static_cast<double>(report.inlier_count) / n;
  report.mean_inlier_reprojection_error = final_consensus.mean_error;
  if (report.inlier_count >= cfg.min_inliers &&
      report.outlier_ratio <= cfg.max_outlier_ratio) {
    report.homography = refined;
  }
  return report;
}

Box project_box(const Homography& h, const Box& box) {
  if (box.w <= 0.0 || box.h <= 0.0) {
    throw ValidationError("box to project must have positive size");
  }
  const double hw = box.w / 2.0, hh = box.h / 2.0;
  const Point2 c = apply_homography(h, box.center());
  const Point2 tl = apply_homography(h, {box.x - hw, box.y - hh});
  const Point2 tr = apply_homography(h, {box.x + hw, box.y - hh});
  const Point2 br = apply_homography(h, {box.x + hw, box.y + hh});
  const Point2 bl = apply_homography(h, {box.x - hw, box.y + hh});
  const double top = std::hypot(tr.x - tl.x, tr.y - tl.y);
  const double bottom = std::hypot(br.x - bl.x, br.y - bl.y);
  const double left = std::hypot(bl.x - tl.x, bl.y - tl.y);
  const double right = std::hypot(br.x - tr.x, br.y - tr.y);
  Box out{c.x, c.y, (top + bottom) / 2.0, (left + right) / 2.0};
  if (out.w <= 0.0 || out.h <= 0.0) {
    throw DegenerateConfigurationError("projected box collapsed");
  }
  return out;
}

double local_scale(const Homography& h, const Point2& p) {
  const Eigen::Matrix3d& m = h.matrix();
  const double w = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
  const Eigen::Vector3d v = m * Eigen::Vector3d(p.x, p.y, 1.0);
  if (std::abs(w) <= 1e-12 * v.norm()) {
    throw PointAtInfinityError("local scale undefined at infinity");
  }
  const double u = v(0) / w, t = v(1) / w;
  const double j00 = (m(0, 0) - u * m(2, 0)) / w;
  const double j01 = (m(0, 1) - u * m(2, 1)) / w;
  const double j10 = (m(1, 0) - t * m(2, 0)) / w;
  const double j11 = (m(1, 1) - t * m(2, 1)) / w;
  return std::sqrt(std::abs(j00 * j11 - j01 * j10));
}

}  // namespace mptrack
