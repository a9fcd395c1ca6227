#include "stereorect/matching.h"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stereorect/error.h"

namespace stereorect {
namespace {

constexpr std::size_t kMinimalSample = 8;

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Mat3 normalizing_transform(const std::vector<Vec2>& pts) {
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 1e-12)) {
    throw Error(ErrorCode::kDegenerateConfiguration, "all points coincide");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Mat3 T;
  T << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  return T;
}

std::vector<std::size_t> inliers_under(const Mat3& F, const CorrespondenceSet& c,
                                       double threshold) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    double r = 0.0;
    try {
      r = std::abs(sampson_residual(F, c.pairs[i]));
    } catch (const Error&) {
      continue;
    }
    if (r <= threshold) idx.push_back(i);
  }
  return idx;
}

int required_iterations(double inlier_ratio, double confidence, int cap) {
  if (inlier_ratio >= 1.0) return 1;
  if (inlier_ratio <= 0.0) return cap;
  const double p_good = std::pow(inlier_ratio, static_cast<double>(kMinimalSample));
  const double denom = std::log1p(-p_good);
  if (!(denom < 0.0)) return cap;
  const double n = std::ceil(std::log(1.0 - confidence) / denom);
  return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(cap)));
}

}  // namespace

void RansacConfig::validate() const {
  if (max_iterations < 1 || !(inlier_threshold > 0.0) || !(confidence > 0.0) ||
      !(confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid RANSAC configuration");
  }
}

Mat3 estimate_fundamental_8pt(const CorrespondenceSet& c) {
  const std::size_t n = c.pairs.size();
  if (n < kMinimalSample) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "eight-point estimation needs at least 8 pairs");
  }
  std::vector<Vec2> left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = Vec2(c.pairs[i].ul, c.pairs[i].vl);
    right[i] = Vec2(c.pairs[i].ur, c.pairs[i].vr);
  }
  const Mat3 Tl = normalizing_transform(left);
  const Mat3 Tr = normalizing_transform(right);

  Eigen::MatrixXd A(n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 ml = Tl * left[i].homogeneous();
    const Vec3 mr = Tr * right[i].homogeneous();
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) A(i, 3 * r + k) = ml(r) * mr(k);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  // Rank 8 is required for a unique solution.
  if (s.size() < 8 || !(s(0) > 0.0) || s(7) < 1e-10 * s(0)) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "eight-point design matrix is rank deficient");
  }
  const Eigen::VectorXd f = svd.matrixV().col(8);
  Mat3 Fn;
  Fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

  Eigen::JacobiSVD<Mat3> fsvd(Fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 sv = fsvd.singularValues();
  sv(2) = 0.0;
  Fn = fsvd.matrixU() * sv.asDiagonal() * fsvd.matrixV().transpose();

  const Mat3 F = Tl.transpose() * Fn * Tr;
  return F / F.norm();
}

RansacResult ransac_filter(const CorrespondenceSet& c, const RansacConfig& cfg) {
  cfg.validate();
  const std::size_t n = c.pairs.size();
  if (n < kMinimalSample) {
    throw Error(ErrorCode::kInsufficientInliers,
                "RANSAC needs at least 8 correspondences");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::size_t> best;
  int limit = cfg.max_iterations;
  int iter = 0;
  for (; iter < limit; ++iter) {
    // Partial Fisher-Yates draws 8 distinct indices.
    for (std::size_t k = 0; k < kMinimalSample; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(order[k], order[pick(rng)]);
    }
    CorrespondenceSet sample{c.dims, {}};
    for (std::size_t k = 0; k < kMinimalSample; ++k) {
      sample.pairs.push_back(c.pairs[order[k]]);
    }
    Mat3 F;
    try {
      F = estimate_fundamental_8pt(sample);
    } catch (const Error&) {
      continue;
    }
    auto support = inliers_under(F, c, cfg.inlier_threshold);
    if (support.size() > best.size()) {
      best = std::move(support);
      limit = std::min(limit, required_iterations(
                                  static_cast<double>(best.size()) / n,
                                  cfg.confidence, cfg.max_iterations));
    }
  }
  if (best.size() < kMinimalSample) {
    throw Error(ErrorCode::kInsufficientInliers, "consensus set below 8 pairs");
  }

  // Refit on the consensus until the inlier set is stable so that the
  // returned pairs are exactly the inliers of the returned F.
  RansacResult result;
  result.iterations = iter;
  std::vector<std::size_t> current = best;
  for (int round = 0; round < 10; ++round) {
    Mat3 F;
    try {
      F = estimate_fundamental_8pt(c.subset(current));
    } catch (const Error&) {
      throw Error(ErrorCode::kInsufficientInliers,
                  "consensus set is degenerate");
    }
    auto next = inliers_under(F, c, cfg.inlier_threshold);
    result.F = F;
    const bool stable = next == current;
    current = std::move(next);
    if (stable || current.size() < kMinimalSample) break;
  }
  if (current.size() < kMinimalSample) {
    throw Error(ErrorCode::kInsufficientInliers, "refit consensus below 8 pairs");
  }
  result.inlier_indices = current;
  result.inliers = c.subset(current);
  return result;
}

}  // namespace stereorect
