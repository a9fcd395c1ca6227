#pragma once

#include <cstdint>
#include <vector>

#include "stereorect/geometry.h"
#include "stereorect/metrics.h"

namespace stereorect {

struct RansacConfig {
  int max_iterations = 2000;
  double inlier_threshold = 1.5;  // pixels, per-pair Sampson distance
  double confidence = 0.999;
  std::uint64_t seed = 0;

  void validate() const;
};

//! Normalized eight-point estimate of F (m_l^T F m_r = 0) with rank two
//! enforced. Throws kDegenerateConfiguration for fewer than 8 pairs or when
//! the design matrix has a null space of dimension > 1.
Mat3 estimate_fundamental_8pt(const CorrespondenceSet& c);

struct RansacResult {
  CorrespondenceSet inliers;
  Mat3 F = Mat3::Zero();
  std::vector<std::size_t> inlier_indices;  // into the input set, ascending
  int iterations = 0;
};

//! Deterministic given cfg.seed. Throws kInsufficientInliers when the input
//! has fewer than 8 pairs or the final consensus is smaller than 8.
RansacResult ransac_filter(const CorrespondenceSet& c, const RansacConfig& cfg);

}  // namespace stereorect
