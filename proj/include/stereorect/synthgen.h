#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "stereorect/geometry.h"
#include "stereorect/metrics.h"
#include "stereorect/rect_model.h"

namespace stereorect {

enum class Distortion {
  kNone,
  kXTrans,
  kYTrans,
  kZTrans,
  kXRot,
  kYRot,
  kZRot,
  kCompound1,
  kCompound2,
};

std::string_view to_string(Distortion d);
Distortion parse_distortion(std::string_view text);

//! Magnitude used when a RigConfig leaves it unset:
//!   kXTrans, kYTrans: right-camera shift in baseline units (0.5, 0.05)
//!   kZTrans: relative zoom of the right camera (0.2, a 20% size change)
//!   k?Rot: right-camera rotation in radians (10 degrees)
//!   kCompound*: scale applied to the whole compound perturbation (1.0)
double default_magnitude(Distortion d);

//! A synthetic stereo rig. Both cameras start parallel, looking down +Z with
//! the baseline along +X; the distortion then perturbs the pose and zoom.
struct RigConfig {
  RigDims dims{1920.0, 1080.0};
  double baseline = 1.0;
  //! Focal length of the unperturbed cameras; <= 0 selects w + h.
  double focal = 0.0;
  int n_points = 300;
  //! Full extent of the sampling box in x, y and z, and the depth of its
  //! center, in world units.
  std::array<double, 3> box_extent{32.0, 20.0, 24.0};
  double box_depth = 32.0;
  Distortion distortion = Distortion::kNone;
  //! NaN selects default_magnitude(distortion).
  double magnitude = std::numeric_limits<double>::quiet_NaN();
  double noise_sigma = 0.0;       // pixels, on every coordinate of inliers
  double outlier_fraction = 0.0;  // in [0, 1)
  std::uint64_t seed = 0;

  void validate() const;
};

struct CameraSetup {
  CameraIntrinsics intrinsics;
  CameraPose pose;
};

struct GroundTruth {
  Mat3 F = Mat3::Zero();  // m_l^T F m_r = 0 for exact inliers
  HomographyPair rectification;
  std::vector<bool> inlier_mask;
  //! World point behind each pair; zero for outliers.
  std::vector<Vec3> world_points;
  CameraSetup left;
  CameraSetup right;
  Distortion distortion = Distortion::kNone;
  double magnitude = 0.0;
};

struct SyntheticPair {
  CorrespondenceSet matches;
  GroundTruth truth;
};

//! Outliers are drawn until their Sampson distance under the true F exceeds
//! max(10 * noise_sigma, kMinOutlierDistance).
inline constexpr double kMinOutlierDistance = 4.0;

//! Calibrated rectification of two known cameras: both are rotated to share
//! an orientation whose x axis follows the baseline, and re-imaged with the
//! left intrinsics.
HomographyPair calibrated_rectification(const CameraSetup& left,
                                        const CameraSetup& right);

//! Deterministic in cfg.seed. Throws kTooFewVisiblePoints when fewer than 8
//! points are visible in both views.
SyntheticPair generate(const RigConfig& cfg);

struct SuiteOptions {
  int n_points = 300;
  double noise_sigma = 0.3;
  double outlier_fraction = 0.1;
};

struct SuiteCase {
  std::string name;
  CorrespondenceSet matches;
  GroundTruth truth;
};

//! The eight-case benchmark: one case per single distortion kind plus two
//! compound cases, ordered by name.
std::vector<SuiteCase> make_suite(const RigDims& dims, std::uint64_t seed,
                                  const SuiteOptions& options = {});

}  // namespace stereorect
