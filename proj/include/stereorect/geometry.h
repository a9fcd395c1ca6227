#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace stereorect {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

//! Homogeneous points with |w| below this are treated as lying at infinity.
inline constexpr double kHomogeneousEpsilon = 1e-12;

enum class Side { kLeft, kRight };

//! Pinhole intrinsics with square pixels, zero skew and the principal point
//! at the image center.
struct CameraIntrinsics {
  double alpha = 1.0;   // focal length in pixels
  double width = 0.0;   // image width in pixels
  double height = 0.0;  // image height in pixels

  Mat3 as_matrix() const;
  Mat3 inverse_matrix() const;
};

//! World-to-camera rigid transform: x_cam = rotation * x_world + translation.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  //! Camera center in world coordinates, the point mapped to the camera origin.
  Vec3 optical_center() const;
  static CameraPose from_center(const Mat3& rotation, const Vec3& center);
};

//! Throws kPointAtInfinity when |w| < kHomogeneousEpsilon.
Vec2 dehomogenize(const Vec3& p);

//! Scales a homogeneous quantity so that its largest-magnitude entry is +1.
Vec3 normalize_homogeneous(const Vec3& v);
Mat3 normalize_homogeneous(const Mat3& m);

//! K [R | t] [X; 1]. Throws kDegenerateProjection for points on the focal
//! plane.
Vec3 project(const CameraIntrinsics& K, const CameraPose& pose,
             const Vec3& point_world);

//! Fundamental matrix of a rectified pair, with m_l^T F m_r = v_r - v_l.
Mat3 rectified_fundamental();

//! H_l^T F_inf H_r. Throws kSingularHomography when either |det H| < 1e-12.
Mat3 fundamental_from_homographies(const Mat3& Hl, const Mat3& Hr);

//! Unit-norm null vector of F (kLeft, F e = 0) or of F^T (kRight,
//! F^T e = 0). The labels follow the F e_l = F^T e_r = 0 convention; since
//! correspondences satisfy m_l^T F m_r = 0, the kLeft vector is the image of
//! the left camera center in the right view. Throws kRankDeficient when F does
//! not have rank two.
Vec3 epipole(const Mat3& F, Side side);

//! Maps a pixel through H. Throws kPointAtInfinity.
Vec2 transform_point(const Mat3& H, const Vec2& p);

}  // namespace stereorect
