#include "stereorect/geometry.h"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "stereorect/error.h"

namespace stereorect {

Mat3 CameraIntrinsics::as_matrix() const {
  Mat3 K;
  K << alpha, 0.0, width / 2.0,
       0.0, alpha, height / 2.0,
       0.0, 0.0, 1.0;
  return K;
}

Mat3 CameraIntrinsics::inverse_matrix() const {
  Mat3 Kinv;
  Kinv << 1.0 / alpha, 0.0, -width / (2.0 * alpha),
          0.0, 1.0 / alpha, -height / (2.0 * alpha),
          0.0, 0.0, 1.0;
  return Kinv;
}

Vec3 CameraPose::optical_center() const {
  return -rotation.transpose() * translation;
}

CameraPose CameraPose::from_center(const Mat3& rotation, const Vec3& center) {
  return CameraPose{rotation, -rotation * center};
}

Vec2 dehomogenize(const Vec3& p) {
  if (!(std::abs(p.z()) >= kHomogeneousEpsilon)) {
    throw Error(ErrorCode::kPointAtInfinity, "homogeneous scale is ~0");
  }
  return p.hnormalized();
}

Vec3 normalize_homogeneous(const Vec3& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return v / v(idx);
}

Mat3 normalize_homogeneous(const Mat3& m) {
  Eigen::Index r = 0, c = 0;
  m.cwiseAbs().maxCoeff(&r, &c);
  return m / m(r, c);
}

Vec3 project(const CameraIntrinsics& K, const CameraPose& pose,
             const Vec3& point_world) {
  const Vec3 cam = pose.rotation * point_world + pose.translation;
  if (std::abs(cam.z()) < kHomogeneousEpsilon) {
    throw Error(ErrorCode::kDegenerateProjection,
                "point lies on the focal plane");
  }
  return K.as_matrix() * cam;
}

Mat3 rectified_fundamental() {
  Mat3 F;
  F << 0.0, 0.0, 0.0,
       0.0, 0.0, -1.0,
       0.0, 1.0, 0.0;
  return F;
}

Mat3 fundamental_from_homographies(const Mat3& Hl, const Mat3& Hr) {
  if (!(std::abs(Hl.determinant()) >= 1e-12) ||
      !(std::abs(Hr.determinant()) >= 1e-12)) {
    throw Error(ErrorCode::kSingularHomography,
                "rectifying homography is not invertible");
  }
  return Hl.transpose() * rectified_fundamental() * Hr;
}

Vec3 epipole(const Mat3& F, Side side) {
  const Mat3 M = side == Side::kLeft ? F : Mat3(F.transpose());
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) < 1e-10 * s(0)) {
    throw Error(ErrorCode::kRankDeficient, "matrix rank is below two");
  }
  return svd.matrixV().col(2).normalized();
}

Vec2 transform_point(const Mat3& H, const Vec2& p) {
  return dehomogenize(H * p.homogeneous());
}

}  // namespace stereorect
