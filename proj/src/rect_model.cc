#include "stereorect/rect_model.h"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "stereorect/error.h"

namespace stereorect {

Eigen::Matrix<double, RectParams::kSize, 1> RectParams::to_vector() const {
  Eigen::Matrix<double, kSize, 1> v;
  v << theta_yl, theta_zl, theta_xr, theta_yr, theta_zr, t_yl, t_yr, delta_fl,
      delta_fr;
  return v;
}

RectParams RectParams::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != kSize) {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter vector must have 9 entries");
  }
  return RectParams{v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8)};
}

bool RectParams::all_finite() const { return to_vector().allFinite(); }

double default_focal(const RigDims& dims) { return dims.width + dims.height; }

CameraIntrinsics old_intrinsics(const RigDims& dims, double delta_f,
                                Diagnostics* diagnostics) {
  if (!dims.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be > 0");
  }
  const double clamped =
      std::clamp(delta_f, -kMaxFocalDeviation, kMaxFocalDeviation);
  if (clamped != delta_f && diagnostics != nullptr) {
    std::ostringstream msg;
    msg << "focal deviation " << delta_f << " clamped to " << clamped;
    diagnostics->warnings.push_back(msg.str());
  }
  return CameraIntrinsics{default_focal(dims) * std::pow(3.0, clamped),
                          dims.width, dims.height};
}

Mat3 rotation(double theta_x, double theta_y, double theta_z) {
  const double cx = std::cos(theta_x), sx = std::sin(theta_x);
  const double cy = std::cos(theta_y), sy = std::sin(theta_y);
  const double cz = std::cos(theta_z), sz = std::sin(theta_z);
  Mat3 Rx, Ry, Rz;
  Rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  Ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  Rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return Rx * Ry * Rz;
}

Mat3 homography(Side side, const RectParams& params, const RigDims& dims,
                Diagnostics* diagnostics) {
  if (!params.all_finite()) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite rectification params");
  }
  const CameraIntrinsics K_new = old_intrinsics(dims, params.delta_fl, diagnostics);
  const bool left = side == Side::kLeft;
  const CameraIntrinsics K_old =
      left ? K_new : old_intrinsics(dims, params.delta_fr, diagnostics);
  const Mat3 R = left ? rotation(0.0, params.theta_yl, params.theta_zl)
                      : rotation(params.theta_xr, params.theta_yr,
                                 params.theta_zr);
  Mat3 T = Mat3::Identity();
  T(1, 2) = left ? params.t_yl : params.t_yr;

  const Mat3 H = K_new.as_matrix() * T * R * K_old.inverse_matrix();
  if (!(std::abs(H.determinant()) >= 1e-12)) {
    throw Error(ErrorCode::kSingularHomography, "model homography is singular");
  }
  return H;
}

HomographyPair homographies(const RectParams& params, const RigDims& dims,
                            Diagnostics* diagnostics) {
  return HomographyPair{homography(Side::kLeft, params, dims, diagnostics),
                        homography(Side::kRight, params, dims, diagnostics)};
}

Mat3 induced_fundamental(const RectParams& params, const RigDims& dims) {
  const HomographyPair H = homographies(params, dims);
  return fundamental_from_homographies(H.left, H.right);
}

}  // namespace stereorect
