#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "stereorect/geometry.h"

namespace stereorect {

//! Image size shared by both views of a stereo pair, in pixels.
struct RigDims {
  double width = 0.0;
  double height = 0.0;

  bool valid() const { return width > 0.0 && height > 0.0; }
};

//! The nine free parameters of the rectifying model. The left x-rotation is
//! structurally absent: it only re-selects which part of the scene is seen.
//!
//! Angles are radians. The y-translations act in normalized camera
//! coordinates, so the pixel shift is roughly alpha * t_y. Focal deviations are
//! log-3 offsets from the default focal w + h.
struct RectParams {
  double theta_yl = 0.0;
  double theta_zl = 0.0;
  double theta_xr = 0.0;
  double theta_yr = 0.0;
  double theta_zr = 0.0;
  double t_yl = 0.0;
  double t_yr = 0.0;
  double delta_fl = 0.0;
  double delta_fr = 0.0;

  static constexpr int kSize = 9;

  Eigen::Matrix<double, kSize, 1> to_vector() const;
  static RectParams from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);
  bool all_finite() const;
};

struct HomographyPair {
  Mat3 left = Mat3::Identity();
  Mat3 right = Mat3::Identity();
};

//! Collects non-fatal warnings, e.g. clamped focal deviations.
struct Diagnostics {
  std::vector<std::string> warnings;
};

inline constexpr double kMaxFocalDeviation = 1.5;

double default_focal(const RigDims& dims);

//! alpha = (w + h) * 3^delta_f, delta_f clamped to +-kMaxFocalDeviation.
CameraIntrinsics old_intrinsics(const RigDims& dims, double delta_f,
                                Diagnostics* diagnostics = nullptr);

//! R_x(theta_x) * R_y(theta_y) * R_z(theta_z).
Mat3 rotation(double theta_x, double theta_y, double theta_z);

//! H = K_n T(t_y) R K_o^{-1}; K_n is the current left intrinsics for both
//! sides.
Mat3 homography(Side side, const RectParams& params, const RigDims& dims,
                Diagnostics* diagnostics = nullptr);

HomographyPair homographies(const RectParams& params, const RigDims& dims,
                            Diagnostics* diagnostics = nullptr);

//! H_l^T F_inf H_r for the model's homographies.
Mat3 induced_fundamental(const RectParams& params, const RigDims& dims);

}  // namespace stereorect
