#pragma once

#include <vector>

#include "stereorect/geometry.h"
#include "stereorect/rect_model.h"

namespace stereorect {

struct Correspondence {
  double ul = 0.0, vl = 0.0;
  double ur = 0.0, vr = 0.0;

  Vec3 left() const { return Vec3(ul, vl, 1.0); }
  Vec3 right() const { return Vec3(ur, vr, 1.0); }
};

struct CorrespondenceSet {
  RigDims dims;
  std::vector<Correspondence> pairs;

  std::size_t size() const { return pairs.size(); }
  //! Throws kInvalidArgument for invalid dims or non-finite coordinates.
  void validate() const;
  CorrespondenceSet subset(const std::vector<std::size_t>& indices) const;
};

//! The six shape measures of one warped image.
struct SideDistortion {
  double orthogonality = 90.0;          // E_O, degrees
  double aspect_ratio = 1.0;            // E_A
  double modified_aspect_ratio = 1.0;   // E_AR
  double skewness = 0.0;                // E_Sk, degrees
  double rotation = 0.0;                // E_R, degrees
  double size_ratio = 1.0;              // E_SR
};

struct DistortionReport {
  double sampson = 0.0;             // E_s
  double vertical_disparity = 0.0;  // E_v, pixels
  SideDistortion left;
  SideDistortion right;
  SideDistortion mean;  // arithmetic mean of left and right
};

//! Signed first-order geometric error of one pair,
//! (m_l^T F m_r) / sqrt((F m_r)_1^2 + (F m_r)_2^2 + (F^T m_l)_1^2 + (F^T m_l)_2^2).
//! Throws kZeroDenominator.
double sampson_residual(const Mat3& F, const Correspondence& c);

//! (1/N) * sqrt(sum_j residual_j^2).
double sampson_error(const Mat3& F, const CorrespondenceSet& c);

//! Mean |y(H_l m_l) - y(H_r m_r)| over all pairs, using dehomogenized rows.
double vertical_disparity(const Mat3& Hl, const Mat3& Hr,
                          const CorrespondenceSet& c);

// Shape measures of a single homography acting on a w x h image. Angles are
// in degrees.

//! Angle between the mapped horizontal and vertical edge-midpoint axes.
double orthogonality(const Mat3& H, const RigDims& dims);
//! Ratio of the mapped corner diagonals, sqrt(|b'-d'|^2 / |c'-a'|^2).
double aspect_ratio_legacy(const Mat3& H, const RigDims& dims);
//! Mean of the opposite half-diagonal ratios |a'o'|/|c'o'| and |b'o'|/|d'o'|
//! around the mapped image center o'.
double aspect_ratio_modified(const Mat3& H, const RigDims& dims);
//! Mean absolute deviation of the mapped corner angles from 90 degrees.
double skewness(const Mat3& H, const RigDims& dims);
//! Unsigned angle between center->right-midpoint before and after mapping.
double rotation_measure(const Mat3& H, const RigDims& dims);
//! Same angle, signed counter-clockwise in image coordinates; in (-180, 180].
double signed_rotation_measure(const Mat3& H, const RigDims& dims);
//! Mapped corner-quadrilateral area over w * h.
double size_ratio(const Mat3& H, const RigDims& dims);

SideDistortion side_distortion(const Mat3& H, const RigDims& dims);

DistortionReport full_report(const Mat3& Hl, const Mat3& Hr,
                             const CorrespondenceSet& c);

}  // namespace stereorect
