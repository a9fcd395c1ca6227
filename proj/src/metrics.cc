#include "stereorect/metrics.h"

#include <array>
#include <cmath>
#include <numbers>

#include "stereorect/error.h"

namespace stereorect {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kMinLength = 1e-9;

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Unsigned angle in degrees, in [0, 180].
double angle_between(const Vec2& a, const Vec2& b) {
  return std::atan2(std::abs(cross2(a, b)), a.dot(b)) * kRadToDeg;
}

std::array<Vec2, 4> corners(const RigDims& d) {
  return {Vec2(0.0, 0.0), Vec2(d.width, 0.0), Vec2(d.width, d.height),
          Vec2(0.0, d.height)};
}

std::array<Vec2, 4> mapped_corners(const Mat3& H, const RigDims& d) {
  std::array<Vec2, 4> out;
  const auto in = corners(d);
  for (std::size_t i = 0; i < 4; ++i) out[i] = transform_point(H, in[i]);
  return out;
}

Vec2 center(const RigDims& d) { return Vec2(d.width / 2.0, d.height / 2.0); }

double signed_area(const std::array<Vec2, 4>& q) {
  double twice = 0.0;
  for (std::size_t i = 0; i < 4; ++i) twice += cross2(q[i], q[(i + 1) % 4]);
  return 0.5 * twice;
}

void require_dims(const RigDims& d) {
  if (!d.valid()) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be > 0");
  }
}

}  // namespace

void CorrespondenceSet::validate() const {
  require_dims(dims);
  for (const auto& p : pairs) {
    if (!std::isfinite(p.ul) || !std::isfinite(p.vl) || !std::isfinite(p.ur) ||
        !std::isfinite(p.vr)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite correspondence");
    }
  }
}

CorrespondenceSet CorrespondenceSet::subset(
    const std::vector<std::size_t>& indices) const {
  CorrespondenceSet out{dims, {}};
  out.pairs.reserve(indices.size());
  for (std::size_t i : indices) out.pairs.push_back(pairs.at(i));
  return out;
}

double sampson_residual(const Mat3& F, const Correspondence& c) {
  const Vec3 ml = c.left();
  const Vec3 mr = c.right();
  const Vec3 Fmr = F * mr;
  const Vec3 Ftml = F.transpose() * ml;
  const double den = Fmr(0) * Fmr(0) + Fmr(1) * Fmr(1) + Ftml(0) * Ftml(0) +
                     Ftml(1) * Ftml(1);
  if (!(den > 0.0)) {
    throw Error(ErrorCode::kZeroDenominator,
                "Sampson denominator vanishes for a correspondence");
  }
  return ml.dot(Fmr) / std::sqrt(den);
}

double sampson_error(const Mat3& F, const CorrespondenceSet& c) {
  if (c.pairs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty correspondence set");
  }
  double sum_sq = 0.0;
  for (const auto& p : c.pairs) {
    const double r = sampson_residual(F, p);
    sum_sq += r * r;
  }
  return std::sqrt(sum_sq) / static_cast<double>(c.pairs.size());
}

double vertical_disparity(const Mat3& Hl, const Mat3& Hr,
                          const CorrespondenceSet& c) {
  if (c.pairs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty correspondence set");
  }
  double sum = 0.0;
  for (const auto& p : c.pairs) {
    const Vec2 l = dehomogenize(Hl * p.left());
    const Vec2 r = dehomogenize(Hr * p.right());
    sum += std::abs(l.y() - r.y());
  }
  return sum / static_cast<double>(c.pairs.size());
}

double orthogonality(const Mat3& H, const RigDims& dims) {
  require_dims(dims);
  const double w = dims.width, h = dims.height;
  const Vec2 a = transform_point(H, Vec2(w / 2.0, 0.0));
  const Vec2 b = transform_point(H, Vec2(w, h / 2.0));
  const Vec2 c = transform_point(H, Vec2(w / 2.0, h));
  const Vec2 d = transform_point(H, Vec2(0.0, h / 2.0));
  const Vec2 x = b - d;
  const Vec2 y = c - a;
  if (x.norm() < kMinLength || y.norm() < kMinLength) {
    throw Error(ErrorCode::kZeroLength, "collapsed midpoint axis");
  }
  return angle_between(x, y);
}

double aspect_ratio_legacy(const Mat3& H, const RigDims& dims) {
  require_dims(dims);
  const auto q = mapped_corners(H, dims);
  const Vec2 x = q[1] - q[3];
  const Vec2 y = q[2] - q[0];
  if (y.norm() < kMinLength) {
    throw Error(ErrorCode::kZeroLength, "collapsed corner diagonal");
  }
  return std::sqrt(x.squaredNorm() / y.squaredNorm());
}

double aspect_ratio_modified(const Mat3& H, const RigDims& dims) {
  require_dims(dims);
  const auto q = mapped_corners(H, dims);
  const Vec2 o = transform_point(H, center(dims));
  const double ao = (q[0] - o).norm();
  const double bo = (q[1] - o).norm();
  const double co = (q[2] - o).norm();
  const double dO = (q[3] - o).norm();
  if (co < kMinLength || dO < kMinLength) {
    throw Error(ErrorCode::kZeroLength, "collapsed half diagonal");
  }
  return 0.5 * (ao / co + bo / dO);
}

double skewness(const Mat3& H, const RigDims& dims) {
  require_dims(dims);
  const auto q = mapped_corners(H, dims);
  if (std::abs(signed_area(q)) < 1e-9 * dims.width * dims.height) {
    throw Error(ErrorCode::kDegenerateQuadrilateral, "mapped corners collinear");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 prev = q[(i + 3) % 4] - q[i];
    const Vec2 next = q[(i + 1) % 4] - q[i];
    if (prev.norm() < kMinLength || next.norm() < kMinLength) {
      throw Error(ErrorCode::kDegenerateQuadrilateral, "coincident corners");
    }
    total += std::abs(90.0 - angle_between(prev, next));
  }
  return total / 4.0;
}

double signed_rotation_measure(const Mat3& H, const RigDims& dims) {
  require_dims(dims);
  const Vec2 o = center(dims);
  const Vec2 f(dims.width, dims.height / 2.0);
  const Vec2 before = f - o;
  const Vec2 after = transform_point(H, f) - transform_point(H, o);
  if (after.norm() < kMinLength) {
    throw Error(ErrorCode::kZeroLength, "collapsed rotation probe");
  }
  return std::atan2(cross2(before, after), before.dot(after)) * kRadToDeg;
}

double rotation_measure(const Mat3& H, const RigDims& dims) {
  return std::abs(signed_rotation_measure(H, dims));
}

double size_ratio(const Mat3& H, const RigDims& dims) {
  require_dims(dims);
  const double area = std::abs(signed_area(mapped_corners(H, dims)));
  const double original = dims.width * dims.height;
  if (area < 1e-9 * original) {
    throw Error(ErrorCode::kDegenerateQuadrilateral, "mapped area vanishes");
  }
  return area / original;
}

SideDistortion side_distortion(const Mat3& H, const RigDims& dims) {
  SideDistortion s;
  s.orthogonality = orthogonality(H, dims);
  s.aspect_ratio = aspect_ratio_legacy(H, dims);
  s.modified_aspect_ratio = aspect_ratio_modified(H, dims);
  s.skewness = skewness(H, dims);
  s.rotation = rotation_measure(H, dims);
  s.size_ratio = size_ratio(H, dims);
  return s;
}

DistortionReport full_report(const Mat3& Hl, const Mat3& Hr,
                             const CorrespondenceSet& c) {
  DistortionReport r;
  r.sampson = sampson_error(fundamental_from_homographies(Hl, Hr), c);
  r.vertical_disparity = vertical_disparity(Hl, Hr, c);
  r.left = side_distortion(Hl, c.dims);
  r.right = side_distortion(Hr, c.dims);
  auto avg = [](double a, double b) { return 0.5 * (a + b); };
  r.mean.orthogonality = avg(r.left.orthogonality, r.right.orthogonality);
  r.mean.aspect_ratio = avg(r.left.aspect_ratio, r.right.aspect_ratio);
  r.mean.modified_aspect_ratio =
      avg(r.left.modified_aspect_ratio, r.right.modified_aspect_ratio);
  r.mean.skewness = avg(r.left.skewness, r.right.skewness);
  r.mean.rotation = avg(r.left.rotation, r.right.rotation);
  r.mean.size_ratio = avg(r.left.size_ratio, r.right.size_ratio);
  return r;
}

}  // namespace stereorect
