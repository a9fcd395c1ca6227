#include "stereorect/synthgen.h"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "stereorect/error.h"

namespace stereorect {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Perturbation of one camera relative to the canonical parallel rig.
struct CameraPerturbation {
  Vec3 rotation_deg = Vec3::Zero();  // about camera x, y, z
  Vec3 shift = Vec3::Zero();         // in baseline units
  double zoom = 1.0;
};

struct RigPerturbation {
  CameraPerturbation left;
  CameraPerturbation right;
};

RigPerturbation perturbation_for(Distortion d, double m) {
  RigPerturbation p;
  switch (d) {
    case Distortion::kNone:
      break;
    case Distortion::kXTrans:
      p.right.shift.x() = m;
      break;
    case Distortion::kYTrans:
      p.right.shift.y() = m;
      break;
    case Distortion::kZTrans:
      p.right.zoom = 1.0 + m;
      break;
    case Distortion::kXRot:
      p.right.rotation_deg.x() = m / kDeg;
      break;
    case Distortion::kYRot:
      p.right.rotation_deg.y() = m / kDeg;
      break;
    case Distortion::kZRot:
      p.right.rotation_deg.z() = m / kDeg;
      break;
    case Distortion::kCompound1:
      p.left.rotation_deg = Vec3(2.0, 3.0, -2.0) * m;
      p.left.shift = Vec3(0.0, -0.02, 0.0) * m;
      p.right.rotation_deg = Vec3(-4.0, -5.0, 4.0) * m;
      p.right.shift = Vec3(0.6, 0.04, 0.0) * m;
      p.right.zoom = 1.0 + 0.12 * m;
      break;
    case Distortion::kCompound2:
      p.left.rotation_deg = Vec3(-3.0, -4.0, 3.0) * m;
      p.left.shift = Vec3(0.0, 0.03, 0.0) * m;
      p.right.rotation_deg = Vec3(5.0, 6.0, -5.0) * m;
      p.right.shift = Vec3(1.2, -0.05, 0.0) * m;
      p.right.zoom = 1.0 + 0.2 * m;
      break;
  }
  return p;
}

CameraSetup make_camera(const RigConfig& cfg, double alpha, double x0,
                        const CameraPerturbation& p) {
  const Vec3 r = p.rotation_deg * kDeg;
  // Camera-to-world orientation; its transpose maps world to camera.
  const Mat3 orientation = rotation(r.x(), r.y(), r.z());
  const Vec3 center = Vec3(x0, 0.0, 0.0) + p.shift * cfg.baseline;
  return CameraSetup{CameraIntrinsics{alpha * p.zoom, cfg.dims.width, cfg.dims.height},
                     CameraPose::from_center(orientation.transpose(), center)};
}

bool inside(const Vec2& p, const RigDims& d) {
  return p.x() >= 0.0 && p.x() < d.width && p.y() >= 0.0 && p.y() < d.height;
}

// Projection of a world point, or nothing if it is behind or off the frame.
std::optional<Vec2> visible_projection(const CameraSetup& cam, const Vec3& X,
                                       const RigDims& dims) {
  const Vec3 xc = cam.pose.rotation * X + cam.pose.translation;
  if (xc.z() <= 1e-6) return std::nullopt;
  const Vec2 px = dehomogenize(project(cam.intrinsics, cam.pose, X));
  if (!inside(px, dims)) return std::nullopt;
  return px;
}

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 step keeps per-case streams decorrelated.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view to_string(Distortion d) {
  switch (d) {
    case Distortion::kNone: return "none";
    case Distortion::kXTrans: return "x_translation";
    case Distortion::kYTrans: return "y_translation";
    case Distortion::kZTrans: return "z_translation";
    case Distortion::kXRot: return "x_rotation";
    case Distortion::kYRot: return "y_rotation";
    case Distortion::kZRot: return "z_rotation";
    case Distortion::kCompound1: return "compound1";
    case Distortion::kCompound2: return "compound2";
  }
  return "unknown";
}

Distortion parse_distortion(std::string_view text) {
  for (Distortion d :
       {Distortion::kNone, Distortion::kXTrans, Distortion::kYTrans,
        Distortion::kZTrans, Distortion::kXRot, Distortion::kYRot,
        Distortion::kZRot, Distortion::kCompound1, Distortion::kCompound2}) {
    if (to_string(d) == text) return d;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown distortion '" + std::string(text) + "'");
}

double default_magnitude(Distortion d) {
  switch (d) {
    case Distortion::kNone: return 0.0;
    case Distortion::kXTrans: return 0.5;
    case Distortion::kYTrans: return 0.05;
    case Distortion::kZTrans: return 0.2;
    case Distortion::kXRot:
    case Distortion::kYRot:
    case Distortion::kZRot: return 10.0 * kDeg;
    case Distortion::kCompound1:
    case Distortion::kCompound2: return 1.0;
  }
  return 0.0;
}

void RigConfig::validate() const {
  const bool ok = dims.valid() && baseline > 0.0 && n_points >= 8 &&
                  box_extent[0] > 0.0 && box_extent[1] > 0.0 &&
                  box_extent[2] > 0.0 && box_depth - box_extent[2] / 2.0 > 0.0 &&
                  noise_sigma >= 0.0 && outlier_fraction >= 0.0 &&
                  outlier_fraction < 1.0 &&
                  (std::isnan(magnitude) || std::isfinite(magnitude));
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "invalid rig configuration");
}

HomographyPair calibrated_rectification(const CameraSetup& left,
                                        const CameraSetup& right) {
  const Vec3 cl = left.pose.optical_center();
  const Vec3 cr = right.pose.optical_center();
  const Vec3 x_axis = (cr - cl).normalized();
  const Vec3 left_axis = left.pose.rotation.transpose() * Vec3::UnitZ();
  const Vec3 y_axis = left_axis.cross(x_axis).normalized();
  const Vec3 z_axis = x_axis.cross(y_axis);
  Mat3 R_new;
  R_new.row(0) = x_axis.transpose();
  R_new.row(1) = y_axis.transpose();
  R_new.row(2) = z_axis.transpose();
  const Mat3 K_new = left.intrinsics.as_matrix();
  return HomographyPair{
      K_new * R_new * left.pose.rotation.transpose() * left.intrinsics.inverse_matrix(),
      K_new * R_new * right.pose.rotation.transpose() * right.intrinsics.inverse_matrix()};
}

SyntheticPair generate(const RigConfig& cfg) {
  cfg.validate();
  const double magnitude =
      std::isnan(cfg.magnitude) ? default_magnitude(cfg.distortion) : cfg.magnitude;
  const double alpha = cfg.focal > 0.0 ? cfg.focal : default_focal(cfg.dims);
  const RigPerturbation pert = perturbation_for(cfg.distortion, magnitude);

  SyntheticPair out;
  GroundTruth& gt = out.truth;
  gt.distortion = cfg.distortion;
  gt.magnitude = magnitude;
  gt.left = make_camera(cfg, alpha, -cfg.baseline / 2.0, pert.left);
  gt.right = make_camera(cfg, alpha, cfg.baseline / 2.0, pert.right);
  gt.rectification = calibrated_rectification(gt.left, gt.right);
  gt.F = fundamental_from_homographies(gt.rectification.left, gt.rectification.right);
  gt.F /= gt.F.norm();

  std::mt19937_64 rng(cfg.seed);
  const int n_outliers =
      static_cast<int>(std::lround(cfg.outlier_fraction * cfg.n_points));
  const int n_inliers = cfg.n_points - n_outliers;

  struct Labeled {
    Correspondence pair;
    bool inlier;
    Vec3 world;
  };
  std::vector<Labeled> items;
  items.reserve(static_cast<std::size_t>(cfg.n_points));

  std::uniform_real_distribution<double> ux(-cfg.box_extent[0] / 2.0,
                                            cfg.box_extent[0] / 2.0);
  std::uniform_real_distribution<double> uy(-cfg.box_extent[1] / 2.0,
                                            cfg.box_extent[1] / 2.0);
  std::uniform_real_distribution<double> uz(cfg.box_depth - cfg.box_extent[2] / 2.0,
                                            cfg.box_depth + cfg.box_extent[2] / 2.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const long max_attempts = 2000L * std::max(n_inliers, 1);
  long attempts = 0;
  while (static_cast<int>(items.size()) < n_inliers && attempts < max_attempts) {
    ++attempts;
    const Vec3 X(ux(rng), uy(rng), uz(rng));
    const auto pl = visible_projection(gt.left, X, cfg.dims);
    if (!pl) continue;
    const auto pr = visible_projection(gt.right, X, cfg.dims);
    if (!pr) continue;
    Correspondence c{pl->x(), pl->y(), pr->x(), pr->y()};
    if (cfg.noise_sigma > 0.0) {
      c.ul += cfg.noise_sigma * noise(rng);
      c.vl += cfg.noise_sigma * noise(rng);
      c.ur += cfg.noise_sigma * noise(rng);
      c.vr += cfg.noise_sigma * noise(rng);
    }
    items.push_back({c, true, X});
  }
  if (items.size() < 8) {
    throw Error(ErrorCode::kTooFewVisiblePoints,
                "fewer than 8 points visible in both views");
  }

  const double min_outlier_distance =
      std::max(10.0 * cfg.noise_sigma, kMinOutlierDistance);
  std::uniform_real_distribution<double> uu(0.0, cfg.dims.width);
  std::uniform_real_distribution<double> uv(0.0, cfg.dims.height);
  for (int i = 0; i < n_outliers; ++i) {
    for (;;) {
      Correspondence c{uu(rng), uv(rng), uu(rng), uv(rng)};
      if (std::abs(sampson_residual(gt.F, c)) > min_outlier_distance) {
        items.push_back({c, false, Vec3::Zero()});
        break;
      }
    }
  }

  std::shuffle(items.begin(), items.end(), rng);
  out.matches.dims = cfg.dims;
  for (const auto& it : items) {
    out.matches.pairs.push_back(it.pair);
    gt.inlier_mask.push_back(it.inlier);
    gt.world_points.push_back(it.world);
  }
  return out;
}

std::vector<SuiteCase> make_suite(const RigDims& dims, std::uint64_t seed,
                                  const SuiteOptions& options) {
  const Distortion kinds[] = {Distortion::kXTrans,    Distortion::kYTrans,
                              Distortion::kZTrans,    Distortion::kXRot,
                              Distortion::kYRot,      Distortion::kZRot,
                              Distortion::kCompound1, Distortion::kCompound2};
  std::vector<SuiteCase> suite;
  std::uint64_t index = 0;
  for (Distortion d : kinds) {
    RigConfig cfg;
    cfg.dims = dims;
    cfg.distortion = d;
    cfg.n_points = options.n_points;
    cfg.noise_sigma = options.noise_sigma;
    cfg.outlier_fraction = options.outlier_fraction;
    cfg.seed = case_seed(seed, index++);
    SyntheticPair pair = generate(cfg);
    suite.push_back({std::string(to_string(d)), std::move(pair.matches),
                     std::move(pair.truth)});
  }
  std::sort(suite.begin(), suite.end(),
            [](const SuiteCase& a, const SuiteCase& b) { return a.name < b.name; });
  return suite;
}

}  // namespace stereorect
