// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "stereorect/error.h"
#include "stereorect/imaging.h"
#include "stereorect/matching.h"
#include "stereorect/metrics.h"
#include "stereorect/optimizer.h"
#include "stereorect/synthgen.h"

namespace sr = stereorect;

namespace {

using Clock = std::chrono::steady_clock;
using sr::Mat3;
using sr::Vec2;
constexpr double kRad2Deg = 180.0 / std::numbers::pi;
const sr::RigDims kDims{1920.0, 1080.0};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

struct Outcome {
  bool pass = true;
  int checks = 0;
  std::string failure;
  std::string summary;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok && pass) failure = what;
    pass = pass && ok;
  }
  void near(double got, double want, double tol, const std::string& what) {
    check(std::abs(got - want) <= tol,
          format("%s: got %.15g, want %.15g", what.c_str(), got, want));
  }
};

// ---------------------------------------------------------------------------
// Shared fixtures

Mat3 rigid(double theta, double cx, double cy) {
  Mat3 T1 = Mat3::Identity(), R = Mat3::Identity(), T2 = Mat3::Identity();
  T1(0, 2) = -cx;
  T1(1, 2) = -cy;
  R << std::cos(theta), -std::sin(theta), 0, std::sin(theta), std::cos(theta), 0, 0, 0, 1;
  T2(0, 2) = cx;
  T2(1, 2) = cy;
  return T2 * R * T1;
}

Mat3 scale_about(double s, double cx, double cy) {
  Mat3 H = Mat3::Identity();
  H(0, 0) = H(1, 1) = s;
  H(0, 2) = cx * (1 - s);
  H(1, 2) = cy * (1 - s);
  return H;
}

sr::SolverConfig solver_config(sr::SolverMode mode) {
  sr::SolverConfig cfg;
  cfg.mode = mode;
  return cfg;
}

struct RunStats {
  double e_v = 0.0;
  sr::SideDistortion mean, left, right;
};

// RANSAC with the given seed, then the full solve; metrics averaged over seeds.
RunStats averaged_solve(const sr::CorrespondenceSet& matches, sr::SolverMode mode,
                        int n_seeds) {
  RunStats s;
  const auto add = [n_seeds](sr::SideDistortion& acc, const sr::SideDistortion& d) {
    acc.orthogonality += d.orthogonality / n_seeds;
    acc.aspect_ratio += d.aspect_ratio / n_seeds;
    acc.modified_aspect_ratio += d.modified_aspect_ratio / n_seeds;
    acc.skewness += d.skewness / n_seeds;
    acc.rotation += d.rotation / n_seeds;
    acc.size_ratio += d.size_ratio / n_seeds;
  };
  s.mean = s.left = s.right = sr::SideDistortion{0, 0, 0, 0, 0, 0};
  for (int seed = 0; seed < n_seeds; ++seed) {
    sr::RansacConfig rc;
    rc.seed = static_cast<std::uint64_t>(seed);
    const sr::RansacResult ransac = sr::ransac_filter(matches, rc);
    const sr::SolveResult r = sr::solve(ransac.inliers, solver_config(mode));
    s.e_v += r.report.vertical_disparity / n_seeds;
    add(s.mean, r.report.mean);
    add(s.left, r.report.left);
    add(s.right, r.report.right);
  }
  return s;
}

bool within_bands(const sr::SideDistortion& d, const sr::Thresholds& th) {
  return d.skewness <= th.sk_max && d.modified_aspect_ratio >= th.ar_min &&
         d.modified_aspect_ratio <= th.ar_max && std::abs(d.rotation) <= th.r_max &&
         d.size_ratio >= th.sr_min && d.size_ratio <= th.sr_max;
}

const sr::SuiteCase& find_case(const std::vector<sr::SuiteCase>& suite, const std::string& name) {
  for (const auto& c : suite) {
    if (c.name == name) return c;
  }
  throw sr::Error(sr::ErrorCode::kInvalidArgument, "no suite case " + name);
}

const std::vector<sr::Distortion> kSingles = {
    sr::Distortion::kXTrans, sr::Distortion::kYTrans, sr::Distortion::kZTrans,
    sr::Distortion::kXRot,   sr::Distortion::kYRot,   sr::Distortion::kZRot};

constexpr std::uint64_t kSuiteSeed = 2024;

// ---------------------------------------------------------------------------
// Criteria

Outcome metric_units() {
  Outcome o;
  const auto t0 = Clock::now();
  const sr::RigDims square{100.0, 100.0};
  constexpr double tol = 1e-9;

  for (const sr::RigDims& d : {square, kDims}) {
    const sr::SideDistortion s = sr::side_distortion(Mat3::Identity(), d);
    o.near(s.orthogonality, 90.0, tol, "identity E_O");
    o.near(s.aspect_ratio, 1.0, tol, "identity E_A");
    o.near(s.modified_aspect_ratio, 1.0, tol, "identity E_AR");
    o.near(s.skewness, 0.0, tol, "identity E_Sk");
    o.near(s.rotation, 0.0, tol, "identity E_R");
    o.near(s.size_ratio, 1.0, tol, "identity E_SR");
  }

  for (double deg : {10.0, -25.0, 73.0}) {
    const Mat3 R = rigid(deg / kRad2Deg, 960, 540);
    const sr::SideDistortion s = sr::side_distortion(R, kDims);
    o.near(s.orthogonality, 90.0, tol, "rotation E_O");
    o.near(s.aspect_ratio, 1.0, tol, "rotation E_A");
    o.near(s.modified_aspect_ratio, 1.0, tol, "rotation E_AR");
    o.near(s.skewness, 0.0, tol, "rotation E_Sk");
    o.near(s.rotation, std::abs(deg), tol, "rotation E_R");
    o.near(s.size_ratio, 1.0, tol, "rotation E_SR");
  }

  for (double k : {0.5, 1.3, 2.0}) {
    const sr::SideDistortion s = sr::side_distortion(scale_about(k, 960, 540), kDims);
    o.near(s.size_ratio, k * k, tol, "scale E_SR");
    o.near(s.modified_aspect_ratio, 1.0, tol, "scale E_AR");
    o.near(s.orthogonality, 90.0, tol, "scale E_O");
    o.near(s.rotation, 0.0, tol, "scale E_R");
  }
  o.near(sr::aspect_ratio_legacy(sr::Vec3(2, 1, 1).asDiagonal(), square), 1.0, tol,
         "diag(2,1,1) E_A");
  o.near(sr::aspect_ratio_modified(sr::Vec3(1, 2, 1).asDiagonal(), square), 1.0, tol,
         "diag(1,2,1) E_AR");
  Mat3 shift = Mat3::Identity();
  shift(1, 2) = 12.0;
  o.near(sr::aspect_ratio_modified(shift, square), 1.0, tol, "vertical shift E_AR");

  Mat3 shear = Mat3::Identity();
  shear(0, 1) = 0.5;
  o.near(sr::orthogonality(shear, square), 90.0 - std::atan(0.5) * kRad2Deg, tol,
         "shear E_O");
  o.near(sr::skewness(shear, square), std::atan(0.5) * kRad2Deg, tol, "shear E_Sk");
  o.near(sr::aspect_ratio_legacy(shear, square), std::sqrt(12500.0 / 32500.0), tol,
         "shear E_A");
  Mat3 vshear = Mat3::Identity();
  vshear(1, 0) = 0.2;
  o.near(sr::rotation_measure(vshear, kDims), std::atan(0.2) * kRad2Deg, tol, "shear E_R");

  // Averaged report is the mean of the two sides.
  sr::CorrespondenceSet c;
  c.dims = square;
  for (int i = 0; i < 8; ++i) c.pairs.push_back({10.0 * i, 5.0 * i, 10.0 * i + 2, 5.0 * i});
  const sr::DistortionReport r = sr::full_report(shear, Mat3::Identity(), c);
  o.near(r.mean.skewness, 0.5 * std::atan(0.5) * kRad2Deg, tol, "report mean E_Sk");
  o.near(r.left.orthogonality, sr::orthogonality(shear, square), tol, "report left E_O");

  const double elapsed = seconds_since(t0);
  o.check(elapsed < 1.0, format("runtime %.3f s", elapsed));
  o.summary = format("%d checks, %.4f s", o.checks, elapsed);
  return o;
}

Outcome sampson_oracle() {
  Outcome o;
  const Mat3 Finf = sr::rectified_fundamental();
  sr::CorrespondenceSet one;
  one.dims = {100, 100};
  one.pairs.push_back({0.0, 0.0, 0.0, 1.0});
  const double single = sr::sampson_error(Finf, one);
  o.near(single, std::sqrt(0.5), 1e-12, "single pair under F_inf");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> entry(-1.0, 1.0), coord(0.0, 640.0),
      scale(-50.0, 50.0);
  sr::CorrespondenceSet c;
  c.dims = {640, 480};
  for (int j = 0; j < 40; ++j) c.pairs.push_back({coord(rng), coord(rng), coord(rng), coord(rng)});
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Mat3 F;
    for (int k = 0; k < 9; ++k) F(k / 3, k % 3) = entry(rng);
    double s = scale(rng);
    if (std::abs(s) < 1e-3) s = 1.0;
    const double a = sr::sampson_error(F, c);
    const double b = sr::sampson_error(s * F, c);
    worst = std::max(worst, std::abs(a - b));
    o.near(b, a, 1e-10, format("scale invariance, F #%d", i));
  }
  o.summary = format("E_s = %.15f, worst scale drift %.2e over 100 F", single, worst);
  return o;
}

Outcome identifiability() {
  Outcome o;
  double worst_clean = 0.0, worst_noisy = 0.0, slowest = 0.0;
  for (sr::Distortion d : kSingles) {
    sr::RigConfig cfg;
    cfg.distortion = d;
    cfg.seed = kSuiteSeed;
    const std::string name(sr::to_string(d));

    auto t0 = Clock::now();
    const sr::SyntheticPair clean = sr::generate(cfg);
    const sr::SolveResult rc = sr::solve(clean.matches, solver_config(sr::SolverMode::kUsr));
    double t = seconds_since(t0);
    slowest = std::max(slowest, t);
    worst_clean = std::max(worst_clean, rc.report.vertical_disparity);
    o.check(rc.report.vertical_disparity < 1e-3,
            format("%s noiseless E_v %.3g", name.c_str(), rc.report.vertical_disparity));
    o.check(t < 10.0, format("%s noiseless runtime %.2f s", name.c_str(), t));

    cfg.noise_sigma = 0.3;
    cfg.outlier_fraction = 0.1;
    t0 = Clock::now();
    const sr::SyntheticPair noisy = sr::generate(cfg);
    const sr::RansacResult ransac = sr::ransac_filter(noisy.matches, sr::RansacConfig{});
    const sr::SolveResult rn = sr::solve(ransac.inliers, solver_config(sr::SolverMode::kUsr));
    t = seconds_since(t0);
    slowest = std::max(slowest, t);
    worst_noisy = std::max(worst_noisy, rn.report.vertical_disparity);
    o.check(rn.report.vertical_disparity <= 0.5,
            format("%s noisy E_v %.4f", name.c_str(), rn.report.vertical_disparity));
    o.check(t < 10.0, format("%s noisy runtime %.2f s", name.c_str(), t));
  }
  o.summary = format("worst E_v %.2e px noiseless, %.4f px at sigma 0.3; slowest case %.3f s",
                     worst_clean, worst_noisy, slowest);
  return o;
}

struct CompoundRun {
  double cgd_mean_e_v = 0.0;
  std::vector<RunStats> cgd, usr;
};

CompoundRun run_compounds(int n_points) {
  const auto suite = sr::make_suite(kDims, kSuiteSeed, sr::SuiteOptions{n_points, 0.3, 0.1});
  CompoundRun run;
  for (const char* name : {"compound1", "compound2"}) {
    const sr::SuiteCase& sc = find_case(suite, name);
    run.cgd.push_back(averaged_solve(sc.matches, sr::SolverMode::kUsrCgd, 3));
    run.usr.push_back(averaged_solve(sc.matches, sr::SolverMode::kUsr, 3));
    run.cgd_mean_e_v += run.cgd.back().e_v / 2.0;
  }
  return run;
}

Outcome compound_analog(const CompoundRun& run) {
  Outcome o;
  const sr::Thresholds th;
  std::string detail;
  bool usr_violates = false;
  const char* names[] = {"compound1", "compound2"};
  for (std::size_t i = 0; i < run.cgd.size(); ++i) {
    const RunStats& c = run.cgd[i];
    const RunStats& u = run.usr[i];
    o.check(within_bands(c.mean, th), format("%s USR-CGD averaged measures outside bands", names[i]));
    if (!within_bands(c.left, th) || !within_bands(c.right, th)) {
      detail += format("%s single view outside a band (E_SR %.3f/%.3f, E_AR %.3f/%.3f); ",
                       names[i], c.left.size_ratio, c.right.size_ratio,
                       c.left.modified_aspect_ratio, c.right.modified_aspect_ratio);
    }
    o.check(u.e_v <= c.e_v, format("%s USR E_v %.6f > USR-CGD %.6f", names[i], u.e_v, c.e_v));
    usr_violates = usr_violates || !within_bands(u.mean, th);
    detail += format("%s: E_v %.4f, E_Sk %.2f, E_AR %.3f, E_R %.2f, E_SR %.3f (USR E_v %.4f, E_Sk %.2f); ",
                     names[i], c.e_v, c.mean.skewness, c.mean.modified_aspect_ratio,
                     c.mean.rotation, c.mean.size_ratio, u.e_v, u.mean.skewness);
  }
  o.check(run.cgd_mean_e_v <= 0.75, format("mean E_v %.4f", run.cgd_mean_e_v));
  o.summary = detail + format("mean E_v %.4f; USR %s bands", run.cgd_mean_e_v,
                              usr_violates ? "violates" : "stays within all");
  return o;
}

Outcome count_robustness(const CompoundRun& full, const CompoundRun& reduced) {
  Outcome o;
  const double delta = std::abs(reduced.cgd_mean_e_v - full.cgd_mean_e_v);
  o.check(delta <= 0.3, format("|delta E_v| %.4f", delta));
  o.summary = format("mean E_v %.4f (300 pairs) vs %.4f (100 pairs), delta %.4f",
                     full.cgd_mean_e_v, reduced.cgd_mean_e_v, delta);
  return o;
}

Outcome ransac_outliers() {
  Outcome o;
  double worst_recall = 1.0;
  int kept_outliers = 0;
  const std::vector<sr::Distortion> kinds = {
      sr::Distortion::kNone, sr::Distortion::kXTrans, sr::Distortion::kYTrans,
      sr::Distortion::kZTrans, sr::Distortion::kXRot, sr::Distortion::kYRot,
      sr::Distortion::kZRot, sr::Distortion::kCompound1, sr::Distortion::kCompound2};
  for (sr::Distortion d : kinds) {
    sr::RigConfig cfg;
    cfg.distortion = d;
    cfg.noise_sigma = 0.3;
    cfg.outlier_fraction = 0.2;
    cfg.seed = kSuiteSeed + 1;
    const sr::SyntheticPair s = sr::generate(cfg);
    sr::RansacConfig rc;
    rc.seed = 7;
    rc.inlier_threshold = 1.5;
    const sr::RansacResult a = sr::ransac_filter(s.matches, rc);
    const sr::RansacResult b = sr::ransac_filter(s.matches, rc);
    std::size_t true_inliers = 0, recalled = 0, outliers = 0;
    for (bool in : s.truth.inlier_mask) true_inliers += in;
    for (std::size_t idx : a.inlier_indices) {
      if (s.truth.inlier_mask[idx]) {
        ++recalled;
      } else {
        ++outliers;
      }
    }
    const double recall = static_cast<double>(recalled) / true_inliers;
    worst_recall = std::min(worst_recall, recall);
    kept_outliers += static_cast<int>(outliers);
    const std::string name(sr::to_string(d));
    o.check(recall >= 0.95, format("%s recall %.4f", name.c_str(), recall));
    o.check(outliers == 0, format("%s kept %zu outliers", name.c_str(), outliers));
    o.check(a.inlier_indices == b.inlier_indices && a.F == b.F,
            format("%s not deterministic", name.c_str()));
  }
  o.summary = format("9 rigs at 20%% outliers: worst recall %.4f, %d outliers kept, reruns identical",
                     worst_recall, kept_outliers);
  return o;
}

Outcome optimizer_properties() {
  Outcome o;
  const auto suite = sr::make_suite(kDims, kSuiteSeed);
  const sr::RansacResult ransac =
      sr::ransac_filter(find_case(suite, "compound2").matches, sr::RansacConfig{});
  const sr::CorrespondenceSet& inliers = ransac.inliers;

  // Inner solver from random starts with every term active.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-0.2, 0.2), ty(-0.05, 0.05), df(-0.4, 0.4);
  const sr::Weights all{sr::kActiveWeight, sr::kActiveWeight, sr::kActiveWeight,
                        sr::kActiveWeight};
  const sr::SolverConfig cfg = solver_config(sr::SolverMode::kUsrCgd);
  int steps = 0;
  for (int start = 0; start < 20; ++start) {
    Eigen::VectorXd x(9);
    for (int i = 0; i < 5; ++i) x(i) = ang(rng);
    x(5) = ty(rng);
    x(6) = ty(rng);
    x(7) = df(rng);
    x(8) = df(rng);
    const sr::Weights w = start % 2 == 0 ? all : sr::Weights{};
    const sr::InnerSolveResult r =
        sr::solve_inner_detailed(inliers, w, sr::RectParams::from_vector(x), cfg);
    const auto& h = r.summary.objective_history;
    o.check(h.size() >= 2, format("start %d made no accepted step", start));
    for (std::size_t k = 1; k < h.size(); ++k) {
      o.check(h[k] <= h[k - 1], format("start %d objective rose at step %zu", start, k));
    }
    steps += static_cast<int>(h.size()) - 1;
  }

  // Outer loop over all suite cases and several threshold sets.
  const std::vector<sr::Thresholds> bands = {
      sr::Thresholds{},
      sr::Thresholds{0.95, 1.05, 1.0, 0.95, 1.05, 2.0},
      sr::Thresholds{0.99, 1.01, 0.2, 0.99, 1.01, 0.5},
      sr::Thresholds{0.999, 1.001, 0.05, 0.999, 1.001, 0.1},
  };
  int runs = 0, multi_round = 0, penultimate = 0;
  for (const sr::SuiteCase& sc : suite) {
    const sr::RansacResult rs = sr::ransac_filter(sc.matches, sr::RansacConfig{});
    for (const sr::Thresholds& th : bands) {
      sr::SolverConfig oc = cfg;
      oc.thresholds = th;
      const sr::SolveResult r = sr::solve(rs.inliers, oc);
      const auto& rounds = r.trace.rounds;
      ++runs;
      multi_round += rounds.size() > 1;
      const std::string tag = sc.name + format(" sk_max %.2f", th.sk_max);
      for (std::size_t k = 1; k < rounds.size(); ++k) {
        o.check(rounds[k].normalized_cost < rounds[k - 1].normalized_cost,
                tag + format(" round %zu did not strictly decrease", k));
      }
      o.check(r.params.to_vector() == rounds.back().params.to_vector(),
              tag + " result is not the last accepted round");
      if (r.trace.termination == sr::OuterTermination::kCostNotDecreased) {
        ++penultimate;
        o.check(r.trace.rejected.has_value(), tag + " missing rejected round");
        if (r.trace.rejected) {
          o.check(r.trace.rejected->normalized_cost >= rounds.back().normalized_cost,
                  tag + " rejected round actually decreased");
          o.check(r.trace.rejected->round == rounds.back().round + 1,
                  tag + " rejected round does not follow the returned one");
        }
      }
    }
  }
  o.check(penultimate > 0, "no run stopped on a non-decrease; rule not exercised");
  o.summary = format("20 inner starts, %d accepted steps, all non-increasing; %d outer runs, "
                     "%d multi-round, %d stopped on non-decrease returning the prior round",
                     steps, runs, multi_round, penultimate);
  return o;
}

Outcome gradient_check() {
  Outcome o;
  const auto suite = sr::make_suite(kDims, kSuiteSeed);
  const sr::RansacResult ransac =
      sr::ransac_filter(find_case(suite, "compound2").matches, sr::RansacConfig{});
  const sr::CorrespondenceSet& c = ransac.inliers;
  const sr::Weights w{sr::kActiveWeight, sr::kActiveWeight, sr::kActiveWeight,
                      sr::kActiveWeight};
  const double fd_rel = sr::TrustRegionOptions{}.relative_fd_step;
  const auto C = [&](const Eigen::VectorXd& x) {
    return sr::cost(sr::RectParams::from_vector(x), c, w);
  };

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ang(-0.15, 0.15), ty(-0.03, 0.03), df(-0.3, 0.3);
  std::normal_distribution<double> gauss;
  constexpr double h = 1e-4;
  double worst = 0.0;
  int points = 0;
  while (points < 10) {
    Eigen::VectorXd x(9);
    for (int i = 0; i < 5; ++i) x(i) = ang(rng);
    x(5) = ty(rng);
    x(6) = ty(rng);
    x(7) = df(rng);
    x(8) = df(rng);
    double c0;
    try {
      c0 = C(x);
    } catch (const sr::Error&) {
      continue;
    }
    if (!std::isfinite(c0)) continue;
    ++points;

    Eigen::VectorXd g(9);
    for (int i = 0; i < 9; ++i) {
      const double step = fd_rel * std::max(1.0, std::abs(x(i)));
      Eigen::VectorXd xp = x;
      xp(i) += step;
      g(i) = (C(xp) - c0) / step;
    }

    // Coordinate axes plus three random unit directions.
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 0; i < 9; ++i) dirs.push_back(Eigen::VectorXd::Unit(9, i));
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd d(9);
      for (int i = 0; i < 9; ++i) d(i) = gauss(rng);
      dirs.push_back(d.normalized());
    }
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const Eigen::VectorXd& d = dirs[k];
      const double secant = (C(x + h * d) - C(x - h * d)) / (2.0 * h);
      const double directional = g.dot(d);
      const double rel = std::abs(secant - directional) /
                         std::max(std::abs(secant), std::abs(directional));
      worst = std::max(worst, rel);
      o.check(rel <= 1e-3, format("point %d direction %zu: secant %.9g vs gradient %.9g",
                                  points, k, secant, directional));
    }
  }
  o.summary = format("10 points x 12 directions, worst relative gap %.2e", worst);
  return o;
}

sr::RasterImage smooth_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  const double p0 = phase(rng), p1 = phase(rng), p2 = phase(rng);
  sr::RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y,
              {static_cast<std::uint8_t>(127.5 + 100 * std::sin(x * 0.05 + p0)),
               static_cast<std::uint8_t>(127.5 + 100 * std::cos(y * 0.07 + p1)),
               static_cast<std::uint8_t>(127.5 + 80 * std::sin((x + y) * 0.03 + p2))});
    }
  }
  return img;
}

Outcome warp_round_trip() {
  Outcome o;
  const int w = 320, h = 240;
  constexpr int kMargin = 2;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(-0.25, 0.25), sc(0.9, 1.2), sh(-0.1, 0.1),
      t(-20.0, 20.0), persp(-1e-4, 1e-4);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    Mat3 A;
    A << sc(rng), sh(rng), t(rng), sh(rng), sc(rng), t(rng), persp(rng), persp(rng), 1.0;
    const Mat3 H = rigid(ang(rng), w / 2.0, h / 2.0) * A;
    o.check(std::abs(H.determinant()) > 1e-6, format("H #%d not invertible", i));
    const sr::RasterImage img = smooth_image(w, h, static_cast<std::uint64_t>(i));
    const sr::FittedWarp fit = sr::auto_fit_bounds(H, w, h);
    const sr::RasterImage mid = sr::warp(img, fit.H, fit.width, fit.height);
    const sr::RasterImage back = sr::warp(mid, fit.H.inverse(), w, h);
    double sum = 0.0;
    long count = 0;
    for (int y = kMargin; y < h - kMargin; ++y) {
      for (int x = kMargin; x < w - kMargin; ++x) {
        for (int ch = 0; ch < 3; ++ch) sum += std::abs(back.at(x, y)[ch] - img.at(x, y)[ch]);
        count += 3;
      }
    }
    const double err = sum / count / 255.0;
    worst = std::max(worst, err);
    o.check(err < 2.0 / 255.0, format("H #%d mean abs error %.5f", i, err));
  }
  o.summary = format("5 homographies, worst interior mean abs error %.5f (bound %.5f)", worst,
                     2.0 / 255.0);
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  CompoundRun full, reduced;
  const std::vector<Entry> criteria = {
      {"metric unit suite", metric_units},
      {"Sampson oracle", sampson_oracle},
      {"synthetic identifiability", identifiability},
      {"compound distortion bands",
       [&] {
         full = run_compounds(300);
         return compound_analog(full);
       }},
      {"correspondence-count robustness",
       [&] {
         reduced = run_compounds(100);
         return count_robustness(full, reduced);
       }},
      {"RANSAC outlier rejection", ransac_outliers},
      {"optimizer monotonicity", optimizer_properties},
      {"cost gradient check", gradient_check},
      {"warp round trip", warp_round_trip},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failure = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.summary.c_str(), o.pass ? "" : " | first failure: ", o.failure.c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %zu criteria, %d failed\n", failed == 0 ? "PASS" : "FAIL", criteria.size(),
              failed);
  return failed == 0 ? 0 : 1;
}
