#include "stereorect/optimizer.h"

#include <cmath>
#include <limits>
#include <string>

#include "stereorect/error.h"

namespace stereorect {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int active_terms(const Weights& w) {
  return (w.aspect_ratio > 0.0) + (w.skewness > 0.0) + (w.rotation > 0.0) +
         (w.size_ratio > 0.0);
}

RoundRecord evaluate_round(int round, const InnerSolveResult& inner,
                           const Weights& solve_weights,
                           const CorrespondenceSet& c, const SolverConfig& cfg) {
  RoundRecord rec;
  rec.round = round;
  rec.params = inner.params;
  rec.solve_weights = solve_weights;
  rec.inner_iterations = inner.summary.iterations;
  rec.inner_termination = inner.summary.termination;
  const HomographyPair H = homographies(inner.params, c.dims);
  rec.report = full_report(H.left, H.right, c);
  rec.vertical_disparity = rec.report.vertical_disparity;
  if (cfg.mode == SolverMode::kUsrCgd) {
    rec.weights = update_weights(rec.report, cfg.thresholds);
  }
  rec.cost = cost_from_report(rec.report, rec.weights);
  rec.normalized_cost = normalized_cost(rec.cost, rec.weights);
  return rec;
}

}  // namespace

void Thresholds::validate() const {
  if (!(ar_min > 0.0 && ar_min <= ar_max) || !(sr_min > 0.0 && sr_min <= sr_max) ||
      !(sk_max > 0.0) || !(r_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid distortion thresholds");
  }
}

std::string_view to_string(SolverMode mode) {
  return mode == SolverMode::kUsr ? "usr" : "usr-cgd";
}

SolverMode parse_solver_mode(std::string_view text) {
  if (text == "usr") return SolverMode::kUsr;
  if (text == "usr-cgd") return SolverMode::kUsrCgd;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mode '" + std::string(text) + "' (expected usr|usr-cgd)");
}

void SolverConfig::validate() const {
  const auto& t = inner;
  if (max_outer_iters < 1 || !(t.initial_radius > 0.0) || t.max_iterations < 1 ||
      !(t.gradient_tolerance > 0.0) || !(t.step_tolerance > 0.0) ||
      !(t.relative_fd_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid solver configuration");
  }
  thresholds.validate();
}

std::string_view to_string(OuterTermination t) {
  switch (t) {
    case OuterTermination::kUsrMode: return "usr_mode";
    case OuterTermination::kNoActiveWeights: return "no_active_weights";
    case OuterTermination::kCostNotDecreased: return "cost_not_decreased";
    case OuterTermination::kMaxOuterIterations: return "max_outer_iterations";
    case OuterTermination::kRoundFailed: return "round_failed";
  }
  return "unknown";
}

Deviations deviations(const DistortionReport& r) {
  auto avg = [](double a, double b) { return 0.5 * (a + b); };
  Deviations d;
  d.aspect_ratio = avg(std::abs(r.left.modified_aspect_ratio - 1.0),
                       std::abs(r.right.modified_aspect_ratio - 1.0));
  d.skewness = avg(r.left.skewness, r.right.skewness);
  d.rotation = avg(std::abs(r.left.rotation), std::abs(r.right.rotation));
  d.size_ratio = avg(std::abs(r.left.size_ratio - 1.0),
                     std::abs(r.right.size_ratio - 1.0));
  return d;
}

double cost_from_report(const DistortionReport& report, const Weights& w) {
  const Deviations d = deviations(report);
  return report.sampson +
         w.aspect_ratio / Normalizers::kAspectRatio * d.aspect_ratio +
         w.skewness / Normalizers::kSkewness * d.skewness +
         w.rotation / Normalizers::kRotation * d.rotation +
         w.size_ratio / Normalizers::kSizeRatio * d.size_ratio;
}

double cost(const RectParams& params, const CorrespondenceSet& c,
            const Weights& w) {
  const HomographyPair H = homographies(params, c.dims);
  return cost_from_report(full_report(H.left, H.right, c), w);
}

double normalized_cost(double C, const Weights& w) { return C / (1.0 + w.sum()); }

Weights update_weights(const DistortionReport& report, const Thresholds& th) {
  const SideDistortion& m = report.mean;
  Weights w;
  if (m.modified_aspect_ratio < th.ar_min || m.modified_aspect_ratio > th.ar_max) {
    w.aspect_ratio = kActiveWeight;
  }
  if (m.skewness > th.sk_max) w.skewness = kActiveWeight;
  if (std::abs(m.rotation) > th.r_max) w.rotation = kActiveWeight;
  if (m.size_ratio < th.sr_min || m.size_ratio > th.sr_max) {
    w.size_ratio = kActiveWeight;
  }
  return w;
}

Eigen::VectorXd rectification_residuals(const RectParams& params,
                                        const CorrespondenceSet& c,
                                        const Weights& w) {
  const Eigen::Index n = static_cast<Eigen::Index>(c.pairs.size());
  Eigen::VectorXd r(n + 2 * active_terms(w));
  try {
    const HomographyPair H = homographies(params, c.dims);
    const Mat3 F = fundamental_from_homographies(H.left, H.right);
    for (Eigen::Index j = 0; j < n; ++j) {
      r(j) = sampson_residual(F, c.pairs[static_cast<std::size_t>(j)]);
    }
    Eigen::Index k = n;
    for (const Mat3* side : {&H.left, &H.right}) {
      const Mat3& Hs = *side;
      if (w.aspect_ratio > 0.0) {
        r(k++) = std::sqrt(w.aspect_ratio / Normalizers::kAspectRatio) *
                 (aspect_ratio_modified(Hs, c.dims) - 1.0);
      }
      if (w.skewness > 0.0) {
        r(k++) = std::sqrt(w.skewness / Normalizers::kSkewness) *
                 skewness(Hs, c.dims);
      }
      if (w.rotation > 0.0) {
        r(k++) = std::sqrt(w.rotation / Normalizers::kRotation) *
                 signed_rotation_measure(Hs, c.dims);
      }
      if (w.size_ratio > 0.0) {
        r(k++) = std::sqrt(w.size_ratio / Normalizers::kSizeRatio) *
                 (size_ratio(Hs, c.dims) - 1.0);
      }
    }
  } catch (const Error&) {
    r.setConstant(kNaN);
  }
  return r;
}

InnerSolveResult solve_inner_detailed(const CorrespondenceSet& c,
                                      const Weights& w, const RectParams& init,
                                      const SolverConfig& cfg) {
  c.validate();
  if (c.pairs.size() < 8) {
    throw Error(ErrorCode::kInsufficientInliers,
                "rectification needs at least 8 correspondences");
  }
  auto residuals = [&](const Eigen::VectorXd& x) {
    return rectification_residuals(RectParams::from_vector(x), c, w);
  };
  TrustRegionSummary summary =
      minimize_least_squares(residuals, init.to_vector(), cfg.inner);
  return InnerSolveResult{RectParams::from_vector(summary.x), std::move(summary)};
}

RectParams solve_inner(const CorrespondenceSet& c, const Weights& w,
                       const RectParams& init, const SolverConfig& cfg) {
  return solve_inner_detailed(c, w, init, cfg).params;
}

SolveResult solve(const CorrespondenceSet& c, const SolverConfig& cfg) {
  cfg.validate();
  SolveTrace trace;
  auto note_inner = [&trace](const InnerSolveResult& inner, int round) {
    if (inner.summary.termination == TrustRegionTermination::kMaxIterations) {
      trace.warnings.push_back("round " + std::to_string(round) +
                               ": inner solver hit its iteration limit");
    }
  };

  const Weights none;
  InnerSolveResult first = solve_inner_detailed(c, none, RectParams{}, cfg);
  note_inner(first, 0);
  trace.rounds.push_back(evaluate_round(0, first, none, c, cfg));

  if (cfg.mode == SolverMode::kUsr) {
    trace.termination = OuterTermination::kUsrMode;
  } else {
    trace.termination = OuterTermination::kMaxOuterIterations;
    for (int round = 1; round < cfg.max_outer_iters; ++round) {
      const RoundRecord& prev = trace.rounds.back();
      // Re-solving the problem prev was already optimized for is a no-op.
      if (!prev.weights.any() && prev.weights == prev.solve_weights) {
        trace.termination = OuterTermination::kNoActiveWeights;
        break;
      }
      const Weights w = prev.weights;
      RoundRecord rec;
      try {
        InnerSolveResult inner = solve_inner_detailed(c, w, prev.params, cfg);
        note_inner(inner, round);
        rec = evaluate_round(round, inner, w, c, cfg);
      } catch (const Error& e) {
        trace.warnings.push_back("round " + std::to_string(round) + " failed: " +
                                 e.what());
        trace.termination = OuterTermination::kRoundFailed;
        break;
      }
      if (rec.normalized_cost < prev.normalized_cost) {
        trace.rounds.push_back(std::move(rec));
      } else {
        trace.rejected = std::move(rec);
        trace.termination = OuterTermination::kCostNotDecreased;
        break;
      }
    }
  }

  SolveResult result;
  const RoundRecord& best = trace.rounds.back();
  result.params = best.params;
  result.homographies = homographies(best.params, c.dims);
  result.report = best.report;
  Diagnostics diag;
  homographies(best.params, c.dims, &diag);
  for (auto& w : diag.warnings) trace.warnings.push_back(std::move(w));
  result.trace = std::move(trace);
  return result;
}

}  // namespace stereorect
