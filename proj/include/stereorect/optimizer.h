#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "stereorect/metrics.h"
#include "stereorect/rect_model.h"
#include "stereorect/trust_region.h"

namespace stereorect {

//! Value a distortion weight takes when its term is switched on.
inline constexpr double kActiveWeight = 0.25;

//! Value-range normalizers; an active term contributes (0.25 / N_X) * dev_X.
struct Normalizers {
  static constexpr double kAspectRatio = 1.5;
  static constexpr double kSkewness = 6.5;
  static constexpr double kRotation = 18.5;
  static constexpr double kSizeRatio = 2.5;
};

//! Switch values of the four distortion terms; each is 0 or kActiveWeight.
struct Weights {
  double aspect_ratio = 0.0;
  double skewness = 0.0;
  double rotation = 0.0;
  double size_ratio = 0.0;

  double sum() const { return aspect_ratio + skewness + rotation + size_ratio; }
  bool any() const { return sum() > 0.0; }
  bool operator==(const Weights&) const = default;
};

struct Thresholds {
  double ar_min = 0.8, ar_max = 1.2;
  double sk_max = 5.0;  // degrees
  double sr_min = 0.8, sr_max = 1.2;
  double r_max = 30.0;  // degrees

  void validate() const;
};

enum class SolverMode { kUsr, kUsrCgd };

std::string_view to_string(SolverMode mode);
//! Accepts "usr" and "usr-cgd". Throws kInvalidArgument.
SolverMode parse_solver_mode(std::string_view text);

struct SolverConfig {
  SolverMode mode = SolverMode::kUsrCgd;
  int max_outer_iters = 10;
  TrustRegionOptions inner;
  Thresholds thresholds;

  void validate() const;
};

//! Deviation of each measure from its ideal value, averaged over both views:
//! |E_AR - 1|, E_Sk, |E_R| and |E_SR - 1|.
struct Deviations {
  double aspect_ratio = 0.0;
  double skewness = 0.0;
  double rotation = 0.0;
  double size_ratio = 0.0;
};

Deviations deviations(const DistortionReport& report);

//! E_s + sum_X (rho_X / N_X) * dev_X, read off an existing report.
double cost_from_report(const DistortionReport& report, const Weights& w);

//! Rectifies with the model homographies of params and evaluates the cost.
double cost(const RectParams& params, const CorrespondenceSet& c,
            const Weights& w);

//! C / (1 + sum of switch values).
double normalized_cost(double C, const Weights& w);

//! A weight is switched on when its averaged measure leaves the admissible
//! band (aspect and size ratios) or exceeds its bound (skewness, |rotation|).
Weights update_weights(const DistortionReport& report, const Thresholds& th);

//! Residuals minimized by the inner solver: one signed Sampson distance per
//! pair, then sqrt(rho_X / N_X) * signed deviation per view for each active
//! term. Entries are NaN where the model cannot be evaluated.
Eigen::VectorXd rectification_residuals(const RectParams& params,
                                        const CorrespondenceSet& c,
                                        const Weights& w);

struct InnerSolveResult {
  RectParams params;
  TrustRegionSummary summary;
};

InnerSolveResult solve_inner_detailed(const CorrespondenceSet& c,
                                      const Weights& w, const RectParams& init,
                                      const SolverConfig& cfg);

//! Trust-region minimization of rectification_residuals from init.
RectParams solve_inner(const CorrespondenceSet& c, const Weights& w,
                       const RectParams& init, const SolverConfig& cfg);

struct RoundRecord {
  int round = 0;
  RectParams params;
  Weights solve_weights;  // weights the round was optimized with
  Weights weights;        // weights switched on by this round's result
  double cost = 0.0;
  double normalized_cost = 0.0;
  double vertical_disparity = 0.0;
  DistortionReport report;
  int inner_iterations = 0;
  TrustRegionTermination inner_termination = TrustRegionTermination::kMaxIterations;
};

enum class OuterTermination {
  kUsrMode,           // USR: a single Sampson-only round
  kNoActiveWeights,   // geometry inside every band, nothing left to enforce
  kCostNotDecreased,  // latest round did not improve; previous round returned
  kMaxOuterIterations,
  kRoundFailed,  // a re-weighted round could not be evaluated; previous returned
};

std::string_view to_string(OuterTermination t);

struct SolveTrace {
  //! Accepted rounds; normalized cost strictly decreases along them and the
  //! last entry is the returned solution.
  std::vector<RoundRecord> rounds;
  //! The round that failed to decrease the normalized cost, if any.
  std::optional<RoundRecord> rejected;
  OuterTermination termination = OuterTermination::kUsrMode;
  std::vector<std::string> warnings;
};

struct SolveResult {
  RectParams params;
  HomographyPair homographies;
  DistortionReport report;
  SolveTrace trace;
};

//! Full estimation from a zero start. USR runs only the Sampson-only round.
//! USR-CGD then re-optimizes with the distortion terms its latest result
//! violates, stopping as soon as the normalized cost fails to strictly
//! decrease. Only a failure of the first round propagates; later failures end
//! the loop with kRoundFailed.
SolveResult solve(const CorrespondenceSet& c, const SolverConfig& cfg);

}  // namespace stereorect
