#pragma once

#include <Eigen/Core>
#include <functional>
#include <string_view>
#include <vector>

namespace stereorect {

struct TrustRegionOptions {
  double initial_radius = 0.1;
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double step_tolerance = 1e-10;
  //! Forward-difference step, relative to max(1, |x_i|).
  double relative_fd_step = 1e-6;
};

enum class TrustRegionTermination {
  kGradientTolerance,
  kStepTolerance,
  kZeroResidual,
  kRadiusCollapsed,
  kMaxIterations,
};

std::string_view to_string(TrustRegionTermination t);

struct TrustRegionSummary {
  Eigen::VectorXd x;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  //! Objective after the start point and after each accepted step.
  std::vector<double> objective_history;
  TrustRegionTermination termination = TrustRegionTermination::kMaxIterations;
};

//! Residual callback. Returning any non-finite entry marks the point as
//! infeasible; the step is then rejected and the radius shrinks.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Eigen::MatrixXd forward_difference_jacobian(const ResidualFunction& f,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& fx,
                                            double relative_step);

//! Minimizes ||f(x)||^2 with a Levenberg-Marquardt trust-region iteration on a
//! forward-difference Jacobian. The objective never increases between
//! accepted iterates. Throws kNonFiniteResidual if f(x0) is not finite.
TrustRegionSummary minimize_least_squares(const ResidualFunction& f,
                                          const Eigen::VectorXd& x0,
                                          const TrustRegionOptions& options);

}  // namespace stereorect
