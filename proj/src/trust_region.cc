#include "stereorect/trust_region.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "stereorect/error.h"

namespace stereorect {
namespace {

// Relative decrease below which an accepted step counts as stagnation.
constexpr double kFunctionTolerance = 1e-15;

struct Subproblem {
  Eigen::MatrixXd V;
  Eigen::VectorXd eig;
  Eigen::VectorXd b;  // V^T g
  double cutoff = 0.0;

  Eigen::VectorXd step(double lambda) const {
    Eigen::VectorXd c(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double d = eig(i) + lambda;
      c(i) = (lambda == 0.0 && eig(i) <= cutoff) ? 0.0 : -b(i) / d;
    }
    return V * c;
  }
};

// Minimizer of the quadratic model inside the ball of the given radius.
Eigen::VectorXd trust_region_step(const Subproblem& sp, double radius) {
  Eigen::VectorXd gn = sp.step(0.0);
  if (gn.norm() <= radius) return gn;
  double lo = 0.0;
  double hi = std::max(sp.b.norm() / radius, 1e-300);
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sp.step(mid).norm() > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return sp.step(hi);
}

}  // namespace

std::string_view to_string(TrustRegionTermination t) {
  switch (t) {
    case TrustRegionTermination::kGradientTolerance: return "gradient_tolerance";
    case TrustRegionTermination::kStepTolerance: return "step_tolerance";
    case TrustRegionTermination::kZeroResidual: return "zero_residual";
    case TrustRegionTermination::kRadiusCollapsed: return "radius_collapsed";
    case TrustRegionTermination::kMaxIterations: return "max_iterations";
  }
  return "unknown";
}

Eigen::MatrixXd forward_difference_jacobian(const ResidualFunction& f,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& fx,
                                            double relative_step) {
  Eigen::MatrixXd J(fx.size(), x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = relative_step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const double actual_h = xp(i) - x(i);
    const Eigen::VectorXd fp = f(xp);
    if (fp.size() != fx.size()) {
      throw Error(ErrorCode::kNonFiniteResidual, "residual size changed");
    }
    J.col(i) = (fp - fx) / actual_h;
    xp(i) = x(i);
  }
  return J;
}

TrustRegionSummary minimize_least_squares(const ResidualFunction& f,
                                          const Eigen::VectorXd& x0,
                                          const TrustRegionOptions& options) {
  TrustRegionSummary summary;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = f(x);
  if (!r.allFinite()) {
    throw Error(ErrorCode::kNonFiniteResidual, "residual at start point");
  }
  double cost = r.squaredNorm();
  summary.initial_objective = cost;
  summary.objective_history.push_back(cost);

  double radius = options.initial_radius;
  bool need_jacobian = true;
  Eigen::MatrixXd J;
  Eigen::VectorXd g;
  Subproblem sp;

  int iter = 0;
  bool stopped = true;
  for (;; ++iter) {
    if (iter >= options.max_iterations) {
      stopped = false;
      break;
    }
    if (cost < 1e-30) {
      summary.termination = TrustRegionTermination::kZeroResidual;
      break;
    }
    if (need_jacobian) {
      J = forward_difference_jacobian(f, x, r, options.relative_fd_step);
      if (!J.allFinite()) {
        // A probe left the feasible region; treat the point as stationary.
        summary.termination = TrustRegionTermination::kRadiusCollapsed;
        break;
      }
      g = J.transpose() * r;
      if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
        summary.termination = TrustRegionTermination::kGradientTolerance;
        break;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.transpose() * J);
      sp.V = es.eigenvectors();
      sp.eig = es.eigenvalues().cwiseMax(0.0);
      sp.b = sp.V.transpose() * g;
      sp.cutoff = 1e-14 * std::max(sp.eig.maxCoeff(), 1e-300);
      need_jacobian = false;
    }

    const Eigen::VectorXd step = trust_region_step(sp, radius);
    const double step_norm = step.norm();
    if (step_norm <= options.step_tolerance * (x.norm() + options.step_tolerance)) {
      summary.termination = TrustRegionTermination::kStepTolerance;
      break;
    }

    const Eigen::VectorXd x_new = x + step;
    const Eigen::VectorXd r_new = f(x_new);
    const double cost_new =
        r_new.allFinite() ? r_new.squaredNorm()
                          : std::numeric_limits<double>::infinity();
    const double predicted = -(2.0 * g.dot(step) + (J * step).squaredNorm());
    const double actual = cost - cost_new;
    const double ratio = predicted > 0.0 ? actual / predicted : -1.0;

    if (ratio < 0.25) {
      radius = 0.25 * step_norm;
    } else if (ratio > 0.75 && step_norm > 0.99 * radius) {
      radius = 2.0 * radius;
    }

    if (actual > 0.0 && ratio > 1e-4) {
      x = x_new;
      r = r_new;
      cost = cost_new;
      summary.objective_history.push_back(cost);
      need_jacobian = true;
      if (actual < kFunctionTolerance * cost && predicted < kFunctionTolerance * cost) {
        summary.termination = TrustRegionTermination::kStepTolerance;
        ++iter;
        break;
      }
    }
    if (radius < 1e-16) {
      summary.termination = TrustRegionTermination::kRadiusCollapsed;
      ++iter;
      break;
    }
  }
  if (!stopped) summary.termination = TrustRegionTermination::kMaxIterations;
  summary.x = x;
  summary.final_objective = cost;
  summary.iterations = iter;
  return summary;
}

}  // namespace stereorect
