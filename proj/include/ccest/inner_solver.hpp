#pragma once

// Weighted penalized fits: argmin_beta (1/n) sum_i w_i s(u_i(beta)) + Lambda(beta)
// for fixed observation weights w_i >= 0.

#include <vector>

#include "ccest/data.hpp"
#include "ccest/loss.hpp"
#include "ccest/penalty.hpp"

namespace ccest {

struct InnerSettings {
  double tol = 0.0;  ///< 0 selects the per-family default
  int max_iter = 0;  ///< 0 selects the per-family default
  /// Record the objective after every coordinate sweep (gaussian only).
  bool record_trace = false;

  /// gaussian: 1e-7 / 1e4 sweeps; GLM: 1e-6 / 100 IRLS steps;
  /// piecewise: 1e-9 relative step / 5000 accelerated steps per smoothing stage.
  static InnerSettings defaults(ConvexKind kind);
  InnerSettings resolved(ConvexKind kind) const;

  bool operator==(const InnerSettings&) const = default;
};

struct InnerProblem {
  const Dataset& data;
  const Vector& weights;
  ConvexSpec convex;
  PenaltySpec penalty;
  Vector warm_start;
  InnerSettings settings;
};

struct InnerResult {
  Vector beta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Piecewise solver stopped at max_iter while still moving.
  bool warning = false;
  std::vector<double> trace;
};

/// (1/n) sum_i w_i z_i + Lambda(beta).
double inner_objective(const InnerProblem& problem, const Vector& beta);

/// Cyclic coordinate descent for gaussian / gaussianC.
InnerResult solve_weighted_gaussian(const InnerProblem& problem);
/// Penalized IRLS with step-halving for binomial / poisson.
InnerResult solve_weighted_glm(const InnerProblem& problem);
/// hinge / epsInsensitive: accelerated proximal gradient on a quadratically
/// smoothed loss, width shrunk from 0.1 to 1e-6; returns the best exact
/// objective seen (never worse than the warm start).
InnerResult solve_weighted_piecewise(const InnerProblem& problem);

/// Dispatches on the convex kind; validates weights and task compatibility.
InnerResult solve_weighted(const InnerProblem& problem);

}  // namespace ccest
