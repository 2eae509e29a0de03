#pragma once

// Outer estimation loops. Each iteration forms z_i = s(u_i(beta)), turns the
// z_i into dual weights v_i <= 0 and solves the weighted problem with
// weights -v_i warm-started at the current beta:
//   coco    v_i in d(-g)(z_i)
//   cocots  v_i = -1 if z_i <= sigma else 0          (tcave only)
//   cocotv  v_i = -1 for the h smallest z_i else 0   (ties: lowest index)
//
// The objective F(beta) = (1/n) sum g(z_i) + Lambda(beta) is nonincreasing
// along coco iterates. cocotv tracks the trimmed objective
// (1/n) sum_{h smallest} z_i + Lambda(beta) instead.

#include <optional>
#include <string_view>
#include <vector>

#include "ccest/data.hpp"
#include "ccest/inner_solver.hpp"
#include "ccest/loss.hpp"
#include "ccest/penalty.hpp"

namespace ccest {

enum class Algorithm { coco, cocots, cocotv };
enum class InitKind { zeros, leastSquaresFit, userVector };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(InitKind init);
InitKind parse_init(std::string_view name);

struct FitConfig {
  Algorithm algorithm = Algorithm::coco;
  /// Trimming size, cocotv only.
  std::optional<Index> trim_h;
  double outer_tol = 1e-6;
  int max_outer = 200;
  /// Unset: zeros for penalized fits, an unweighted fit for lambda = 0.
  std::optional<InitKind> init;
  /// Raw-scale starting coefficients for InitKind::userVector.
  Vector init_beta;
  InnerSettings inner;
  /// Unset: standardize predictors iff lambda > 0.
  std::optional<bool> standardize;
  /// Keep every raw-scale beta^(k) in FitResult::iterates.
  bool record_iterates = false;

  /// Throws ValidationError; n is the number of observations.
  void validate(Index n) const;
};

struct FitResult {
  Vector beta;
  /// Dual weights at the returned beta.
  Vector dual_v;
  Vector z;
  Vector u;
  /// F(beta^(0)), F(beta^(1)), ... on the internal (possibly standardized) scale.
  std::vector<double> objective_trace;
  std::vector<Vector> iterates;
  int outer_iters = 0;
  bool converged = false;
  /// Some inner piecewise solve stopped at its iteration cap.
  bool inner_warning = false;
};

FitResult fit(const Dataset& data, const CompositeLoss& loss, const PenaltySpec& penalty,
              const FitConfig& config = {});

/// F(beta) = (1/n) sum_i g(s(u_i(beta))) + Lambda(beta).
double objective(const Vector& beta, const Dataset& data, const CompositeLoss& loss,
                 const PenaltySpec& penalty);

/// Mean composite loss without the penalty; used to score tuning data.
double mean_composite_loss(const Vector& beta, const Dataset& data, const CompositeLoss& loss);

/// Indices of the h smallest entries of z, ties broken by lowest index.
std::vector<Index> smallest_indices(const Vector& z, Index h);

/// sum over the h smallest z_i(beta).
double trimmed_loss(const Vector& beta, const Dataset& data, const ConvexSpec& convex, Index h);

/// Dual weights v for the given algorithm from the current z.
Vector dual_weights(Algorithm algorithm, const ConcaveSpec& g, const Vector& z,
                    std::optional<Index> trim_h = std::nullopt);

/// Classical M-estimation weight Gamma'(u)/u (Gamma''(0) at u = 0) for a
/// gaussian-induced loss, computed from the loss written in u.
double irwls_weights(const CompositeLoss& loss, double u);

}  // namespace ccest
