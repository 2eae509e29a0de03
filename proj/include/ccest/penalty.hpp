#pragma once

#include <string_view>

#include "ccest/data.hpp"

namespace ccest {

enum class PenaltyFamily { lasso, scad };

std::string_view to_string(PenaltyFamily family);
PenaltyFamily parse_penalty(std::string_view name);

/// Lambda(beta) = sum_{j>=1} alpha p_lambda(|beta_j|) + lambda (1 - alpha)/2 beta_j^2.
/// The intercept beta_0 is never penalized.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::lasso;
  double lambda = 0.0;
  double alpha = 1.0;
  double scad_a = 3.7;

  /// Throws ValidationError for lambda < 0, alpha outside [0, 1] or scad_a <= 2.
  static PenaltySpec make(PenaltyFamily family, double lambda, double alpha = 1.0,
                          double scad_a = 3.7);
  static PenaltySpec none() { return {}; }

  bool operator==(const PenaltySpec&) const = default;
};

/// p_lambda(theta) for theta >= 0 (without the alpha factor).
double sparsity_penalty(const PenaltySpec& spec, double theta);
/// p'_lambda(theta) for theta >= 0, using the right derivative at 0.
double sparsity_derivative(const PenaltySpec& spec, double theta);

/// Lambda(beta); beta[0] is the intercept.
double eval_penalty(const PenaltySpec& spec, const Vector& beta);

/// Penalty contribution of a single coefficient.
double coordinate_penalty(const PenaltySpec& spec, double b);

/// argmin_b  (weight_sum / 2) b^2 - z b + alpha p_lambda(|b|) + lambda (1 - alpha)/2 b^2.
/// Soft thresholding with ridge shrinkage for the lasso; for SCAD the exact
/// minimizer over its three zones (global even when the zone is concave).
double threshold(const PenaltySpec& spec, double z, double weight_sum);

}  // namespace ccest
