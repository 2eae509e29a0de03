#include "ccest/penalty.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ccest/error.hpp"

namespace ccest {

std::string_view to_string(PenaltyFamily family) {
  return family == PenaltyFamily::lasso ? "lasso" : "scad";
}

PenaltyFamily parse_penalty(std::string_view name) {
  if (name == "lasso") return PenaltyFamily::lasso;
  if (name == "scad") return PenaltyFamily::scad;
  throw ArgumentError("unknown penalty '" + std::string(name) + "' (valid: lasso, scad)");
}

PenaltySpec PenaltySpec::make(PenaltyFamily family, double lambda, double alpha,
                              double scad_a) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("lambda must be a finite value >= 0, got " + std::to_string(lambda));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (family == PenaltyFamily::scad && !(scad_a > 2.0)) {
    throw ValidationError("SCAD requires a > 2, got " + std::to_string(scad_a));
  }
  return {family, lambda, alpha, scad_a};
}

double sparsity_penalty(const PenaltySpec& spec, double theta) {
  const double lam = spec.lambda;
  if (spec.family == PenaltyFamily::lasso) return lam * theta;
  const double a = spec.scad_a;
  if (theta <= lam) return lam * theta;
  if (theta <= a * lam) return (2 * a * lam * theta - theta * theta - lam * lam) / (2 * (a - 1));
  return (a + 1) * lam * lam / 2;
}

double sparsity_derivative(const PenaltySpec& spec, double theta) {
  const double lam = spec.lambda;
  if (spec.family == PenaltyFamily::lasso || theta <= lam) return lam;
  return std::max(spec.scad_a * lam - theta, 0.0) / (spec.scad_a - 1);
}

double coordinate_penalty(const PenaltySpec& spec, double b) {
  if (spec.lambda == 0.0) return 0.0;
  return spec.alpha * sparsity_penalty(spec, std::abs(b)) +
         spec.lambda * (1 - spec.alpha) / 2 * b * b;
}

double eval_penalty(const PenaltySpec& spec, const Vector& beta) {
  double total = 0.0;
  for (Index j = 1; j < beta.size(); ++j) total += coordinate_penalty(spec, beta[j]);
  return total;
}

double threshold(const PenaltySpec& spec, double z, double weight_sum) {
  const double curv = weight_sum + spec.lambda * (1 - spec.alpha);
  const double t = std::abs(z);
  const double sign = z < 0 ? -1.0 : 1.0;
  const double l1 = spec.alpha * spec.lambda;
  if (spec.family == PenaltyFamily::lasso || spec.lambda == 0.0 || spec.alpha == 0.0) {
    return sign * std::max(t - l1, 0.0) / curv;
  }

  // One-sided objective over theta = |b| >= 0 with b taking the sign of z.
  const double lam = spec.lambda;
  const double a = spec.scad_a;
  auto objective = [&](double theta) {
    return curv / 2 * theta * theta - t * theta + spec.alpha * sparsity_penalty(spec, theta);
  };
  auto clip = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };

  std::array<double, 6> candidates{};
  std::size_t count = 0;
  candidates[count++] = 0.0;
  candidates[count++] = clip((t - l1) / curv, 0.0, lam);
  const double k = curv - spec.alpha / (a - 1);
  if (k > 0) {
    candidates[count++] = clip((t - spec.alpha * a * lam / (a - 1)) / k, lam, a * lam);
  } else {
    candidates[count++] = lam;
    candidates[count++] = a * lam;
  }
  candidates[count++] = std::max(t / curv, a * lam);

  double best = 0.0;
  double best_value = objective(0.0);
  for (std::size_t c = 1; c < count; ++c) {
    const double value = objective(candidates[c]);
    if (value < best_value) {
      best_value = value;
      best = candidates[c];
    }
  }
  return sign * best;
}

}  // namespace ccest
