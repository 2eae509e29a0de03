#include "ccest/coco.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ccest/error.hpp"

namespace ccest {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::coco: return "coco";
    case Algorithm::cocots: return "cocots";
    case Algorithm::cocotv: return "cocotv";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "coco") return Algorithm::coco;
  if (name == "cocots") return Algorithm::cocots;
  if (name == "cocotv") return Algorithm::cocotv;
  throw ArgumentError("unknown algorithm '" + std::string(name) +
                      "' (valid: coco, cocots, cocotv)");
}

std::string_view to_string(InitKind init) {
  switch (init) {
    case InitKind::zeros: return "zeros";
    case InitKind::leastSquaresFit: return "leastSquaresFit";
    case InitKind::userVector: return "userVector";
  }
  return "?";
}

InitKind parse_init(std::string_view name) {
  if (name == "zeros") return InitKind::zeros;
  if (name == "leastSquaresFit" || name == "ls") return InitKind::leastSquaresFit;
  if (name == "userVector" || name == "user") return InitKind::userVector;
  throw ArgumentError("unknown init '" + std::string(name) +
                      "' (valid: zeros, leastSquaresFit, userVector)");
}

void FitConfig::validate(Index n) const {
  if (!(outer_tol > 0.0)) throw ValidationError("outer_tol must be > 0");
  if (max_outer < 1) throw ValidationError("max_outer must be >= 1");
  if (algorithm == Algorithm::cocotv) {
    if (!trim_h) throw ValidationError("cocotv requires trim_h");
    if (*trim_h < 1 || *trim_h > n) {
      throw ValidationError("trim_h must lie in [1, n = " + std::to_string(n) + "], got " +
                            std::to_string(*trim_h));
    }
  } else if (trim_h) {
    throw ValidationError(std::string(to_string(algorithm)) +
                          " does not take trim_h (cocots trims by sigma)");
  }
}

std::vector<Index> smallest_indices(const Vector& z, Index h) {
  std::vector<Index> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return z[a] < z[b]; });
  order.resize(static_cast<std::size_t>(std::clamp<Index>(h, 0, z.size())));
  return order;
}

Vector dual_weights(Algorithm algorithm, const ConcaveSpec& g, const Vector& z,
                    std::optional<Index> trim_h) {
  Vector v = Vector::Zero(z.size());
  switch (algorithm) {
    case Algorithm::coco:
      for (Index i = 0; i < z.size(); ++i) v[i] = neg_subgradient(g, z[i]);
      break;
    case Algorithm::cocots:
      for (Index i = 0; i < z.size(); ++i) v[i] = z[i] <= g.sigma ? -1.0 : 0.0;
      break;
    case Algorithm::cocotv:
      for (Index i : smallest_indices(z, trim_h.value_or(z.size()))) v[i] = -1.0;
      break;
  }
  return v;
}

double mean_composite_loss(const Vector& beta, const Dataset& data, const CompositeLoss& loss) {
  const Vector z = convex_values(loss.convex, data, margins(beta, data));
  double total = 0.0;
  for (Index i = 0; i < z.size(); ++i) total += eval_concave(loss.concave, z[i]);
  return total / static_cast<double>(data.n());
}

double objective(const Vector& beta, const Dataset& data, const CompositeLoss& loss,
                 const PenaltySpec& penalty) {
  return mean_composite_loss(beta, data, loss) + eval_penalty(penalty, beta);
}

double trimmed_loss(const Vector& beta, const Dataset& data, const ConvexSpec& convex, Index h) {
  const Vector z = convex_values(convex, data, margins(beta, data));
  double total = 0.0;
  for (Index i : smallest_indices(z, h)) total += z[i];
  return total;
}

double irwls_weights(const CompositeLoss& loss, double u) {
  if (loss.convex.kind != ConvexKind::gaussian) {
    throw ValidationError("irwls_weights is defined for the gaussian convex component");
  }
  const ConcaveSpec& g = loss.concave;
  const double s = g.sigma;
  const double a = std::abs(u);
  const double q = u * u / 2;
  switch (g.kind) {
    case ConcaveKind::hcave:
      return a <= s ? 1.0 : s / a;
    case ConcaveKind::acave:
      if (a == 0.0) return 1.0;
      return a <= s * std::numbers::pi ? s * std::sin(u / s) / u : 0.0;
    case ConcaveKind::bcave: {
      if (a > s) return 0.0;
      const double r = 1 - u * u / (s * s);
      return r * r;
    }
    case ConcaveKind::ccave:
      return std::exp(-u * u / (2 * s * s));
    case ConcaveKind::dcave: {
      const double e = std::exp(-s);
      return (1 / (1 + q) - e / (1 + q * e)) / (1 - e);
    }
    case ConcaveKind::ecave: {
      const double d = *g.delta;
      if (q <= d) return 2 * std::exp(-d / s) / std::sqrt(std::numbers::pi * s * d);
      return 4 * std::exp(-u * u / (2 * s)) / (std::sqrt(2 * std::numbers::pi * s) * a);
    }
    case ConcaveKind::gcave: {
      const double d = *g.delta;
      if (q <= d) return std::pow(d, s - 1) / std::pow(1 + d, s + 1);
      return std::pow(q / (1 + q), s - 1) / ((1 + q) * (1 + q));
    }
    case ConcaveKind::tcave:
      return q <= s ? 1.0 : 0.0;
  }
  return 0.0;
}

namespace {

struct State {
  Vector u;
  Vector z;
  double value = 0.0;
};

State evaluate(const Vector& beta, const Dataset& data, const CompositeLoss& loss,
               const PenaltySpec& penalty, const FitConfig& config) {
  State st;
  st.u = margins_from_predictor(data.linear_predictor(beta), data);
  st.z = convex_values(loss.convex, data, st.u);
  double total = 0.0;
  if (config.algorithm == Algorithm::cocotv) {
    for (Index i : smallest_indices(st.z, *config.trim_h)) total += st.z[i];
  } else {
    for (Index i = 0; i < st.z.size(); ++i) total += eval_concave(loss.concave, st.z[i]);
  }
  st.value = total / static_cast<double>(data.n()) + eval_penalty(penalty, beta);
  return st;
}

}  // namespace

FitResult fit(const Dataset& raw, const CompositeLoss& loss, const PenaltySpec& penalty,
              const FitConfig& config) {
  raw.validate();
  config.validate(raw.n());
  if (raw.n() < 2) {
    throw DegenerateError("at least 2 observations are required, got " +
                          std::to_string(raw.n()));
  }
  if (!compatible(loss.convex.kind, raw.task)) {
    throw ValidationError("convex component " + std::string(to_string(loss.convex.kind)) +
                          " does not match task " + std::string(to_string(raw.task)));
  }
  if (config.algorithm == Algorithm::cocots && loss.concave.kind != ConcaveKind::tcave) {
    throw ValidationError("cocots requires the tcave concave component");
  }

  const bool standardize = config.standardize.value_or(penalty.lambda > 0.0);
  const Standardizer scaler = standardize ? Standardizer(raw) : Standardizer();
  const Dataset scaled = standardize ? scaler.transform(raw) : Dataset{};
  const Dataset& data = standardize ? scaled : raw;
  auto to_raw = [&](const Vector& b) { return standardize ? scaler.to_raw(b) : b; };

  const Index n = data.n();
  const Index p = data.p();
  const InitKind init =
      config.init.value_or(penalty.lambda > 0.0 ? InitKind::zeros : InitKind::leastSquaresFit);

  Vector beta = Vector::Zero(p + 1);
  if (init == InitKind::userVector) {
    if (config.init_beta.size() != p + 1) {
      throw ValidationError("init_beta must have length p + 1 = " + std::to_string(p + 1));
    }
    beta = standardize ? scaler.to_standardized(config.init_beta) : config.init_beta;
  } else if (init == InitKind::leastSquaresFit) {
    const Vector ones = Vector::Ones(n);
    InnerProblem problem{data, ones, loss.convex, penalty, beta, config.inner};
    beta = solve_weighted(problem).beta;
  }
  if (!data.intercept) beta[0] = 0.0;

  FitResult result;
  State state = evaluate(beta, data, loss, penalty, config);
  result.objective_trace.push_back(state.value);
  if (config.record_iterates) result.iterates.push_back(to_raw(beta));

  for (int k = 1; k <= config.max_outer; ++k) {
    const Vector v = dual_weights(config.algorithm, loss.concave, state.z, config.trim_h);
    const Vector w = -v;
    if (!(w.sum() > 0.0)) {
      throw DegenerateError("all observation weights are zero at outer iteration " +
                            std::to_string(k));
    }
    InnerProblem problem{data, w, loss.convex, penalty, beta, config.inner};
    InnerResult inner;
    try {
      inner = solve_weighted(problem);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("outer iteration " + std::to_string(k) + ": " + e.what(),
                             result.objective_trace);
    } catch (const DegenerateError& e) {
      throw DegenerateError("outer iteration " + std::to_string(k) + ": " + e.what());
    }
    result.inner_warning = result.inner_warning || inner.warning;
    beta = inner.beta;
    const double previous = state.value;
    state = evaluate(beta, data, loss, penalty, config);
    result.objective_trace.push_back(state.value);
    if (config.record_iterates) result.iterates.push_back(to_raw(beta));
    result.outer_iters = k;
    if (std::abs(previous - state.value) / (1.0 + std::abs(previous)) < config.outer_tol) {
      result.converged = true;
      break;
    }
  }

  result.beta = to_raw(beta);
  result.u = state.u;
  result.z = state.z;
  result.dual_v = dual_weights(config.algorithm, loss.concave, state.z, config.trim_h);
  return result;
}

}  // namespace ccest
