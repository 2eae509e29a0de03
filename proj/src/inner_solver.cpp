#include "ccest/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccest/error.hpp"

namespace ccest {

InnerSettings InnerSettings::defaults(ConvexKind kind) {
  switch (kind) {
    case ConvexKind::gaussian:
    case ConvexKind::gaussianC: return {1e-7, 10000};
    case ConvexKind::binomial:
    case ConvexKind::poisson: return {1e-6, 100};
    case ConvexKind::hinge:
    case ConvexKind::epsInsensitive: return {1e-9, 5000};
  }
  return {1e-7, 10000};
}

InnerSettings InnerSettings::resolved(ConvexKind kind) const {
  const auto d = defaults(kind);
  return {tol > 0 ? tol : d.tol, max_iter > 0 ? max_iter : d.max_iter, record_trace};
}

namespace {

constexpr double kLinkClamp = 30.0;
constexpr int kMaxHalvings = 20;

void check_problem(const InnerProblem& pr) {
  const Index n = pr.data.n();
  if (pr.weights.size() != n) {
    throw ValidationError("weight vector length " + std::to_string(pr.weights.size()) +
                          " does not match n = " + std::to_string(n));
  }
  if (pr.warm_start.size() != pr.data.p() + 1) {
    throw ValidationError("warm start must have length p + 1");
  }
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double w = pr.weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("observation weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) throw DegenerateError("all observation weights are zero");
  if (!compatible(pr.convex.kind, pr.data.task)) {
    throw ValidationError(std::string("convex component ") +
                          std::string(to_string(pr.convex.kind)) +
                          " cannot be used for task " + std::string(to_string(pr.data.task)));
  }
}

struct CdOutcome {
  int sweeps = 0;
  bool converged = false;
};

// Coordinate descent on sum_i omega_i (target_i - f_i)^2 / 2 + Lambda(beta).
// With `l1` set, the sparsity part is replaced by sum_j l1[j] |beta_j|.
template <class OnSweep>
CdOutcome weighted_cd(const Dataset& data, const Vector& target, const Vector& omega,
                      const PenaltySpec& pen, Vector& beta, double tol, int max_iter,
                      OnSweep&& on_sweep, const Vector* l1 = nullptr) {
  const double ridge = pen.lambda * (1.0 - pen.alpha);
  const Index p = data.p();
  const double total = omega.sum();
  Vector curvature(p);
  for (Index j = 0; j < p; ++j) curvature[j] = omega.dot(data.x.col(j).cwiseAbs2());
  if (!data.intercept) beta[0] = 0.0;

  CdOutcome out;
  Vector r(target.size());
  Vector wr(target.size());
  while (out.sweeps < max_iter) {
    ++out.sweeps;
    r = target - data.linear_predictor(beta);
    double max_change = 0.0;
    if (data.intercept) {
      const double d = omega.dot(r) / total;
      beta[0] += d;
      r.array() -= d;
      max_change = std::abs(d);
    }
    for (Index j = 0; j < p; ++j) {
      const double a = curvature[j];
      double updated;
      if (a <= 0.0) {
        if (pen.lambda == 0.0) continue;
        updated = 0.0;
      } else {
        wr = omega.cwiseProduct(r);
        const double z = data.x.col(j).dot(wr) + a * beta[j + 1];
        if (l1) {
          const double t = std::max(std::abs(z) - (*l1)[j], 0.0);
          updated = std::copysign(t, z) / (a + ridge);
        } else {
          updated = threshold(pen, z, a);
        }
      }
      const double d = updated - beta[j + 1];
      if (d != 0.0) {
        r.noalias() -= d * data.x.col(j);
        beta[j + 1] = updated;
        max_change = std::max(max_change, std::abs(d));
      }
    }
    on_sweep(beta);
    if (max_change < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double clamp_link(double f) { return std::clamp(f, -kLinkClamp, kLinkClamp); }

}  // namespace

double inner_objective(const InnerProblem& pr, const Vector& beta) {
  const Vector u = margins_from_predictor(pr.data.linear_predictor(beta), pr.data);
  const Index n = pr.data.n();
  double loss = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (pr.weights[i] == 0.0) continue;
    double ui = u[i];
    if (pr.convex.kind == ConvexKind::poisson) ui = clamp_link(ui);
    loss += pr.weights[i] * convex_value<double>(pr.convex, pr.data.task, ui, pr.data.y[i]);
  }
  return loss / static_cast<double>(n) + eval_penalty(pr.penalty, beta);
}

InnerResult solve_weighted_gaussian(const InnerProblem& pr) {
  check_problem(pr);
  if (pr.convex.kind != ConvexKind::gaussian && pr.convex.kind != ConvexKind::gaussianC) {
    throw ValidationError("solve_weighted_gaussian needs a gaussian convex component");
  }
  const auto settings = pr.settings.resolved(pr.convex.kind);
  // (1 - y f)^2 / 2 == (y - f)^2 / 2 for y in {-1, +1}, so both reduce to
  // least squares on y.
  const Vector omega = pr.weights / static_cast<double>(pr.data.n());
  InnerResult res;
  res.beta = pr.warm_start;
  if (settings.record_trace) res.trace.push_back(inner_objective(pr, res.beta));
  const auto cd = weighted_cd(pr.data, pr.data.y, omega, pr.penalty, res.beta, settings.tol,
                              settings.max_iter, [&](const Vector& b) {
                                if (settings.record_trace) res.trace.push_back(inner_objective(pr, b));
                              });
  res.iterations = cd.sweeps;
  res.converged = cd.converged;
  res.objective = inner_objective(pr, res.beta);
  if (!settings.record_trace) res.trace.push_back(res.objective);
  return res;
}

InnerResult solve_weighted_glm(const InnerProblem& pr) {
  check_problem(pr);
  const bool poisson = pr.convex.kind == ConvexKind::poisson;
  if (!poisson && pr.convex.kind != ConvexKind::binomial) {
    throw ValidationError("solve_weighted_glm needs a binomial or poisson convex component");
  }
  const auto settings = pr.settings.resolved(pr.convex.kind);
  const Dataset& data = pr.data;
  const Index n = data.n();
  Vector response = data.y;
  if (data.task == TaskKind::classification) response = (data.y.array() + 1.0) / 2.0;

  const double inv_n = 1.0 / static_cast<double>(n);
  InnerResult res;
  res.beta = pr.warm_start;
  if (!data.intercept) res.beta[0] = 0.0;
  double current = inner_objective(pr, res.beta);
  res.trace.push_back(current);

  Vector target(n);
  Vector omega(n);
  for (int it = 0; it < settings.max_iter; ++it) {
    res.iterations = it + 1;
    const Vector f = data.linear_predictor(res.beta);
    for (Index i = 0; i < n; ++i) {
      const double fc = clamp_link(f[i]);
      double mu;
      double h;
      if (poisson) {
        mu = std::exp(fc);
        h = mu;
      } else {
        mu = 1.0 / (1.0 + std::exp(-fc));
        h = mu * (1.0 - mu);
      }
      h = std::max(h, 1e-10);
      target[i] = fc - (mu - response[i]) / h;
      omega[i] = pr.weights[i] * h * inv_n;
    }
    // SCAD enters through its local linear majorizer so the working problem
    // stays convex and the proposal is a descent direction.
    Vector proposal = res.beta;
    const PenaltySpec& pen = pr.penalty;
    if (pen.family == PenaltyFamily::scad && pen.lambda > 0.0 && pen.alpha > 0.0) {
      Vector l1(data.p());
      for (Index j = 0; j < data.p(); ++j)
        l1[j] = pen.alpha * sparsity_derivative(pen, std::abs(res.beta[j + 1]));
      weighted_cd(data, target, omega, pen, proposal, settings.tol * 0.1, 10000,
                  [](const Vector&) {}, &l1);
    } else {
      weighted_cd(data, target, omega, pen, proposal, settings.tol * 0.1, 10000,
                  [](const Vector&) {});
    }

    const Vector step = proposal - res.beta;
    const double full_change = step.cwiseAbs().maxCoeff();
    double scale = 1.0;
    Vector candidate = proposal;
    double value = inner_objective(pr, candidate);
    int halvings = 0;
    while (!(value <= current) && halvings < kMaxHalvings) {
      scale /= 2.0;
      candidate = res.beta + scale * step;
      value = inner_objective(pr, candidate);
      ++halvings;
    }
    if (!(value <= current)) {
      if (full_change < std::sqrt(settings.tol) ||
          value - current <= 1e-12 * (1.0 + std::abs(current))) {
        res.converged = true;
        break;
      }
      throw ConvergenceError("IRLS objective increased after " + std::to_string(kMaxHalvings) +
                                 " step halvings",
                             res.trace);
    }
    const double change = scale * full_change;
    res.beta = candidate;
    current = value;
    res.trace.push_back(current);
    if (change < settings.tol) {
      res.converged = true;
      break;
    }
  }
  res.objective = current;
  return res;
}

namespace {

// Quadratically smoothed hinge / epsilon-insensitive loss of width mu:
// within mu/2 of the exact loss everywhere. Returns value and d/du.
std::pair<double, double> smoothed(bool hinge, double u, double eps, double mu) {
  double a;
  double sign;
  if (hinge) {
    a = 1.0 - u;
    sign = -1.0;
  } else {
    a = std::abs(u) - eps;
    sign = u > 0 ? 1.0 : -1.0;
  }
  if (a <= 0.0) return {0.0, 0.0};
  if (a < mu) return {a * a / (2 * mu), sign * a / mu};
  return {a - mu / 2, sign};
}

}  // namespace

InnerResult solve_weighted_piecewise(const InnerProblem& pr) {
  check_problem(pr);
  const bool hinge = pr.convex.kind == ConvexKind::hinge;
  if (!hinge && pr.convex.kind != ConvexKind::epsInsensitive) {
    throw ValidationError("solve_weighted_piecewise needs hinge or epsInsensitive");
  }
  const auto settings = pr.settings.resolved(pr.convex.kind);
  const Dataset& data = pr.data;
  const Index n = data.n();
  const Index p = data.p();
  const double inv_n = 1.0 / static_cast<double>(n);
  const PenaltySpec& pen = pr.penalty;
  const double eps = pr.convex.epsilon;
  const double ridge = pen.lambda * (1.0 - pen.alpha);
  const bool sparse = pen.lambda > 0.0 && pen.alpha > 0.0;

  // Accelerated proximal gradient on the smoothed loss, with the width mu
  // shrunk stage by stage. SCAD enters through its local linear majorizer,
  // refreshed at the start of each stage. The best exact objective seen is
  // returned, so the result is never worse than the warm start.
  InnerResult res;
  res.beta = pr.warm_start;
  if (!data.intercept) res.beta[0] = 0.0;
  res.objective = inner_objective(pr, res.beta);
  res.trace.push_back(res.objective);

  Vector dfdu(n);
  auto smooth_part = [&](const Vector& b, double mu, Vector* grad) {
    const Vector f = data.linear_predictor(b);
    const Vector u = margins_from_predictor(f, data);
    double value = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double w = pr.weights[i];
      if (w == 0.0) {
        dfdu[i] = 0.0;
        continue;
      }
      const auto [v, d] = smoothed(hinge, u[i], eps, mu);
      value += w * v;
      dfdu[i] = w * d * (hinge ? data.y[i] : -1.0) * inv_n;
    }
    value = value * inv_n + 0.5 * ridge * b.tail(p).squaredNorm();
    if (grad) {
      (*grad)[0] = data.intercept ? dfdu.sum() : 0.0;
      grad->tail(p) = data.x.transpose() * dfdu + ridge * b.tail(p);
    }
    return value;
  };

  Vector l1 = Vector::Zero(p);
  auto l1_value = [&](const Vector& b) { return l1.dot(b.tail(p).cwiseAbs()); };
  auto prox = [&](Vector v, double step) {
    if (!data.intercept) v[0] = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double shrink = step * l1[j];
      const double x = v[j + 1];
      v[j + 1] = x > shrink ? x - shrink : (x < -shrink ? x + shrink : 0.0);
    }
    return v;
  };

  constexpr double kMuStart = 0.1;
  constexpr double kMuEnd = 1e-6;
  constexpr double kMuFactor = 0.1;
  const int per_stage = std::max(1, settings.max_iter);
  Vector x = res.beta;
  Vector grad(p + 1);
  double lip = 1.0;
  bool last_stage_converged = false;
  for (double mu = kMuStart; mu >= kMuEnd * 0.999; mu *= kMuFactor) {
    if (sparse) {
      for (Index j = 0; j < p; ++j) l1[j] = pen.alpha * sparsity_derivative(pen, std::abs(x[j + 1]));
    }
    Vector y = x;
    double t = 1.0;
    double fx = smooth_part(x, mu, nullptr) + l1_value(x);
    last_stage_converged = false;
    for (int it = 0; it < per_stage; ++it) {
      ++res.iterations;
      const double fy = smooth_part(y, mu, &grad);
      Vector z;
      double fz_smooth;
      for (;;) {
        z = prox(y - grad / lip, 1.0 / lip);
        const Vector d = z - y;
        fz_smooth = smooth_part(z, mu, nullptr);
        if (fz_smooth <= fy + grad.dot(d) + 0.5 * lip * d.squaredNorm() + 1e-15 * std::abs(fy)) break;
        lip *= 2.0;
      }
      const double fz = fz_smooth + l1_value(z);
      if (fz > fx) {
        // Objective went up: restart the momentum from x.
        if (t == 1.0) {
          last_stage_converged = true;
          break;
        }
        y = x;
        t = 1.0;
        continue;
      }
      const double move = (z - x).cwiseAbs().maxCoeff();
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = z + ((t - 1.0) / t_next) * (z - x);
      x = z;
      fx = fz;
      t = t_next;
      lip *= 0.9;
      if (move <= settings.tol * (1.0 + x.cwiseAbs().maxCoeff())) {
        last_stage_converged = true;
        break;
      }
    }
    const double exact = inner_objective(pr, x);
    if (exact < res.objective) {
      res.objective = exact;
      res.beta = x;
    }
    res.trace.push_back(res.objective);
  }
  res.converged = last_stage_converged;
  res.warning = !last_stage_converged;
  return res;
}

InnerResult solve_weighted(const InnerProblem& pr) {
  switch (pr.convex.kind) {
    case ConvexKind::gaussian:
    case ConvexKind::gaussianC: return solve_weighted_gaussian(pr);
    case ConvexKind::binomial:
    case ConvexKind::poisson: return solve_weighted_glm(pr);
    case ConvexKind::hinge:
    case ConvexKind::epsInsensitive: return solve_weighted_piecewise(pr);
  }
  throw ValidationError("unsupported convex component");
}

}  // namespace ccest
