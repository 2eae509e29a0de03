#include "ccest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ccest/error.hpp"

namespace ccest {

namespace {

using Ld = long double;

std::optional<Ld> response_for(const ConvexSpec& s, double y) {
  if (s.kind == ConvexKind::poisson) return static_cast<Ld>(y);
  return std::nullopt;
}

struct Derivs {
  Ld d1 = 0;
  Ld d2 = 0;
};

template <class F>
Derivs central(const F& f, Ld u) {
  const Ld h = kFdStep;
  const Ld fp = f(u + h);
  const Ld f0 = f(u);
  const Ld fm = f(u - h);
  return {(fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)};
}

std::string component_name(const ConvexSpec& s) { return std::string(to_string(s.kind)); }

}  // namespace

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {a};
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  out.back() = b;
  return out;
}

ConcavityReport check_concavity(const std::function<long double(long double)>& g,
                                const ConvexSpec& s, const std::vector<double>& u_grid,
                                const std::vector<double>& g_knots) {
  const auto y = response_for(s, 1.0);
  auto sfun = [&](Ld u) { return eval_convex<Ld>(s, u, y); };
  auto gamma = [&](Ld u) { return g(sfun(u)); };
  const auto s_knots = convex_knots(s);

  ConcavityReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (double u : u_grid) {
    bool skip = false;
    for (double k : s_knots) skip = skip || std::abs(u - k) < kKnotMargin;
    const Derivs ds = skip ? Derivs{} : central(sfun, u);
    if (!skip && std::abs(ds.d1) < 1e-8) skip = true;
    if (!skip) {
      // Distance in u to a preimage of a knot of g, to first order.
      const Ld su = sfun(u);
      for (double k : g_knots) {
        skip = skip || std::abs(su - k) < kKnotMargin * std::abs(ds.d1) + 1e-12;
      }
    }
    if (skip) {
      ++rep.excluded;
      continue;
    }
    const Derivs dg = central(gamma, u);
    ConcavityPoint pt;
    pt.u = u;
    pt.lhs = static_cast<double>(ds.d2 / ds.d1 * dg.d1);
    pt.rhs = static_cast<double>(dg.d2);
    rep.max_violation = std::max(rep.max_violation, pt.rhs - pt.lhs);
    rep.points.push_back(pt);
  }
  if (rep.points.empty()) {
    throw ArgumentError("concavity grid is empty after excluding knots");
  }
  return rep;
}

ConcavityReport check_concavity(const CompositeLoss& loss, const std::vector<double>& u_grid) {
  const ConcaveSpec g = loss.concave;
  return check_concavity([g](Ld z) { return eval_concave<Ld>(g, std::max(z, Ld(0))); },
                         loss.convex, u_grid, concave_knots(g));
}

std::string_view to_string(FisherCoverage coverage) {
  switch (coverage) {
    case FisherCoverage::conditionOne: return "condition (i)";
    case FisherCoverage::conditionTwo: return "condition (ii)";
    case FisherCoverage::notCovered: return "not covered";
  }
  return "?";
}

FisherCoverage fisher_coverage(const CompositeLoss& loss) {
  const ConvexKind k = loss.convex.kind;
  // s(u) < s(-u) for u > 0 and s'(0) < 0.
  if (k != ConvexKind::gaussianC && k != ConvexKind::binomial && k != ConvexKind::hinge) {
    return FisherCoverage::notCovered;
  }
  const bool nonincreasing = k != ConvexKind::gaussianC;
  const double s0 = eval_convex(loss.convex, 0.0);
  const ConcaveSpec& g = loss.concave;
  const bool kinked = g.kind == ConcaveKind::tcave && std::isfinite(g.sigma);
  if (!kinked) {
    return weight(g, s0) > 0.0 ? FisherCoverage::conditionOne : FisherCoverage::notCovered;
  }
  // tcave: g'(s(0)) fails to exist only at s(0) = sigma; g(s(u)) = g(s(0))
  // for u < 0 then follows from s nonincreasing.
  if (s0 == g.sigma && nonincreasing) return FisherCoverage::conditionTwo;
  return FisherCoverage::notCovered;
}

FisherReport check_fisher(const CompositeLoss& loss, const std::vector<double>& p_grid,
                          int grid_points) {
  FisherReport rep;
  rep.coverage = fisher_coverage(loss);
  const auto w = linspace(-10.0, 10.0, std::max(grid_points, 3));
  std::vector<double> pos(w.size());
  std::vector<double> neg(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    pos[i] = loss.value(w[i]);
    neg[i] = loss.value(-w[i]);
  }
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0) || p == 0.5) continue;
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = p * pos[i] + (1 - p) * neg[i];
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    FisherPoint pt{p, w[best], false};
    pt.sign_matches = pt.argmin != 0.0 && ((pt.argmin > 0) == (p > 0.5));
    rep.all_signs_match = rep.all_signs_match && pt.sign_matches;
    rep.points.push_back(pt);
  }
  return rep;
}

double tcave_conjugate(double v, double sigma) {
  if (v < -1.0 || v > 0.0) return std::numeric_limits<double>::infinity();
  return sigma * (v + 1.0);
}

BiconjugateReport check_tcave_biconjugate(double sigma, const std::vector<double>& z_grid) {
  BiconjugateReport rep;
  const auto v_grid = linspace(-1.0, 0.0, 1001);
  for (double z : z_grid) {
    double best = std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (double v : v_grid) {
      const double val = z * (-v) + tcave_conjugate(v, sigma);
      if (val < best) {
        best = val;
        arg = v;
      }
    }
    rep.max_error = std::max(rep.max_error, std::abs(best - std::min(sigma, z)));
    // At z = sigma both ends attain the infimum; the tie goes to v = -1.
    const double expected = z <= sigma ? -1.0 : 0.0;
    const double at_expected = z * (-expected) + tcave_conjugate(expected, sigma);
    if (arg != expected && at_expected > best) rep.optimizer_matches = false;
  }
  return rep;
}

Curve weight_curve(const ConcaveSpec& g, const std::vector<double>& z_grid) {
  Curve c{std::string(to_string(g.kind)), g.sigma, {}};
  for (double z : z_grid) {
    if (z < 0.0) continue;
    c.points.push_back({z, weight(g, z)});
  }
  return c;
}

Curve ara_curve(const ConvexSpec& s, const std::vector<double>& u_grid, double y) {
  Curve c{component_name(s), s.kind == ConvexKind::epsInsensitive ? s.epsilon : 0.0, {}};
  const auto yy = response_for(s, y);
  auto sfun = [&](Ld u) { return eval_convex<Ld>(s, u, yy); };
  const auto knots = convex_knots(s);
  for (double u : u_grid) {
    bool skip = false;
    for (double k : knots) skip = skip || std::abs(u - k) < kKnotMargin;
    if (skip) continue;
    const Derivs d = central(sfun, u);
    if (std::abs(d.d1) < 1e-8) continue;
    c.points.push_back({u, static_cast<double>(-d.d2 / d.d1)});
  }
  return c;
}

Curve composite_curve(const CompositeLoss& loss, const std::vector<double>& u_grid,
                      bool normalize) {
  Curve c{describe(loss), loss.concave.sigma, {}};
  double scale = 1.0;
  if (normalize) {
    const double at0 = loss.value(0.0);
    if (at0 > 0.0) scale = 1.0 / at0;
  }
  for (double u : u_grid) c.points.push_back({u, scale * loss.value(u)});
  return c;
}

void write_curves_csv(std::ostream& out, const std::vector<Curve>& curves) {
  out << "x,value,component,sigma\n";
  out.precision(17);
  for (const auto& c : curves) {
    for (const auto& pt : c.points) {
      out << pt.x << ',' << pt.value << ",\"" << c.component << "\"," << c.sigma << '\n';
    }
  }
}

}  // namespace ccest
