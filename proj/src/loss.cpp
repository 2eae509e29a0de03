#include "ccest/loss.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ccest/error.hpp"

namespace ccest {

std::string_view to_string(ConcaveKind kind) {
  switch (kind) {
    case ConcaveKind::hcave: return "hcave";
    case ConcaveKind::acave: return "acave";
    case ConcaveKind::bcave: return "bcave";
    case ConcaveKind::ccave: return "ccave";
    case ConcaveKind::dcave: return "dcave";
    case ConcaveKind::ecave: return "ecave";
    case ConcaveKind::gcave: return "gcave";
    case ConcaveKind::tcave: return "tcave";
  }
  return "?";
}

std::string_view to_string(ConvexKind kind) {
  switch (kind) {
    case ConvexKind::gaussian: return "gaussian";
    case ConvexKind::gaussianC: return "gaussianC";
    case ConvexKind::binomial: return "binomial";
    case ConvexKind::poisson: return "poisson";
    case ConvexKind::hinge: return "hinge";
    case ConvexKind::epsInsensitive: return "epsInsensitive";
  }
  return "?";
}

ConcaveKind parse_concave(std::string_view name) {
  for (auto k : kAllConcave) {
    if (to_string(k) == name) return k;
  }
  std::string valid;
  for (auto k : kAllConcave) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
  throw ArgumentError("unknown concave component '" + std::string(name) + "' (valid: " +
                      valid + ")");
}

ConvexKind parse_convex(std::string_view name) {
  for (auto k : kAllConvex) {
    if (to_string(k) == name) return k;
  }
  std::string valid;
  for (auto k : kAllConvex) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
  throw ArgumentError("unknown convex component '" + std::string(name) + "' (valid: " +
                      valid + ")");
}

ConcaveSpec ConcaveSpec::make(ConcaveKind kind, double sigma, std::optional<double> delta) {
  const bool unbounded_ok = kind == ConcaveKind::tcave || kind == ConcaveKind::hcave;
  if (std::isnan(sigma) || (std::isinf(sigma) && !unbounded_ok) || sigma < 0.0 ||
      (sigma == 0.0 && kind != ConcaveKind::tcave)) {
    throw ValidationError(std::string(to_string(kind)) + " requires sigma > 0" +
                          (kind == ConcaveKind::tcave ? " (>= 0 for tcave)" : "") +
                          ", got " + std::to_string(sigma));
  }
  ConcaveSpec g{kind, sigma, std::nullopt};
  if (kind == ConcaveKind::ecave) {
    g.delta = delta.value_or(kEcaveDeltaRatio * sigma);
    if (!(*g.delta > 0.0) || !std::isfinite(*g.delta)) {
      throw ValidationError("ecave requires delta > 0");
    }
  } else if (kind == ConcaveKind::gcave) {
    if (sigma >= 1.0) {
      const double forced = (sigma - 1.0) / 2.0;
      if (delta && *delta != forced) {
        throw ValidationError("gcave with sigma >= 1 fixes delta = (sigma - 1)/2 = " +
                              std::to_string(forced));
      }
      g.delta = forced;
    } else {
      g.delta = delta.value_or(kGcaveSmallDelta);
      if (!(*g.delta > 0.0) || !std::isfinite(*g.delta)) {
        throw ValidationError("gcave with sigma < 1 requires delta > 0");
      }
    }
  } else if (delta) {
    throw ValidationError(std::string(to_string(kind)) + " takes no delta parameter");
  }
  return g;
}

ConvexSpec ConvexSpec::make(ConvexKind kind, std::optional<double> epsilon) {
  ConvexSpec s{kind, 0.0};
  if (kind == ConvexKind::epsInsensitive) {
    s.epsilon = epsilon.value_or(0.1);
    if (!(s.epsilon >= 0.0) || !std::isfinite(s.epsilon)) {
      throw ValidationError("epsInsensitive requires epsilon >= 0");
    }
  } else if (epsilon) {
    throw ValidationError(std::string(to_string(kind)) + " takes no epsilon parameter");
  }
  return s;
}

template <class T>
T eval_concave(const ConcaveSpec& g, T z) {
  if (z < T(0) || std::isnan(z)) {
    throw DomainError("concave component evaluated at negative z = " +
                      std::to_string(static_cast<double>(z)));
  }
  const T s = g.sigma;
  const T s2 = s * s;
  const T pi = std::numbers::pi_v<T>;
  switch (g.kind) {
    case ConcaveKind::hcave:
      if (std::isinf(s) || z <= s2 / 2) return z;
      return s * std::sqrt(2 * z) - s2 / 2;
    case ConcaveKind::acave:
      if (z <= s2 * pi * pi / 2) return s2 * (1 - std::cos(std::sqrt(2 * z) / s));
      return 2 * s2;
    case ConcaveKind::bcave:
      if (z <= s2 / 2) {
        const T r = 1 - 2 * z / s2;
        return s2 / 6 * (1 - r * r * r);
      }
      return s2 / 6;
    case ConcaveKind::ccave:
      return -s2 * std::expm1(-z / s2);
    case ConcaveKind::dcave:
      return (std::log1p(z) - std::log1p(z * std::exp(-s))) / (-std::expm1(-s));
    case ConcaveKind::ecave: {
      const T d = *g.delta;
      const T slope = 2 * std::exp(-d / s) / std::sqrt(pi * s * d);
      if (z <= d) return slope * z;
      return 2 * (std::erfc(std::sqrt(d / s)) - std::erfc(std::sqrt(z / s))) + slope * d;
    }
    case ConcaveKind::gcave: {
      const T d = *g.delta;
      const T slope = std::pow(d, s - 1) / std::pow(1 + d, s + 1);
      if (z <= d) return slope * z;
      return (std::pow(z / (1 + z), s) - std::pow(d / (1 + d), s)) / s +
             std::pow(d, s) / std::pow(1 + d, s + 1);
    }
    case ConcaveKind::tcave:
      return std::min(s, z);
  }
  return T(0);
}

template <class T>
T neg_subgradient(const ConcaveSpec& g, T z) {
  if (z < T(0) || std::isnan(z)) {
    throw DomainError("subgradient requested at negative z = " +
                      std::to_string(static_cast<double>(z)));
  }
  const T s = g.sigma;
  const T s2 = s * s;
  const T pi = std::numbers::pi_v<T>;
  switch (g.kind) {
    case ConcaveKind::hcave:
      if (std::isinf(s) || z <= s2 / 2) return T(-1);
      return -s / std::sqrt(2 * z);
    case ConcaveKind::acave: {
      if (z == T(0)) return T(-1);
      if (z > s2 * pi * pi / 2) return T(0);
      const T r = std::sqrt(2 * z);
      return -s * std::sin(r / s) / r;
    }
    case ConcaveKind::bcave: {
      if (z > s2 / 2) return T(0);
      const T r = 1 - 2 * z / s2;
      return -r * r;
    }
    case ConcaveKind::ccave:
      return -std::exp(-z / s2);
    case ConcaveKind::dcave:
      return -1 / ((1 + z) * (1 + z * std::exp(-s)));
    case ConcaveKind::ecave: {
      const T d = *g.delta;
      const T at = z <= d ? d : z;
      return -2 * std::exp(-at / s) / std::sqrt(pi * s * at);
    }
    case ConcaveKind::gcave: {
      const T d = *g.delta;
      const T at = z <= d ? d : z;
      return -std::pow(at, s - 1) / std::pow(1 + at, s + 1);
    }
    case ConcaveKind::tcave:
      return z <= s ? T(-1) : T(0);
  }
  return T(0);
}

double concave_supremum(const ConcaveSpec& g) {
  const double s = g.sigma;
  const double s2 = s * s;
  switch (g.kind) {
    case ConcaveKind::hcave: return std::numeric_limits<double>::infinity();
    case ConcaveKind::acave: return 2 * s2;
    case ConcaveKind::bcave: return s2 / 6;
    case ConcaveKind::ccave: return s2;
    case ConcaveKind::dcave: return s / (-std::expm1(-s));
    case ConcaveKind::ecave: {
      const double d = *g.delta;
      return 2 * std::erfc(std::sqrt(d / s)) +
             2 * std::exp(-d / s) / std::sqrt(std::numbers::pi * s * d) * d;
    }
    case ConcaveKind::gcave: {
      const double d = *g.delta;
      return (1 - std::pow(d / (1 + d), s)) / s + std::pow(d, s) / std::pow(1 + d, s + 1);
    }
    case ConcaveKind::tcave: return s;
  }
  return 0.0;
}

std::vector<double> concave_knots(const ConcaveSpec& g) {
  const double s2 = g.sigma * g.sigma;
  switch (g.kind) {
    case ConcaveKind::hcave:
    case ConcaveKind::bcave:
      return std::isinf(g.sigma) ? std::vector<double>{} : std::vector<double>{s2 / 2};
    case ConcaveKind::acave: return {s2 * std::numbers::pi * std::numbers::pi / 2};
    case ConcaveKind::ecave:
    case ConcaveKind::gcave: return {*g.delta};
    case ConcaveKind::tcave:
      return std::isinf(g.sigma) ? std::vector<double>{} : std::vector<double>{g.sigma};
    case ConcaveKind::ccave:
    case ConcaveKind::dcave: return {};
  }
  return {};
}

namespace {

// log(1 + e^x) without overflow.
template <class T>
T softplus(T x) {
  if (x > T(30)) return x + std::exp(-x);
  if (x < T(-30)) return std::exp(x);
  return std::log1p(std::exp(x));
}

}  // namespace

template <class T>
T eval_convex(const ConvexSpec& s, T u, std::optional<T> y) {
  switch (s.kind) {
    case ConvexKind::gaussian: return u * u / 2;
    case ConvexKind::gaussianC: return (1 - u) * (1 - u) / 2;
    case ConvexKind::binomial: return softplus(-u);
    case ConvexKind::poisson:
      if (!y) throw ArgumentError("poisson convex component needs the observed count y");
      return -*y * u + std::exp(u);
    case ConvexKind::hinge: return std::max(T(0), 1 - u);
    case ConvexKind::epsInsensitive: {
      const T a = std::abs(u);
      return a <= T(s.epsilon) ? T(0) : a - T(s.epsilon);
    }
  }
  return T(0);
}

template <class T>
T convex_value(const ConvexSpec& s, TaskKind task, T u, T y) {
  if (s.kind == ConvexKind::binomial && task == TaskKind::binomial) {
    return std::max(T(0), softplus(u) - y * u);
  }
  if (s.kind == ConvexKind::poisson) {
    // Shifted by the saturated value y - y log y, so z = 0 at exp(u) = y.
    const T saturated = y > 0 ? y - y * std::log(y) : T(0);
    return std::max(T(0), std::exp(u) - y * u - saturated);
  }
  return eval_convex<T>(s, u);
}

std::vector<double> convex_knots(const ConvexSpec& s) {
  switch (s.kind) {
    case ConvexKind::gaussian: return {0.0};
    case ConvexKind::gaussianC: return {1.0};
    case ConvexKind::hinge: return {1.0};
    case ConvexKind::epsInsensitive:
      return s.epsilon > 0 ? std::vector<double>{-s.epsilon, s.epsilon}
                           : std::vector<double>{0.0};
    case ConvexKind::binomial:
    case ConvexKind::poisson: return {};
  }
  return {};
}

bool compatible(ConvexKind s, TaskKind task) {
  switch (s) {
    case ConvexKind::gaussian:
    case ConvexKind::epsInsensitive: return task == TaskKind::regression;
    case ConvexKind::gaussianC:
    case ConvexKind::hinge: return task == TaskKind::classification;
    case ConvexKind::binomial:
      return task == TaskKind::classification || task == TaskKind::binomial;
    case ConvexKind::poisson: return task == TaskKind::poisson;
  }
  return false;
}

template <class T>
T CompositeLoss::value(T u) const {
  return eval_concave<T>(concave, eval_convex<T>(convex, u));
}

Vector margins_from_predictor(const Vector& f, const Dataset& data) {
  switch (data.task) {
    case TaskKind::regression: return data.y - f;
    case TaskKind::classification: return data.y.cwiseProduct(f);
    case TaskKind::binomial:
    case TaskKind::poisson: return f;
  }
  return f;
}

Vector margins(const Vector& beta, const Dataset& data) {
  data.validate();
  return margins_from_predictor(data.linear_predictor(beta), data);
}

Vector convex_values(const ConvexSpec& s, const Dataset& data, const Vector& u) {
  Vector z(u.size());
  for (Index i = 0; i < u.size(); ++i) z[i] = convex_value<double>(s, data.task, u[i], data.y[i]);
  return z;
}

std::string describe(const ConcaveSpec& g) {
  std::ostringstream os;
  os << to_string(g.kind) << '(' << g.sigma;
  if (g.delta) os << ", delta=" << *g.delta;
  os << ')';
  return os.str();
}

std::string describe(const CompositeLoss& loss) {
  std::ostringstream os;
  os << describe(loss.concave) << " o " << to_string(loss.convex.kind);
  if (loss.convex.kind == ConvexKind::epsInsensitive) os << '(' << loss.convex.epsilon << ')';
  return os.str();
}

template double eval_concave<double>(const ConcaveSpec&, double);
template long double eval_concave<long double>(const ConcaveSpec&, long double);
template double neg_subgradient<double>(const ConcaveSpec&, double);
template long double neg_subgradient<long double>(const ConcaveSpec&, long double);
template double eval_convex<double>(const ConvexSpec&, double, std::optional<double>);
template long double eval_convex<long double>(const ConvexSpec&, long double,
                                              std::optional<long double>);
template double convex_value<double>(const ConvexSpec&, TaskKind, double, double);
template long double convex_value<long double>(const ConvexSpec&, TaskKind, long double,
                                               long double);
template double CompositeLoss::value<double>(double) const;
template long double CompositeLoss::value<long double>(long double) const;

}  // namespace ccest
