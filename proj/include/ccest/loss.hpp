#pragma once

// Composite (concave o convex) losses: Gamma(u) = g(s(u)).
//
// g is one of eight nondecreasing concave components with shape sigma;
// s is a convex component evaluated at the margin u. The dual weight used by
// the estimation loop is v in d(-g)(z), always <= 0; -v is the observation
// weight.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccest/data.hpp"

namespace ccest {

enum class ConcaveKind { hcave, acave, bcave, ccave, dcave, ecave, gcave, tcave };
enum class ConvexKind { gaussian, gaussianC, binomial, poisson, hinge, epsInsensitive };

inline constexpr ConcaveKind kAllConcave[] = {
    ConcaveKind::hcave, ConcaveKind::acave, ConcaveKind::bcave, ConcaveKind::ccave,
    ConcaveKind::dcave, ConcaveKind::ecave, ConcaveKind::gcave, ConcaveKind::tcave};
inline constexpr ConvexKind kAllConvex[] = {
    ConvexKind::gaussian, ConvexKind::gaussianC, ConvexKind::binomial,
    ConvexKind::poisson,  ConvexKind::hinge,     ConvexKind::epsInsensitive};

std::string_view to_string(ConcaveKind kind);
std::string_view to_string(ConvexKind kind);
/// Throws ArgumentError listing the valid names.
ConcaveKind parse_concave(std::string_view name);
ConvexKind parse_convex(std::string_view name);

/// Default delta for ecave is 0.25 sigma; for gcave it is (sigma - 1) / 2 when
/// sigma >= 1 (forced) and 1e-4 otherwise. The gcave weight at the origin
/// grows like delta^(sigma - 1) for sigma < 1.
inline constexpr double kEcaveDeltaRatio = 0.25;
inline constexpr double kGcaveSmallDelta = 1e-4;

struct ConcaveSpec {
  ConcaveKind kind = ConcaveKind::ccave;
  double sigma = 1.0;
  /// Only set for ecave and gcave.
  std::optional<double> delta;

  /// Validated construction. sigma > 0 (tcave: sigma >= 0; tcave and hcave
  /// also accept +inf, which turns g into the identity).
  static ConcaveSpec make(ConcaveKind kind, double sigma,
                          std::optional<double> delta = std::nullopt);

  bool operator==(const ConcaveSpec&) const = default;
};

struct ConvexSpec {
  ConvexKind kind = ConvexKind::gaussian;
  /// Tube half-width, only meaningful for epsInsensitive.
  double epsilon = 0.0;

  static ConvexSpec make(ConvexKind kind, std::optional<double> epsilon = std::nullopt);

  bool operator==(const ConvexSpec&) const = default;
};

struct CompositeLoss {
  ConcaveSpec concave;
  ConvexSpec convex;

  /// Gamma(u) = g(s(u)) for the margin-form convex component.
  template <class T>
  T value(T u) const;

  bool operator==(const CompositeLoss&) const = default;
};

/// g(z); throws DomainError for z < 0.
template <class T>
T eval_concave(const ConcaveSpec& g, T z);

/// An element of d(-g)(z), <= 0. At the tcave kink z = sigma returns -1.
template <class T>
T neg_subgradient(const ConcaveSpec& g, T z);

/// Observation weight -neg_subgradient(g, z).
inline double weight(const ConcaveSpec& g, double z) { return 0.0 - neg_subgradient(g, z); }

/// sup_z g(z); +inf for hcave.
double concave_supremum(const ConcaveSpec& g);

/// Knots of g in z where it is not twice differentiable.
std::vector<double> concave_knots(const ConcaveSpec& g);

/// s(u). Binomial is the margin form log(1 + exp(-u)). Poisson is
/// -y u + exp(u) and requires y (ArgumentError otherwise).
template <class T>
T eval_convex(const ConvexSpec& s, T u, std::optional<T> y = std::nullopt);

/// Per-observation convex loss z_i entering g, for margin u and response y:
///   binomial & TaskKind::binomial   log(1 + e^u) - y u
///   poisson                         e^u - y u - (y - y log y)   (>= 0, half deviance)
///   otherwise                       eval_convex(s, u)
template <class T>
T convex_value(const ConvexSpec& s, TaskKind task, T u, T y);

/// Knots of s in u (nondifferentiable points or s'(u) = 0).
std::vector<double> convex_knots(const ConvexSpec& s);

/// Whether the convex component can be paired with the task.
bool compatible(ConvexKind s, TaskKind task);

/// Margins u_i(beta) for the dataset's task.
Vector margins(const Vector& beta, const Dataset& data);
/// Margins from an already computed linear predictor.
Vector margins_from_predictor(const Vector& f, const Dataset& data);

/// z_i = convex_value(s, task, u_i, y_i).
Vector convex_values(const ConvexSpec& s, const Dataset& data, const Vector& u);

std::string describe(const ConcaveSpec& g);
std::string describe(const CompositeLoss& loss);

}  // namespace ccest
