#pragma once

// Numerical checks on composite losses: the concavity inequality
// (s''/s') Gamma' >= Gamma'', Fisher consistency of margin losses, the tcave
// conjugate pair, and plot-ready weight / ARA curves.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccest/loss.hpp"

namespace ccest {

/// Central-difference step and knot exclusion margin.
inline constexpr double kFdStep = 1e-5;
inline constexpr double kKnotMargin = 1e-4;

struct ConcavityPoint {
  double u = 0.0;
  double lhs = 0.0;  ///< s''(u)/s'(u) Gamma'(u)
  double rhs = 0.0;  ///< Gamma''(u)
};

struct ConcavityReport {
  double max_violation = 0.0;  ///< max over points of rhs - lhs
  std::vector<ConcavityPoint> points;
  std::size_t excluded = 0;
};

/// Points within kKnotMargin of a knot of s, of a preimage of a knot of g, or
/// where s'(u) vanishes are skipped. Throws ArgumentError if none remain.
ConcavityReport check_concavity(const CompositeLoss& loss, const std::vector<double>& u_grid);

/// Same check with an arbitrary outer function g (e.g. a convex control).
ConcavityReport check_concavity(const std::function<long double(long double)>& g,
                                const ConvexSpec& s, const std::vector<double>& u_grid,
                                const std::vector<double>& g_knots = {});

enum class FisherCoverage { conditionOne, conditionTwo, notCovered };

std::string_view to_string(FisherCoverage coverage);

/// Whether the standard sufficient conditions for Fisher consistency apply.
/// Condition one needs g'(s(0)) > 0 with g differentiable on the range of s;
/// tcave with finite sigma is treated as not differentiable.
FisherCoverage fisher_coverage(const CompositeLoss& loss);

struct FisherPoint {
  double p = 0.0;
  double argmin = 0.0;
  bool sign_matches = false;
};

struct FisherReport {
  bool all_signs_match = true;
  FisherCoverage coverage = FisherCoverage::notCovered;
  std::vector<FisherPoint> points;
};

/// Minimizes V(w) = p Gamma(w) + (1 - p) Gamma(-w) over a grid on [-10, 10]
/// for every p in the grid other than 0.5.
FisherReport check_fisher(const CompositeLoss& loss, const std::vector<double>& p_grid,
                          int grid_points = 20001);

/// Conjugate of -min(sigma, z): sigma (v + 1) on [-1, 0], +inf elsewhere.
double tcave_conjugate(double v, double sigma);

struct BiconjugateReport {
  double max_error = 0.0;        ///< max |inf_v (z(-v) + phi(v)) - min(sigma, z)|
  bool optimizer_matches = true; ///< the attaining v equals -I(z <= sigma)
};

/// inf over v in [-1, 0] (evaluated on a grid including both ends).
BiconjugateReport check_tcave_biconjugate(double sigma, const std::vector<double>& z_grid);

struct CurvePoint {
  double x = 0.0;
  double value = 0.0;
};

struct Curve {
  std::string component;
  double sigma = 0.0;  ///< concave shape, or epsilon for epsInsensitive, else 0
  std::vector<CurvePoint> points;
};

/// -neg_subgradient(g, z) on the grid (negative z are skipped).
Curve weight_curve(const ConcaveSpec& g, const std::vector<double>& z_grid);

/// -s''(u)/s'(u) by central differences; points with s'(u) = 0 or within
/// kKnotMargin of a knot are skipped. Poisson uses the response y.
Curve ara_curve(const ConvexSpec& s, const std::vector<double>& u_grid, double y = 1.0);

/// Gamma(u), optionally scaled so that Gamma(0) = 1 (presentation only).
Curve composite_curve(const CompositeLoss& loss, const std::vector<double>& u_grid,
                      bool normalize = false);

/// Columns x, value, component, sigma; one header row.
void write_curves_csv(std::ostream& out, const std::vector<Curve>& curves);

/// n evenly spaced points from a to b inclusive.
std::vector<double> linspace(double a, double b, int n);

}  // namespace ccest
