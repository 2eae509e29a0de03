#pragma once

// Simulation designs and the Monte Carlo harness.
//
//   ex1  y = X beta + e, beta = (1.5, 0.5, 1, 1.5, 1), X ~ N_5(0, S),
//        S_ij = 0.5^|i-j|, e ~ N(0, 0.5^2). Unpenalized fits.
//   ex2  same design with p = 50 and five active predictors, plus a tuning
//        sample for the penalty parameter.
//   ex3  (x1, x2) uniform on the unit disk, y = +1 iff x1 >= x2, 18 uniform
//        [-1, 1] noise predictors, no intercept, a fraction of labels flipped.
//
// Contamination for ex1/ex2 touches exactly ceil(0.1 n) training (and tuning)
// rows: their errors come from N(20, 0.5^2), and for verticalLeverage their
// predictors are then replaced by N(50, 1) draws.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccest/coco.hpp"

namespace ccest {

enum class Example { ex1, ex2, ex3 };
enum class Contamination { none, vertical, verticalLeverage };

std::string_view to_string(Example e);
Example parse_example(std::string_view name);
std::string_view to_string(Contamination c);
Contamination parse_contamination(std::string_view name);

inline constexpr double kContaminationRate = 0.1;

struct ScenarioSpec {
  Example example = Example::ex1;
  Contamination contamination = Contamination::none;
  /// Label flip fraction for ex3.
  double flip_pct = 0.0;
  /// Flip test labels too, so the Bayes rule's test error equals flip_pct.
  bool flip_test = true;
  Index n_train = 100;
  Index n_tune = 0;
  Index n_test = 100;
  Index p = 5;
  std::uint64_t seed = 1;

  /// Defaults per example: ex1 100/0/100, p = 5; ex2 100/100/100, p = 50;
  /// ex3 100/100/10000, p = 20.
  static ScenarioSpec defaults(Example e);
  void validate() const;
  /// e.g. "ex1-vertical", "ex3-flip0.2".
  std::string label() const;
  bool operator==(const ScenarioSpec&) const = default;
};

struct Scenario {
  Dataset train;
  std::optional<Dataset> tune;
  Dataset test;
  /// Length p + 1, intercept first.
  Vector beta_true;
  /// Contaminated (or flipped) training rows, sorted.
  std::vector<Index> contaminated;
  /// 0-based predictor indices with nonzero true coefficient.
  std::vector<Index> support;
};

Scenario generate(const ScenarioSpec& spec);

/// Shape parameter used for each concave component in the benchmark tables.
double benchmark_sigma(Example e, ConcaveKind kind);

enum class EstimatorKind { composite, oracle, bayes };

struct EstimatorSpec {
  std::string name;
  EstimatorKind kind = EstimatorKind::composite;
  CompositeLoss loss;
  /// Penalty family and alpha; lambda is tuned when `tune_lambda` is set,
  /// otherwise `penalty.lambda` is used as given.
  PenaltySpec penalty;
  bool tune_lambda = false;
  FitConfig config;

  static EstimatorSpec oracle();
  static EstimatorSpec bayes();
  /// Least squares: tcave(inf) composed with the task's squared loss.
  static EstimatorSpec least_squares(ConvexKind convex = ConvexKind::gaussian);
};

/// Estimator list of the benchmark table for an example.
std::vector<EstimatorSpec> benchmark_estimators(Example e);

struct MetricsReport {
  std::optional<double> rmse;
  std::optional<double> trimmed_rmse;
  std::optional<double> misclass_error;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
};

/// Test-set metrics. Regression: RMSE and 90% trimmed RMSE. Classification:
/// misclassification with prediction sign(f), f = 0 counted as +1. Selection
/// metrics need a true support and use |beta_j| > 1e-8.
MetricsReport metrics(const Vector& beta, const Dataset& test,
                      const std::optional<std::vector<Index>>& true_support = std::nullopt,
                      double trim_fraction = 0.9);

/// Largest useful penalty: lambda at which the lasso keeps every slope at 0
/// for the weights -v at the null fit. `data` should be the standardized
/// design used by the fit.
double lambda_max(const Dataset& data, const CompositeLoss& loss, double alpha);

/// logspace(lambda_max, ratio * lambda_max, n), decreasing.
std::vector<double> lambda_grid(double lambda_max, int n = 50, double ratio = 1e-4);

struct TunedFit {
  FitResult result;
  double lambda = 0.0;
  /// Mean composite loss on the tuning sample at the chosen lambda.
  double score = 0.0;
  std::vector<double> lambdas;
  std::vector<double> scores;  ///< NaN where the fit failed
};

/// Warm-started lambda path on standardized predictors, scored on `tune` by
/// the estimator's own mean composite loss. The first fit starts from the
/// config's init (zeros when unset). Throws ConvergenceError when every
/// lambda fails.
TunedFit fit_tuned(const Dataset& train, const Dataset& tune, const CompositeLoss& loss,
                   const PenaltySpec& penalty, const FitConfig& config, int n_lambda = 50);

struct RunRecord {
  std::string estimator;
  int run = 0;
  bool failed = false;
  std::string error;
  double lambda = 0.0;
  MetricsReport metrics;
};

struct Aggregate {
  std::string estimator;
  std::string scenario;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  int runs = 0;
};

struct McResult {
  std::vector<RunRecord> records;
  std::vector<Aggregate> aggregates;
};

/// Per-run seed derived from the scenario seed by splitmix64.
std::uint64_t run_seed(std::uint64_t seed, int run);

/// Fits one estimator on a generated scenario; tunes lambda on the tuning
/// sample (minimizing the estimator's own mean composite loss) when asked.
RunRecord evaluate_estimator(const EstimatorSpec& est, const Scenario& sc);

/// Worker threads default to the hardware concurrency, capped by the
/// COCO_THREADS environment variable (or `threads` when > 0). Results do not
/// depend on the thread count. More than 20% failed runs for an estimator
/// throws ConvergenceError.
McResult run_mc(const ScenarioSpec& scenario, const std::vector<EstimatorSpec>& estimators,
                int runs, int threads = 0);

void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& rows);
void write_aggregates_json(std::ostream& out, const std::vector<Aggregate>& rows);

}  // namespace ccest
