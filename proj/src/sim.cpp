#include "ccest/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ccest/error.hpp"

namespace ccest {

std::string_view to_string(Example e) {
  switch (e) {
    case Example::ex1: return "ex1";
    case Example::ex2: return "ex2";
    case Example::ex3: return "ex3";
  }
  return "?";
}

Example parse_example(std::string_view name) {
  if (name == "ex1") return Example::ex1;
  if (name == "ex2") return Example::ex2;
  if (name == "ex3") return Example::ex3;
  throw ArgumentError("unknown scenario '" + std::string(name) + "' (valid: ex1, ex2, ex3)");
}

std::string_view to_string(Contamination c) {
  switch (c) {
    case Contamination::none: return "none";
    case Contamination::vertical: return "vertical";
    case Contamination::verticalLeverage: return "verticalLeverage";
  }
  return "?";
}

Contamination parse_contamination(std::string_view name) {
  if (name == "none") return Contamination::none;
  if (name == "vertical") return Contamination::vertical;
  if (name == "verticalLeverage" || name == "leverage") return Contamination::verticalLeverage;
  throw ArgumentError("unknown contamination '" + std::string(name) +
                      "' (valid: none, vertical, verticalLeverage)");
}

ScenarioSpec ScenarioSpec::defaults(Example e) {
  ScenarioSpec s;
  s.example = e;
  switch (e) {
    case Example::ex1: break;
    case Example::ex2:
      s.n_tune = 100;
      s.p = 50;
      break;
    case Example::ex3:
      s.n_tune = 100;
      s.n_test = 10000;
      s.p = 20;
      break;
  }
  return s;
}

void ScenarioSpec::validate() const {
  if (n_train < 2) throw ValidationError("n_train must be >= 2");
  if (n_test < 1) throw ValidationError("n_test must be >= 1");
  if (n_tune < 0) throw ValidationError("n_tune must be >= 0");
  switch (example) {
    case Example::ex1:
      if (p != 5) throw ValidationError("ex1 has p = 5");
      break;
    case Example::ex2:
      if (p < 11) throw ValidationError("ex2 needs p >= 11");
      break;
    case Example::ex3:
      if (p < 2) throw ValidationError("ex3 needs p >= 2");
      if (contamination != Contamination::none) {
        throw ValidationError("ex3 is contaminated through flip_pct, not contamination");
      }
      break;
  }
  if (example != Example::ex3 && flip_pct != 0.0) {
    throw ValidationError("flip_pct only applies to ex3");
  }
  if (!(flip_pct >= 0.0 && flip_pct <= 0.5)) throw ValidationError("flip_pct must lie in [0, 0.5]");
}

std::string ScenarioSpec::label() const {
  std::ostringstream out;
  out << to_string(example) << '-';
  if (example == Example::ex3) {
    out << "flip" << flip_pct;
  } else {
    out << to_string(contamination);
  }
  return out.str();
}

namespace {

Index contaminated_count(double rate, Index n) {
  return static_cast<Index>(std::ceil(rate * static_cast<double>(n) - 1e-9));
}

// k distinct indices from [0, n), sorted, by partial Fisher-Yates.
std::vector<Index> sample_rows(std::mt19937_64& rng, Index n, Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector true_beta(const ScenarioSpec& s) {
  Vector b = Vector::Zero(s.p + 1);
  switch (s.example) {
    case Example::ex1: b.tail(5) << 1.5, 0.5, 1.0, 1.5, 1.0; break;
    case Example::ex2:
      b[1] = b[7] = 1.5;
      b[2] = 0.5;
      b[4] = b[11] = 1.0;
      break;
    case Example::ex3:
      b[1] = 1.0;
      b[2] = -1.0;
      break;
  }
  return b;
}

struct Regression {
  Dataset data;
  std::vector<Index> contaminated;
};

Regression regression_sample(std::mt19937_64& rng, const ScenarioSpec& s, const Vector& beta,
                             Index n, Contamination c, const Matrix& chol) {
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix z(n, s.p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < s.p; ++j) z(i, j) = N(rng);
  Matrix x = z * chol.transpose();
  Vector eps(n);
  for (Index i = 0; i < n; ++i) eps[i] = 0.5 * N(rng);
  Regression out;
  if (c != Contamination::none) {
    out.contaminated = sample_rows(rng, n, contaminated_count(kContaminationRate, n));
    for (Index i : out.contaminated) eps[i] = 20.0 + 0.5 * N(rng);
  }
  Vector y = x * beta.tail(s.p) + eps;
  if (c == Contamination::verticalLeverage) {
    for (Index i : out.contaminated)
      for (Index j = 0; j < s.p; ++j) x(i, j) = 50.0 + N(rng);
  }
  out.data = make_dataset(std::move(x), std::move(y), TaskKind::regression, true);
  return out;
}

Regression classification_sample(std::mt19937_64& rng, const ScenarioSpec& s, Index n,
                                 bool flip) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix x(n, s.p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    double a;
    double b;
    do {
      a = U(rng);
      b = U(rng);
    } while (a * a + b * b > 1.0);
    x(i, 0) = a;
    x(i, 1) = b;
    for (Index j = 2; j < s.p; ++j) x(i, j) = U(rng);
    y[i] = a >= b ? 1.0 : -1.0;
  }
  Regression out;
  if (flip && s.flip_pct > 0.0) {
    out.contaminated = sample_rows(rng, n, contaminated_count(s.flip_pct, n));
    for (Index i : out.contaminated) y[i] = -y[i];
  }
  out.data = make_dataset(std::move(x), std::move(y), TaskKind::classification, false);
  return out;
}

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  Scenario sc;
  sc.beta_true = true_beta(spec);
  for (Index j = 0; j < spec.p; ++j)
    if (sc.beta_true[j + 1] != 0.0) sc.support.push_back(j);

  if (spec.example == Example::ex3) {
    auto train = classification_sample(rng, spec, spec.n_train, true);
    sc.train = std::move(train.data);
    sc.contaminated = std::move(train.contaminated);
    if (spec.n_tune > 0) sc.tune = classification_sample(rng, spec, spec.n_tune, true).data;
    sc.test = classification_sample(rng, spec, spec.n_test, spec.flip_test).data;
    return sc;
  }
  Matrix sigma(spec.p, spec.p);
  for (Index i = 0; i < spec.p; ++i)
    for (Index j = 0; j < spec.p; ++j) sigma(i, j) = std::pow(0.5, std::abs(i - j));
  const Matrix chol = sigma.llt().matrixL();
  auto train = regression_sample(rng, spec, sc.beta_true, spec.n_train, spec.contamination, chol);
  sc.train = std::move(train.data);
  sc.contaminated = std::move(train.contaminated);
  if (spec.n_tune > 0) {
    sc.tune = regression_sample(rng, spec, sc.beta_true, spec.n_tune, spec.contamination, chol).data;
  }
  sc.test = regression_sample(rng, spec, sc.beta_true, spec.n_test, Contamination::none, chol).data;
  return sc;
}

double benchmark_sigma(Example e, ConcaveKind kind) {
  static constexpr double ex1[] = {1.3, 0.9, 4.7, 1.5, 0.5, 1.5, 1.5, 1.0};
  static constexpr double ex2[] = {0.5, 0.9, 4.7, 1.5, 0.5, 9.0, 1.5, 2.5};
  static constexpr double ex3[] = {1.0, 1.0, 3.5, 1.5, 4.5, 9.0, 1.5, 1.0};
  const auto i = static_cast<std::size_t>(kind);
  switch (e) {
    case Example::ex1: return ex1[i];
    case Example::ex2: return ex2[i];
    case Example::ex3: return ex3[i];
  }
  return 1.0;
}

EstimatorSpec EstimatorSpec::oracle() {
  EstimatorSpec e;
  e.name = "Oracle";
  e.kind = EstimatorKind::oracle;
  return e;
}

EstimatorSpec EstimatorSpec::bayes() {
  EstimatorSpec e;
  e.name = "Bayes";
  e.kind = EstimatorKind::bayes;
  return e;
}

EstimatorSpec EstimatorSpec::least_squares(ConvexKind convex) {
  EstimatorSpec e;
  e.name = "LS";
  e.loss = {ConcaveSpec::make(ConcaveKind::tcave, std::numeric_limits<double>::infinity()),
            ConvexSpec::make(convex)};
  return e;
}

namespace {

std::string sigma_text(double sigma) {
  std::ostringstream out;
  out << sigma;
  std::string s = out.str();
  if (std::round(sigma) == sigma && s.find('.') == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::vector<EstimatorSpec> benchmark_estimators(Example e) {
  std::vector<EstimatorSpec> out;
  const ConvexKind convex = e == Example::ex3 ? ConvexKind::gaussianC : ConvexKind::gaussian;
  if (e == Example::ex1) {
    out.push_back(EstimatorSpec::least_squares(convex));
    for (ConcaveKind k : kAllConcave) {
      EstimatorSpec est;
      const double sigma = benchmark_sigma(e, k);
      est.name = std::string(to_string(k)) + "(" + sigma_text(sigma) + ")";
      est.loss = {ConcaveSpec::make(k, sigma), ConvexSpec::make(convex)};
      est.config.init = InitKind::zeros;
      out.push_back(est);
    }
    out.push_back(EstimatorSpec::oracle());
    return out;
  }
  for (PenaltyFamily fam : {PenaltyFamily::lasso, PenaltyFamily::scad}) {
    EstimatorSpec ls = EstimatorSpec::least_squares(convex);
    ls.name = fam == PenaltyFamily::lasso ? "LS LASSO" : "LS SCAD";
    ls.penalty = PenaltySpec::make(fam, 0.0);
    ls.tune_lambda = true;
    out.push_back(ls);
  }
  for (ConcaveKind k : kAllConcave) {
    for (PenaltyFamily fam : {PenaltyFamily::lasso, PenaltyFamily::scad}) {
      EstimatorSpec est;
      const double sigma = benchmark_sigma(e, k);
      est.name = std::string(to_string(k)) + "(" + sigma_text(sigma) + ")" +
                 (fam == PenaltyFamily::lasso ? "LASSO" : "SCAD");
      est.loss = {ConcaveSpec::make(k, sigma), ConvexSpec::make(convex)};
      est.penalty = PenaltySpec::make(fam, 0.0);
      est.tune_lambda = true;
      out.push_back(est);
    }
  }
  out.push_back(e == Example::ex3 ? EstimatorSpec::bayes() : EstimatorSpec::oracle());
  return out;
}

MetricsReport metrics(const Vector& beta, const Dataset& test,
                      const std::optional<std::vector<Index>>& true_support,
                      double trim_fraction) {
  MetricsReport rep;
  const Vector f = test.linear_predictor(beta);
  const Index n = test.n();
  if (test.task == TaskKind::regression) {
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const double r = test.y[i] - f[i];
      sq[static_cast<std::size_t>(i)] = r * r;
    }
    double total = 0.0;
    for (double v : sq) total += v;
    rep.rmse = std::sqrt(total / static_cast<double>(n));
    std::sort(sq.begin(), sq.end());
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(trim_fraction * static_cast<double>(n) - 1e-9)));
    double kept = 0.0;
    for (std::size_t i = 0; i < keep; ++i) kept += sq[i];
    rep.trimmed_rmse = std::sqrt(kept / static_cast<double>(keep));
  } else if (test.task == TaskKind::classification || test.task == TaskKind::binomial) {
    Index wrong = 0;
    for (Index i = 0; i < n; ++i) {
      const bool pos = test.task == TaskKind::binomial ? f[i] >= 0.0 : f[i] >= 0.0;
      const bool truth = test.task == TaskKind::binomial ? test.y[i] == 1.0 : test.y[i] > 0.0;
      wrong += pos != truth;
    }
    rep.misclass_error = static_cast<double>(wrong) / static_cast<double>(n);
  }
  if (true_support) {
    const Index p = test.p();
    std::vector<bool> signal(static_cast<std::size_t>(p), false);
    for (Index j : *true_support) signal[static_cast<std::size_t>(j)] = true;
    Index n_signal = 0, hit = 0, n_noise = 0, excluded = 0;
    for (Index j = 0; j < p; ++j) {
      const bool selected = std::abs(beta[j + 1]) > 1e-8;
      if (signal[static_cast<std::size_t>(j)]) {
        ++n_signal;
        hit += selected;
      } else {
        ++n_noise;
        excluded += !selected;
      }
    }
    if (n_signal > 0) rep.sensitivity = static_cast<double>(hit) / static_cast<double>(n_signal);
    if (n_noise > 0) rep.specificity = static_cast<double>(excluded) / static_cast<double>(n_noise);
  }
  return rep;
}

namespace {

// d s(u(f)) / d f at linear predictor f.
double loss_slope(const ConvexSpec& s, const Dataset& d, Index i, double f) {
  const double y = d.y[i];
  switch (s.kind) {
    case ConvexKind::gaussian: return f - y;
    case ConvexKind::gaussianC: return -(1.0 - y * f) * y;
    case ConvexKind::binomial:
      if (d.task == TaskKind::binomial) return 1.0 / (1.0 + std::exp(-f)) - y;
      return -y / (1.0 + std::exp(y * f));
    case ConvexKind::poisson: return std::exp(std::clamp(f, -30.0, 30.0)) - y;
    case ConvexKind::hinge: return y * f < 1.0 ? -y : 0.0;
    case ConvexKind::epsInsensitive: {
      const double u = y - f;
      return std::abs(u) > s.epsilon ? (u > 0 ? -1.0 : 1.0) : 0.0;
    }
  }
  return 0.0;
}

}  // namespace

double lambda_max(const Dataset& data, const CompositeLoss& loss, double alpha) {
  const Index n = data.n();
  const Index p = data.p();
  const Vector zero = Vector::Zero(p + 1);
  const Vector z = convex_values(loss.convex, data, margins(zero, data));
  Vector w(n);
  for (Index i = 0; i < n; ++i) w[i] = weight(loss.concave, z[i]);
  if (!(w.sum() > 0.0)) w.setOnes();
  Vector null_beta = zero;
  if (data.intercept) {
    InnerProblem pr{data, w, loss.convex, PenaltySpec::make(PenaltyFamily::lasso, 1e300), zero, {}};
    null_beta = solve_weighted(pr).beta;
  }
  const Vector f = data.linear_predictor(null_beta);
  Vector slope(n);
  for (Index i = 0; i < n; ++i) slope[i] = w[i] * loss_slope(loss.convex, data, i, f[i]);
  const double g = (data.x.transpose() * slope).cwiseAbs().maxCoeff() / static_cast<double>(n);
  const double lm = g / std::max(alpha, 1e-3);
  return lm > 0.0 && std::isfinite(lm) ? lm : 1.0;
}

std::vector<double> lambda_grid(double lmax, int n, double ratio) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {lmax};
  const double a = std::log(lmax);
  const double b = std::log(lmax * ratio);
  for (int k = 0; k < n; ++k) out.push_back(std::exp(a + (b - a) * k / (n - 1)));
  return out;
}

std::uint64_t run_seed(std::uint64_t seed, int run) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(run) + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

TunedFit fit_tuned(const Dataset& train, const Dataset& tune, const CompositeLoss& loss,
                   const PenaltySpec& penalty, const FitConfig& config, int n_lambda) {
  const Standardizer scaler(train);
  const double lmax = lambda_max(scaler.transform(train), loss, penalty.alpha);
  TunedFit out;
  out.lambdas = lambda_grid(lmax, n_lambda);
  out.score = std::numeric_limits<double>::infinity();
  Vector warm;
  bool found = false;
  std::string last_error;
  for (double lambda : out.lambdas) {
    PenaltySpec pen = penalty;
    pen.lambda = lambda;
    FitConfig cfg = config;
    cfg.standardize = true;
    if (warm.size() > 0) {
      cfg.init = InitKind::userVector;
      cfg.init_beta = warm;
    } else if (!cfg.init) {
      cfg.init = InitKind::zeros;
    }
    try {
      FitResult res = fit(train, loss, pen, cfg);
      warm = res.beta;
      const double score = mean_composite_loss(res.beta, tune, loss);
      out.scores.push_back(score);
      if (score < out.score) {
        out.score = score;
        out.lambda = lambda;
        out.result = std::move(res);
        found = true;
      }
    } catch (const Error& e) {
      last_error = e.what();
      out.scores.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (!found) throw ConvergenceError("no lambda on the path succeeded: " + last_error, {});
  return out;
}

RunRecord evaluate_estimator(const EstimatorSpec& est, const Scenario& sc) {
  RunRecord rec;
  rec.estimator = est.name;
  const std::optional<std::vector<Index>> support =
      static_cast<Index>(sc.support.size()) < sc.train.p()
          ? std::optional<std::vector<Index>>(sc.support)
          : std::optional<std::vector<Index>>(std::nullopt);
  try {
    if (est.kind != EstimatorKind::composite) {
      rec.metrics = metrics(sc.beta_true, sc.test, support);
      return rec;
    }
    if (!est.tune_lambda) {
      const auto res = fit(sc.train, est.loss, est.penalty, est.config);
      rec.lambda = est.penalty.lambda;
      rec.metrics = metrics(res.beta, sc.test, support);
      return rec;
    }
    if (!sc.tune) throw ValidationError("lambda tuning needs a tuning sample");
    const auto tuned = fit_tuned(sc.train, *sc.tune, est.loss, est.penalty, est.config);
    rec.lambda = tuned.lambda;
    const Vector& best_beta = tuned.result.beta;
    rec.metrics = metrics(best_beta, sc.test, support);
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

namespace {

int worker_count(int requested, int runs) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("COCO_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
  }
  return std::max(1, std::min(n, runs));
}

void add_metric(std::vector<Aggregate>& out, const std::string& est, const std::string& scen,
                const std::string& name, const std::vector<double>& values) {
  if (values.empty()) return;
  Aggregate a{est, scen, name, 0.0, 0.0, static_cast<int>(values.size())};
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  out.push_back(a);
}

}  // namespace

McResult run_mc(const ScenarioSpec& scenario, const std::vector<EstimatorSpec>& estimators,
                int runs, int threads) {
  scenario.validate();
  if (runs < 1) throw ValidationError("runs must be >= 1");
  if (estimators.empty()) throw ValidationError("estimator list is empty");
  const std::size_t m = estimators.size();
  std::vector<RunRecord> records(static_cast<std::size_t>(runs) * m);

  std::atomic<int> next{0};
  auto work = [&]() {
    for (int r = next++; r < runs; r = next++) {
      ScenarioSpec spec = scenario;
      spec.seed = run_seed(scenario.seed, r);
      const Scenario sc = generate(spec);
      for (std::size_t e = 0; e < m; ++e) {
        RunRecord rec = evaluate_estimator(estimators[e], sc);
        rec.run = r;
        records[static_cast<std::size_t>(r) * m + e] = std::move(rec);
      }
    }
  };
  const int workers = worker_count(threads, runs);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  McResult out;
  const std::string label = scenario.label();
  for (std::size_t e = 0; e < m; ++e) {
    std::vector<double> rmse, trimmed, mis, sen, spc;
    int failed = 0;
    std::string first_error;
    for (int r = 0; r < runs; ++r) {
      const auto& rec = records[static_cast<std::size_t>(r) * m + e];
      if (rec.failed) {
        if (failed++ == 0) first_error = rec.error;
        continue;
      }
      if (rec.metrics.rmse) rmse.push_back(*rec.metrics.rmse);
      if (rec.metrics.trimmed_rmse) trimmed.push_back(*rec.metrics.trimmed_rmse);
      if (rec.metrics.misclass_error) mis.push_back(*rec.metrics.misclass_error);
      if (rec.metrics.sensitivity) sen.push_back(*rec.metrics.sensitivity);
      if (rec.metrics.specificity) spc.push_back(*rec.metrics.specificity);
    }
    if (failed > 0 && 5 * failed > runs) {
      throw ConvergenceError(estimators[e].name + ": " + std::to_string(failed) + " of " +
                                 std::to_string(runs) + " runs failed (first: " + first_error + ")",
                             {});
    }
    const std::string& name = estimators[e].name;
    add_metric(out.aggregates, name, label, "rmse", rmse);
    add_metric(out.aggregates, name, label, "trimmed_rmse", trimmed);
    add_metric(out.aggregates, name, label, "misclass_error", mis);
    add_metric(out.aggregates, name, label, "sensitivity", sen);
    add_metric(out.aggregates, name, label, "specificity", spc);
  }
  out.records = std::move(records);
  return out;
}

void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& rows) {
  out << "estimator,scenario,metric,mean,sd,runs\n";
  out.precision(10);
  for (const auto& a : rows) {
    out << '"' << a.estimator << "\"," << a.scenario << ',' << a.metric << ',' << a.mean << ','
        << a.sd << ',' << a.runs << '\n';
  }
}

void write_aggregates_json(std::ostream& out, const std::vector<Aggregate>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : rows) {
    arr.push_back({{"estimator", a.estimator},
                   {"scenario", a.scenario},
                   {"metric", a.metric},
                   {"mean", a.mean},
                   {"sd", a.sd},
                   {"runs", a.runs}});
  }
  out << arr.dump(2) << '\n';
}

}  // namespace ccest
