#include "ccest/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ccest/diagnostics.hpp"
#include "ccest/error.hpp"

namespace ccest::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::fit: return "fit";
    case Command::simulate: return "simulate";
    case Command::diagnose: return "diagnose";
    case Command::weights: return "weights";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  if (name == "fit") return Command::fit;
  if (name == "simulate") return Command::simulate;
  if (name == "diagnose") return Command::diagnose;
  if (name == "weights") return Command::weights;
  throw ArgumentError("unknown command '" + std::string(name) +
                      "' (valid: fit, simulate, diagnose, weights)");
}

namespace {

// ---- json helpers ----------------------------------------------------------

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) {
    return number_or_inf(*v);
  } else {
    return *v;
  }
}

[[noreturn]] void bad_type(const std::string& key, const char* expected) {
  throw ValidationError("config key '" + key + "': expected " + expected);
}

double get_double(const std::string& key, const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  bad_type(key, "a number");
}

template <class I>
I get_int(const std::string& key, const json& v) {
  if (v.is_number_integer()) {
    if constexpr (std::is_unsigned_v<I>) {
      if (v.is_number_unsigned()) return v.get<I>();
      if (v.get<std::int64_t>() >= 0) return static_cast<I>(v.get<std::int64_t>());
      bad_type(key, "a nonnegative integer");
    } else {
      return v.get<I>();
    }
  }
  bad_type(key, "an integer");
}

std::string get_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad_type(key, "a string");
  return v.get<std::string>();
}

bool get_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad_type(key, "true or false");
  return v.get<bool>();
}

template <class T, class F>
std::optional<T> get_opt(const json& v, F&& f) {
  if (v.is_null()) return std::nullopt;
  return f(v);
}

using Setter = std::function<void(RunConfig&, const std::string&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["command"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.command = parse_command(get_string(k, v));
    };
    t["input"] = [](RunConfig& c, const std::string& k, const json& v) { c.input = get_string(k, v); };
    t["tune_input"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.tune_input = get_string(k, v);
    };
    t["output"] = [](RunConfig& c, const std::string& k, const json& v) { c.output = get_string(k, v); };
    t["response"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.response = get_string(k, v);
    };
    t["task"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.task = parse_task(get_string(k, v));
    };
    t["intercept"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.intercept = get_bool(k, v);
    };
    t["concave"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.concave = parse_concave(get_string(k, v));
    };
    t["sigma"] = [](RunConfig& c, const std::string& k, const json& v) { c.sigma = get_double(k, v); };
    t["delta"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.delta = get_opt<double>(v, [&](const json& x) { return get_double(k, x); });
    };
    t["convex"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.convex = parse_convex(get_string(k, v));
    };
    t["epsilon"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.epsilon = get_opt<double>(v, [&](const json& x) { return get_double(k, x); });
    };
    t["penalty"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.penalty = parse_penalty(get_string(k, v));
    };
    t["lambda"] = [](RunConfig& c, const std::string& k, const json& v) {
      if (v.is_string() && v.get<std::string>() == "tune") {
        c.lambda = std::nullopt;
      } else if (v.is_number()) {
        c.lambda = v.get<double>();
      } else {
        bad_type(k, "a number or \"tune\"");
      }
    };
    t["alpha"] = [](RunConfig& c, const std::string& k, const json& v) { c.alpha = get_double(k, v); };
    t["scad_a"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.scad_a = get_double(k, v);
    };
    t["algorithm"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.algorithm = parse_algorithm(get_string(k, v));
    };
    t["h"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.h = get_opt<Index>(v, [&](const json& x) { return get_int<Index>(k, x); });
    };
    t["outer_tol"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.outer_tol = get_double(k, v);
    };
    t["max_outer"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.max_outer = get_int<int>(k, v);
    };
    t["init"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.init = get_opt<InitKind>(v, [&](const json& x) { return parse_init(get_string(k, x)); });
    };
    t["standardize"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.standardize = get_opt<bool>(v, [&](const json& x) { return get_bool(k, x); });
    };
    t["scenario"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.scenario = parse_example(get_string(k, v));
    };
    t["contamination"] = [](RunConfig& c, const std::string& k, const json& v) {
      const auto s = get_string(k, v);
      c.contamination = s == "all" ? std::nullopt : std::optional(parse_contamination(s));
    };
    t["flip"] = [](RunConfig& c, const std::string& k, const json& v) { c.flip = get_double(k, v); };
    t["seed"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.seed = get_int<std::uint64_t>(k, v);
    };
    t["runs"] = [](RunConfig& c, const std::string& k, const json& v) { c.runs = get_int<int>(k, v); };
    t["threads"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.threads = get_int<int>(k, v);
    };
    t["estimators"] = [](RunConfig& c, const std::string& k, const json& v) {
      if (!v.is_array()) bad_type(k, "an array of names");
      c.estimators.clear();
      for (const auto& e : v) c.estimators.push_back(get_string(k, e));
    };
    t["n_train"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.n_train = get_opt<Index>(v, [&](const json& x) { return get_int<Index>(k, x); });
    };
    t["n_tune"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.n_tune = get_opt<Index>(v, [&](const json& x) { return get_int<Index>(k, x); });
    };
    t["n_test"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.n_test = get_opt<Index>(v, [&](const json& x) { return get_int<Index>(k, x); });
    };
    t["export_data"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.export_data = get_bool(k, v);
    };
    t["check"] = [](RunConfig& c, const std::string& k, const json& v) { c.check = get_string(k, v); };
    t["grid_min"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.grid_min = get_opt<double>(v, [&](const json& x) { return get_double(k, x); });
    };
    t["grid_max"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.grid_max = get_opt<double>(v, [&](const json& x) { return get_double(k, x); });
    };
    t["grid_points"] = [](RunConfig& c, const std::string& k, const json& v) {
      c.grid_points = get_opt<int>(v, [&](const json& x) { return get_int<int>(k, x); });
    };
    return t;
  }();
  return table;
}

void check_keys(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!setters().count(key)) throw ValidationError("unknown config key '" + key + "'");
  }
}

// ---- output helpers --------------------------------------------------------

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f.precision(17);
  return f;
}

fs::path output_dir(const RunConfig& c) {
  const fs::path dir(c.output.empty() ? "." : c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_json_file(const fs::path& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

CompositeLoss make_loss(const RunConfig& c) {
  return {ConcaveSpec::make(c.concave, c.sigma, c.delta), ConvexSpec::make(c.convex, c.epsilon)};
}

std::vector<std::string> coefficient_names(const Dataset& d) {
  std::vector<std::string> names;
  if (d.intercept) names.emplace_back("(Intercept)");
  for (const auto& n : d.names) names.push_back(n);
  return names;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::vector<double> grid_or(const RunConfig& c, double lo, double hi, int n) {
  return linspace(c.grid_min.value_or(lo), c.grid_max.value_or(hi), c.grid_points.value_or(n));
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

// ---- config ----------------------------------------------------------------

json to_json(const RunConfig& c) {
  json j;
  j["command"] = std::string(to_string(c.command));
  j["input"] = c.input;
  j["tune_input"] = c.tune_input;
  j["output"] = c.output;
  j["response"] = c.response;
  j["task"] = std::string(to_string(c.task));
  j["intercept"] = c.intercept;
  j["concave"] = std::string(to_string(c.concave));
  j["sigma"] = number_or_inf(c.sigma);
  j["delta"] = opt(c.delta);
  j["convex"] = std::string(to_string(c.convex));
  j["epsilon"] = opt(c.epsilon);
  j["penalty"] = std::string(to_string(c.penalty));
  j["lambda"] = c.lambda ? json(*c.lambda) : json("tune");
  j["alpha"] = number_or_inf(c.alpha);
  j["scad_a"] = number_or_inf(c.scad_a);
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["h"] = opt(c.h);
  j["outer_tol"] = c.outer_tol;
  j["max_outer"] = c.max_outer;
  j["init"] = c.init ? json(std::string(to_string(*c.init))) : json(nullptr);
  j["standardize"] = opt(c.standardize);
  j["scenario"] = std::string(to_string(c.scenario));
  j["contamination"] = c.contamination ? std::string(to_string(*c.contamination)) : "all";
  j["flip"] = c.flip;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["threads"] = c.threads;
  j["estimators"] = c.estimators;
  j["n_train"] = opt(c.n_train);
  j["n_tune"] = opt(c.n_tune);
  j["n_test"] = opt(c.n_test);
  j["export_data"] = c.export_data;
  j["check"] = c.check;
  j["grid_min"] = opt(c.grid_min);
  j["grid_max"] = opt(c.grid_max);
  j["grid_points"] = opt(c.grid_points);
  return j;
}

RunConfig from_json(const json& j) {
  check_keys(j);
  RunConfig c;
  for (const auto& [key, value] : j.items()) setters().at(key)(c, key, value);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError("config file '" + path + "' is not valid JSON: " + e.what(), 0);
  }
  return from_json(j);
}

// ---- fit -------------------------------------------------------------------

int cmd_fit(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw ArgumentError("fit needs --input");
  const Dataset data = read_csv_file(c.input, c.response, c.task, c.intercept);
  const CompositeLoss loss = make_loss(c);
  PenaltySpec pen;
  pen.family = c.penalty;
  pen.lambda = c.lambda.value_or(0.0);
  pen.alpha = c.alpha;
  pen.scad_a = c.scad_a;
  FitConfig fc;
  fc.algorithm = c.algorithm;
  fc.trim_h = c.h;
  fc.outer_tol = c.outer_tol;
  fc.max_outer = c.max_outer;
  fc.init = c.init;
  fc.standardize = c.standardize;

  FitResult res;
  json tuning = nullptr;
  if (!c.lambda) {
    if (c.tune_input.empty()) throw ArgumentError("lambda \"tune\" needs --tune-input");
    const Dataset tune = read_csv_file(c.tune_input, c.response, c.task, c.intercept);
    auto tuned = fit_tuned(data, tune, loss, pen, fc);
    pen.lambda = tuned.lambda;
    tuning = {{"lambda", tuned.lambdas}, {"score", tuned.scores}, {"chosen", tuned.lambda}};
    res = std::move(tuned.result);
  } else {
    res = fit(data, loss, pen, fc);
  }

  const fs::path dir = output_dir(c);
  const auto names = coefficient_names(data);
  {
    auto f = open_out(dir / "coefficients.csv");
    f << "name,estimate\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      f << quoted(names[i]) << ',' << res.beta[static_cast<Index>(i)] << '\n';
    }
  }
  {
    auto f = open_out(dir / "weights.csv");
    f << "row_id,z,v,weight\n";
    for (Index i = 0; i < res.z.size(); ++i) {
      f << (i + 1) << ',' << res.z[i] << ',' << res.dual_v[i] << ',' << 0.0 - res.dual_v[i] << '\n';
    }
  }
  json coef = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) coef[names[i]] = res.beta[static_cast<Index>(i)];
  json report;
  report["config"] = to_json(c);
  report["loss"] = describe(loss);
  report["n"] = data.n();
  report["p"] = data.p();
  report["lambda"] = pen.lambda;
  report["tuning"] = tuning;
  report["objective_trace"] = res.objective_trace;
  report["iterations"] = res.outer_iters;
  report["converged"] = res.converged;
  report["inner_warning"] = res.inner_warning;
  report["coefficients"] = coef;
  write_json_file(dir / "report.json", report);

  out << describe(loss) << ": " << res.outer_iters << " outer iterations, "
      << (res.converged ? "converged" : "NOT converged") << ", objective "
      << (res.objective_trace.empty() ? std::nan("") : res.objective_trace.back()) << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << "  " << std::left << std::setw(14) << names[i] << ' ' << res.beta[static_cast<Index>(i)]
        << '\n';
  }
  return res.converged ? kOk : kConvergence;
}

// ---- simulate --------------------------------------------------------------

namespace {

std::vector<ScenarioSpec> scenario_specs(const RunConfig& c) {
  std::vector<ScenarioSpec> specs;
  auto base = ScenarioSpec::defaults(c.scenario);
  base.seed = c.seed;
  if (c.n_train) base.n_train = *c.n_train;
  if (c.n_tune) base.n_tune = *c.n_tune;
  if (c.n_test) base.n_test = *c.n_test;
  if (c.scenario == Example::ex3) {
    if (c.contamination && *c.contamination != Contamination::none) {
      throw ValidationError("ex3 is contaminated through --flip");
    }
    base.flip_pct = c.flip;
    specs.push_back(base);
  } else {
    if (c.flip != 0.0) throw ValidationError("--flip only applies to ex3");
    if (c.contamination) {
      base.contamination = *c.contamination;
      specs.push_back(base);
    } else {
      for (Contamination k :
           {Contamination::none, Contamination::vertical, Contamination::verticalLeverage}) {
        base.contamination = k;
        specs.push_back(base);
      }
    }
  }
  for (const auto& s : specs) s.validate();
  return specs;
}

std::vector<EstimatorSpec> selected_estimators(const RunConfig& c) {
  auto all = benchmark_estimators(c.scenario);
  if (c.estimators.empty()) return all;
  std::vector<EstimatorSpec> out;
  for (const auto& name : c.estimators) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.name == name; });
    if (it == all.end()) {
      std::string valid;
      for (const auto& e : all) valid += (valid.empty() ? "" : ", ") + e.name;
      throw ArgumentError("unknown estimator '" + name + "' (valid: " + valid + ")");
    }
    out.push_back(*it);
  }
  return out;
}

void export_scenarios(const std::vector<ScenarioSpec>& specs, const fs::path& dir,
                      std::ostream& out) {
  for (const auto& s : specs) {
    const Scenario sc = generate(s);
    auto write = [&](const Dataset& d, const std::string& part) {
      const fs::path path = dir / (s.label() + "-" + part + ".csv");
      auto f = open_out(path);
      write_csv(f, d);
      out << "wrote " << path.string() << '\n';
    };
    write(sc.train, "train");
    if (sc.tune) write(*sc.tune, "tune");
    write(sc.test, "test");
  }
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.runs < 1) throw ValidationError("--runs must be >= 1");
  const auto specs = scenario_specs(c);
  const fs::path dir = output_dir(c);
  if (c.export_data) {
    export_scenarios(specs, dir, out);
    return kOk;
  }
  const auto estimators = selected_estimators(c);

  std::vector<Aggregate> all;
  std::vector<std::string> labels;
  for (const auto& s : specs) {
    auto res = run_mc(s, estimators, c.runs, c.threads);
    all.insert(all.end(), res.aggregates.begin(), res.aggregates.end());
    labels.push_back(s.label());
  }

  {
    auto f = open_out(dir / "aggregates.csv");
    write_aggregates_csv(f, all);
  }
  {
    auto f = open_out(dir / "aggregates.json");
    write_aggregates_json(f, all);
  }

  // Wide table: one row per estimator, mean and sd per scenario and metric.
  std::vector<std::pair<std::string, std::string>> columns;
  for (const auto& label : labels) {
    for (const auto& a : all) {
      if (a.scenario != label) continue;
      const std::pair<std::string, std::string> col{label, a.metric};
      if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    }
  }
  auto find = [&](const std::string& est, const std::pair<std::string, std::string>& col)
      -> const Aggregate* {
    for (const auto& a : all)
      if (a.estimator == est && a.scenario == col.first && a.metric == col.second) return &a;
    return nullptr;
  };
  {
    auto f = open_out(dir / "table.csv");
    f << "estimator";
    for (const auto& [label, metric] : columns) f << ',' << label << ':' << metric << ','
                                                  << label << ':' << metric << "_sd";
    f << '\n';
    for (const auto& e : estimators) {
      f << quoted(e.name);
      for (const auto& col : columns) {
        const Aggregate* a = find(e.name, col);
        if (a) {
          f << ',' << a->mean << ',' << a->sd;
        } else {
          f << ",,";
        }
      }
      f << '\n';
    }
  }
  json report;
  report["config"] = to_json(c);
  report["scenarios"] = labels;
  json names = json::array();
  for (const auto& e : estimators) names.push_back(e.name);
  report["estimators"] = names;
  write_json_file(dir / "report.json", report);

  std::size_t width = 9;
  for (const auto& e : estimators) width = std::max(width, e.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "estimator";
  for (const auto& [label, metric] : columns) {
    out << "  " << std::setw(24) << (label + " " + metric);
  }
  out << '\n';
  for (const auto& e : estimators) {
    out << std::setw(static_cast<int>(width)) << e.name;
    for (const auto& col : columns) {
      const Aggregate* a = find(e.name, col);
      out << "  " << std::setw(24) << (a ? fmt3(a->mean) + " (" + fmt3(a->sd) + ")" : "-");
    }
    out << '\n';
  }
  return kOk;
}

// ---- diagnose / weights ----------------------------------------------------

int cmd_diagnose(const RunConfig& c, std::ostream& out) {
  const fs::path dir = output_dir(c);
  json report;
  report["config"] = to_json(c);
  report["check"] = c.check;

  if (c.check == "concavity") {
    const CompositeLoss loss = make_loss(c);
    const auto rep = check_concavity(loss, grid_or(c, -5.0, 5.0, 1001));
    report["loss"] = describe(loss);
    report["max_violation"] = rep.max_violation;
    report["pass"] = rep.max_violation <= 1e-6;
    report["points"] = rep.points.size();
    report["excluded"] = rep.excluded;
    auto f = open_out(dir / "concavity.csv");
    f << "u,lhs,rhs\n";
    for (const auto& p : rep.points) f << p.u << ',' << p.lhs << ',' << p.rhs << '\n';
  } else if (c.check == "fisher") {
    const CompositeLoss loss = make_loss(c);
    std::vector<double> ps;
    for (int i = 1; i <= 9; ++i) ps.push_back(i / 10.0);
    const auto rep = check_fisher(loss, ps);
    report["loss"] = describe(loss);
    report["coverage"] = std::string(to_string(rep.coverage));
    report["all_signs_match"] = rep.all_signs_match;
    json pts = json::array();
    auto f = open_out(dir / "fisher.csv");
    f << "p,argmin,sign_matches\n";
    for (const auto& p : rep.points) {
      pts.push_back({{"p", p.p}, {"argmin", p.argmin}, {"sign_matches", p.sign_matches}});
      f << p.p << ',' << p.argmin << ',' << (p.sign_matches ? "true" : "false") << '\n';
    }
    report["points"] = pts;
  } else if (c.check == "conjugate") {
    if (c.concave != ConcaveKind::tcave) {
      throw ValidationError("the conjugate check is defined for tcave only");
    }
    if (!(c.sigma > 0.0 && std::isfinite(c.sigma))) {
      throw ValidationError("the conjugate check needs a finite sigma > 0");
    }
    const auto rep = check_tcave_biconjugate(c.sigma, grid_or(c, 0.0, 4.0 * c.sigma, 100));
    report["sigma"] = c.sigma;
    report["max_error"] = rep.max_error;
    report["optimizer_matches"] = rep.optimizer_matches;
    report["pass"] = rep.max_error <= 1e-12 && rep.optimizer_matches;
  } else if (c.check == "ara") {
    const ConvexSpec s = ConvexSpec::make(c.convex, c.epsilon);
    const auto curve = ara_curve(s, grid_or(c, -5.0, 5.0, 201));
    report["component"] = curve.component;
    report["points"] = curve.points.size();
    auto f = open_out(dir / "ara.csv");
    write_curves_csv(f, {curve});
  } else if (c.check == "composite") {
    const CompositeLoss loss = make_loss(c);
    const auto curve = composite_curve(loss, grid_or(c, -5.0, 5.0, 201), true);
    report["loss"] = describe(loss);
    report["points"] = curve.points.size();
    auto f = open_out(dir / "composite.csv");
    write_curves_csv(f, {curve});
  } else {
    throw ArgumentError("unknown check '" + c.check +
                        "' (valid: concavity, fisher, conjugate, ara, composite)");
  }
  write_json_file(dir / "diagnose.json", report);
  json shown = report;
  shown.erase("config");
  out << shown.dump(2) << '\n';
  return kOk;
}

int cmd_weights(const RunConfig& c, std::ostream& out) {
  const ConcaveSpec g = ConcaveSpec::make(c.concave, c.sigma, c.delta);
  const double hi = std::isfinite(c.sigma) && c.sigma > 0.0 ? 3.0 * c.sigma : 5.0;
  const auto curve = weight_curve(g, grid_or(c, 0.0, hi, 31));
  const fs::path dir = output_dir(c);
  {
    auto f = open_out(dir / "weight_curve.csv");
    write_curves_csv(f, {curve});
  }
  out << "# " << describe(g) << '\n' << "z,weight\n";
  out.precision(10);
  for (const auto& p : curve.points) out << p.x << ',' << p.value << '\n';
  return kOk;
}

// ---- argument parsing ------------------------------------------------------

namespace {

enum class Kind { text, number, integer, list };

struct FlagSpec {
  const char* flag;
  const char* key;
  Kind kind;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--input", "input", Kind::text, "training CSV (fit)"},
    {"--tune-input", "tune_input", Kind::text, "tuning CSV for --lambda tune (fit)"},
    {"--output,-o", "output", Kind::text, "output directory"},
    {"--response", "response", Kind::text, "response column name"},
    {"--task", "task", Kind::text, "regression, classification, binomial or poisson"},
    {"--concave", "concave", Kind::text, "concave component"},
    {"--sigma", "sigma", Kind::number, "concave shape parameter (inf allowed for tcave, hcave)"},
    {"--delta", "delta", Kind::number, "ecave / gcave smoothing parameter"},
    {"--convex", "convex", Kind::text, "convex component"},
    {"--epsilon", "epsilon", Kind::number, "tube half-width of epsInsensitive"},
    {"--penalty", "penalty", Kind::text, "lasso or scad"},
    {"--lambda", "lambda", Kind::number, "penalty level, or tune"},
    {"--alpha", "alpha", Kind::number, "L1 share of the penalty"},
    {"--scad-a", "scad_a", Kind::number, "SCAD shape a"},
    {"--algorithm", "algorithm", Kind::text, "coco, cocots or cocotv"},
    {"--h", "h", Kind::integer, "rows kept by cocotv"},
    {"--outer-tol", "outer_tol", Kind::number, "relative objective tolerance"},
    {"--max-outer", "max_outer", Kind::integer, "outer iteration cap"},
    {"--init", "init", Kind::text, "zeros or leastSquaresFit"},
    {"--scenario", "scenario", Kind::text, "ex1, ex2 or ex3"},
    {"--contamination", "contamination", Kind::text, "none, vertical, verticalLeverage or all"},
    {"--flip", "flip", Kind::number, "label flip fraction (ex3)"},
    {"--seed", "seed", Kind::integer, "scenario seed"},
    {"--runs", "runs", Kind::integer, "Monte Carlo runs"},
    {"--threads", "threads", Kind::integer, "worker threads (0: automatic)"},
    {"--estimators", "estimators", Kind::list, "comma-separated estimator names"},
    {"--n-train", "n_train", Kind::integer, "training sample size"},
    {"--n-tune", "n_tune", Kind::integer, "tuning sample size"},
    {"--n-test", "n_test", Kind::integer, "test sample size"},
    {"--check", "check", Kind::text, "concavity, fisher, conjugate, ara or composite"},
    {"--grid-min", "grid_min", Kind::number, "grid start"},
    {"--grid-max", "grid_max", Kind::number, "grid end"},
    {"--grid-points", "grid_points", Kind::integer, "grid size"},
};

json flag_value(const FlagSpec& f, const std::string& raw) {
  switch (f.kind) {
    case Kind::text: return raw;
    case Kind::number: {
      if (raw == "inf" || raw == "tune") return raw;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw ValidationError(std::string(f.flag) + ": '" + raw + "' is not a number");
      }
      return v;
    }
    case Kind::integer: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw ValidationError(std::string(f.flag) + ": '" + raw + "' is not an integer");
      }
      return v;
    }
    case Kind::list: {
      json arr = json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) arr.push_back(item);
      }
      return arr;
    }
  }
  return raw;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite-loss robust estimation", "ccest"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(0, 1);
  std::string config_path;
  json flags = json::object();
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  // Raw flag values are collected as strings and typed after parsing so that
  // conversion errors map onto the exit-code contract.
  std::vector<std::pair<const FlagSpec*, std::string>> raw;
  for (const auto& f : kFlags) {
    app.add_option_function<std::string>(
        f.flag, [&raw, &f](const std::string& v) { raw.emplace_back(&f, v); }, f.help);
  }
  app.add_option_function<std::string>(
      "--loss",
      [&flags](const std::string& v) {
        const auto dash = v.find('-');
        flags["concave"] = v.substr(0, dash);
        if (dash != std::string::npos) flags["convex"] = v.substr(dash + 1);
      },
      "concave component, or concave-convex (e.g. ccave-gaussian)");
  app.add_flag_callback("--no-intercept", [&flags] { flags["intercept"] = false; },
                        "fit without an intercept");
  app.add_flag_callback("--standardize", [&flags] { flags["standardize"] = true; },
                        "standardize predictors internally");
  app.add_flag_callback("--no-standardize", [&flags] { flags["standardize"] = false; },
                        "do not standardize predictors");
  app.add_flag_callback("--export-data", [&flags] { flags["export_data"] = true; },
                        "simulate: write the generated datasets and stop");
  const std::pair<const char*, const char*> subcommands[] = {
      {"fit", "fit a composite-loss model to a CSV file"},
      {"simulate", "Monte Carlo benchmark of the built-in designs"},
      {"diagnose", "numerical checks and curves for a loss"},
      {"weights", "observation weight as a function of the convex loss"},
  };
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->set_help_flag("--help", "print this help");
    sub->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    for (const auto& [spec, value] : raw) flags[spec->key] = flag_value(*spec, value);
    json merged = to_json(RunConfig{});
    bool have_command = false;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw IoError("cannot open config file '" + config_path + "'");
      json file;
      try {
        file = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ParseError("config file '" + config_path + "' is not valid JSON: " + e.what(), 0);
      }
      check_keys(file);
      have_command = file.contains("command");
      for (const auto& [k, v] : file.items()) merged[k] = v;
    }
    for (const auto& [k, v] : flags.items()) merged[k] = v;
    for (auto* sub : app.get_subcommands()) {
      merged["command"] = sub->get_name();
      have_command = true;
    }
    if (!have_command) {
      err << app.help();
      throw ArgumentError("no command given (fit, simulate, diagnose, weights)");
    }
    const RunConfig config = from_json(merged);
    switch (config.command) {
      case Command::fit: return cmd_fit(config, out);
      case Command::simulate: return cmd_simulate(config, out);
      case Command::diagnose: return cmd_diagnose(config, out);
      case Command::weights: return cmd_weights(config, out);
    }
    return kValidation;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << '\n';
    return kConvergence;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const DegenerateError& e) {
    err << "degenerate problem: " << e.what() << '\n';
    return kValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace ccest::cli
