#pragma once

// Command-line front end: fit, simulate, diagnose, weights.
//
// Every flag maps to a config key of the same name (dashes become
// underscores). Values come from, in increasing precedence: built-in
// defaults, the JSON file given by --config, and flags.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccest/coco.hpp"
#include "ccest/sim.hpp"

namespace ccest::cli {

enum class Command { fit, simulate, diagnose, weights };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kConvergence = 3 };

struct RunConfig {
  Command command = Command::fit;

  std::string input;
  /// Tuning sample for lambda = "tune".
  std::string tune_input;
  std::string output = ".";
  std::string response = "y";
  TaskKind task = TaskKind::regression;
  bool intercept = true;

  ConcaveKind concave = ConcaveKind::ccave;
  double sigma = 1.0;
  std::optional<double> delta;
  ConvexKind convex = ConvexKind::gaussian;
  std::optional<double> epsilon;

  PenaltyFamily penalty = PenaltyFamily::lasso;
  /// nullopt means "tune".
  std::optional<double> lambda = 0.0;
  double alpha = 1.0;
  double scad_a = 3.7;

  Algorithm algorithm = Algorithm::coco;
  std::optional<Index> h;
  double outer_tol = 1e-6;
  int max_outer = 200;
  std::optional<InitKind> init;
  std::optional<bool> standardize;

  Example scenario = Example::ex1;
  /// nullopt runs none, vertical and verticalLeverage in turn (ex1, ex2).
  std::optional<Contamination> contamination;
  double flip = 0.0;
  std::uint64_t seed = 1;
  int runs = 100;
  int threads = 0;
  /// Subset of the benchmark estimator names; empty means all.
  std::vector<std::string> estimators;
  std::optional<Index> n_train;
  std::optional<Index> n_tune;
  std::optional<Index> n_test;
  /// Write the generated datasets instead of running the simulation.
  bool export_data = false;

  /// concavity, fisher, conjugate, ara or composite.
  std::string check = "concavity";
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<int> grid_points;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
/// Missing keys keep their defaults. Unknown keys throw ValidationError
/// naming the key; ill-typed values throw ValidationError too.
RunConfig from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Parses argv-style arguments (without the program name) and runs the
/// command. Returns the exit code; messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_fit(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_diagnose(const RunConfig& config, std::ostream& out);
int cmd_weights(const RunConfig& config, std::ostream& out);

}  // namespace ccest::cli
