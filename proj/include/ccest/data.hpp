#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ccest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// How the margin u_i is formed from the linear predictor f_i.
///   regression      u = y - f
///   classification  u = y f,  y in {-1, +1}
///   binomial        u = f,    y in {0, 1}
///   poisson         u = f,    y a nonnegative count
enum class TaskKind { regression, classification, binomial, poisson };

std::string_view to_string(TaskKind task);
TaskKind parse_task(std::string_view name);

/// Design plus response. The intercept column of ones is implicit: `x` holds
/// the p predictors and the coefficient vector always has length p + 1 with
/// beta[0] the intercept. When `intercept` is false beta[0] is pinned at 0.
struct Dataset {
  Matrix x;
  Vector y;
  TaskKind task = TaskKind::regression;
  bool intercept = true;
  std::vector<std::string> names;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }

  /// f = beta0 * 1 + X beta[1:p].
  Vector linear_predictor(const Vector& beta) const;

  /// Throws ValidationError when labels do not fit the task.
  void validate() const;

  /// Rows `keep` (in order) of this dataset.
  Dataset subset(const std::vector<Index>& keep) const;
};

/// Builds and validates a dataset; default predictor names are x1..xp.
Dataset make_dataset(Matrix x, Vector y, TaskKind task, bool intercept = true,
                     std::vector<std::string> names = {});

/// Comma-separated file with a header row. `response` names the y column;
/// every other column becomes a predictor. Throws ParseError with the line.
Dataset read_csv(std::istream& in, const std::string& response, TaskKind task,
                 bool intercept = true);
Dataset read_csv_file(const std::string& path, const std::string& response,
                      TaskKind task, bool intercept = true);
void write_csv(std::ostream& out, const Dataset& data,
               const std::string& response = "y");

/// Column centring/scaling estimated once from unweighted training rows.
/// Columns are centred only when the model has an intercept.
class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const Dataset& data);

  Dataset transform(const Dataset& data) const;
  /// Maps coefficients fitted on transformed predictors back to raw scale.
  Vector to_raw(const Vector& beta_std) const;
  /// Inverse of to_raw.
  Vector to_standardized(const Vector& beta_raw) const;

  const Vector& center() const { return center_; }
  const Vector& scale() const { return scale_; }

 private:
  Vector center_;
  Vector scale_;
};

}  // namespace ccest
