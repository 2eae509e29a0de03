#include "ccest/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ccest/error.hpp"

namespace ccest {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::regression: return "regression";
    case TaskKind::classification: return "classification";
    case TaskKind::binomial: return "binomial";
    case TaskKind::poisson: return "poisson";
  }
  return "?";
}

TaskKind parse_task(std::string_view name) {
  if (name == "regression") return TaskKind::regression;
  if (name == "classification") return TaskKind::classification;
  if (name == "binomial") return TaskKind::binomial;
  if (name == "poisson") return TaskKind::poisson;
  throw ArgumentError("unknown task '" + std::string(name) +
                      "' (valid: regression, classification, binomial, poisson)");
}

Vector Dataset::linear_predictor(const Vector& beta) const {
  if (beta.size() != p() + 1) {
    throw ValidationError("coefficient vector has length " +
                          std::to_string(beta.size()) + ", expected p+1 = " +
                          std::to_string(p() + 1));
  }
  Vector f = x * beta.tail(p());
  if (intercept) f.array() += beta[0];
  return f;
}

void Dataset::validate() const {
  if (y.size() != x.rows()) {
    throw ValidationError("response length " + std::to_string(y.size()) +
                          " does not match " + std::to_string(x.rows()) + " rows");
  }
  if (!names.empty() && static_cast<Index>(names.size()) != p()) {
    throw ValidationError("predictor name count does not match columns");
  }
  for (Index i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    if (!std::isfinite(yi)) {
      throw ValidationError("non-finite response at row " + std::to_string(i + 1));
    }
    switch (task) {
      case TaskKind::regression: break;
      case TaskKind::classification:
        if (yi != 1.0 && yi != -1.0) {
          throw ValidationError("classification labels must be -1 or +1; row " +
                                std::to_string(i + 1) + " has " + std::to_string(yi));
        }
        break;
      case TaskKind::binomial:
        if (yi != 0.0 && yi != 1.0) {
          throw ValidationError("binomial responses must be 0 or 1; row " +
                                std::to_string(i + 1) + " has " + std::to_string(yi));
        }
        break;
      case TaskKind::poisson:
        if (yi < 0.0 || yi != std::floor(yi)) {
          throw ValidationError("poisson responses must be nonnegative integers; row " +
                                std::to_string(i + 1) + " has " + std::to_string(yi));
        }
        break;
    }
  }
}

Dataset Dataset::subset(const std::vector<Index>& keep) const {
  Dataset out;
  out.task = task;
  out.intercept = intercept;
  out.names = names;
  out.x.resize(static_cast<Index>(keep.size()), p());
  out.y.resize(static_cast<Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.x.row(static_cast<Index>(r)) = x.row(keep[r]);
    out.y[static_cast<Index>(r)] = y[keep[r]];
  }
  return out;
}

Dataset make_dataset(Matrix x, Vector y, TaskKind task, bool intercept,
                     std::vector<std::string> names) {
  Dataset d;
  if (names.empty()) {
    for (Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  d.x = std::move(x);
  d.y = std::move(y);
  d.task = task;
  d.intercept = intercept;
  d.names = std::move(names);
  d.validate();
  return d;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos
                                              ? std::string_view::npos
                                              : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("not a number: '" + std::string(field) + "'", line);
  }
  return value;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& response, TaskKind task,
                 bool intercept) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view view = line;
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") {
      view.remove_prefix(3);
    }
    for (auto f : split(view)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw ParseError("missing header row", line_no);

  std::size_t response_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw ParseError("empty column name", line_no);
    if (header[c] == response) response_col = c;
  }
  if (response_col == header.size()) {
    throw ParseError("response column '" + response + "' not found in header", line_no);
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response_col) names.push_back(header[c]);
  }

  std::vector<double> values;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], line_no);
      if (c == response_col) {
        ys.push_back(v);
      } else {
        values.push_back(v);
      }
    }
  }

  const auto n = static_cast<Index>(ys.size());
  const auto p = static_cast<Index>(names.size());
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) x(i, j) = values[static_cast<std::size_t>(i * p + j)];
  }
  Vector y = Eigen::Map<Vector>(ys.data(), n);
  return make_dataset(std::move(x), std::move(y), task, intercept, std::move(names));
}

Dataset read_csv_file(const std::string& path, const std::string& response,
                      TaskKind task, bool intercept) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in, response, task, intercept);
}

void write_csv(std::ostream& out, const Dataset& data, const std::string& response) {
  out << std::setprecision(17);
  for (Index j = 0; j < data.p(); ++j) {
    out << (data.names.empty() ? "x" + std::to_string(j + 1) : data.names[j]) << ',';
  }
  out << response << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) out << data.x(i, j) << ',';
    out << data.y[i] << '\n';
  }
}

Standardizer::Standardizer(const Dataset& data)
    : center_(Vector::Zero(data.p())), scale_(Vector::Ones(data.p())) {
  const auto n = static_cast<double>(data.n());
  if (data.n() == 0) return;
  for (Index j = 0; j < data.p(); ++j) {
    const auto col = data.x.col(j);
    if (data.intercept) center_[j] = col.mean();
    const double ss = (col.array() - center_[j]).square().sum() / n;
    scale_[j] = ss > 0.0 ? std::sqrt(ss) : 1.0;
  }
}

Dataset Standardizer::transform(const Dataset& data) const {
  Dataset out = data;
  for (Index j = 0; j < out.p(); ++j) {
    out.x.col(j) = (out.x.col(j).array() - center_[j]) / scale_[j];
  }
  return out;
}

Vector Standardizer::to_raw(const Vector& beta_std) const {
  Vector raw = beta_std;
  const Index p = center_.size();
  raw.tail(p) = beta_std.tail(p).cwiseQuotient(scale_);
  raw[0] = beta_std[0] - center_.dot(raw.tail(p));
  return raw;
}

Vector Standardizer::to_standardized(const Vector& beta_raw) const {
  Vector s = beta_raw;
  const Index p = center_.size();
  s.tail(p) = beta_raw.tail(p).cwiseProduct(scale_);
  s[0] = beta_raw[0] + center_.dot(beta_raw.tail(p));
  return s;
}

}  // namespace ccest
