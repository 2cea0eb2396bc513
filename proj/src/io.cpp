#include "dmlreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "dmlreg/error.hpp"

namespace dmlreg {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::isinf(v[k]) && v[k] > 0) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(v[k]);
    }
  }
  return arr;
}

Vector vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) fail(ErrorCode::ParseError, std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (arr[k].is_null()) {
      v[static_cast<Eigen::Index>(k)] = std::numeric_limits<double>::infinity();
    } else if (arr[k].is_number()) {
      v[static_cast<Eigen::Index>(k)] = arr[k].get<double>();
    } else {
      fail(ErrorCode::ParseError, std::string(what) + " entries must be numbers");
    }
  }
  return v;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::vector<IndexPair> pair_list_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) fail(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<IndexPair> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() ||
        !p[1].is_number_unsigned()) {
      fail(ErrorCode::ParseError,
           std::string(what) + " entries must be [i, j] with nonnegative integers");
    }
    out.push_back({p[0].get<std::size_t>(), p[1].get<std::size_t>()});
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

json to_json(const DiagonalMetric& metric) { return json{{"weights", vector_to_json(metric.weights())}}; }

DiagonalMetric metric_from_json(const json& j) {
  return DiagonalMetric(vector_from_json(field(j, "weights"), "weights"));
}

json to_json(const PairSets& pairs) {
  auto list = [](const std::vector<IndexPair>& v) {
    json arr = json::array();
    for (const auto& p : v) arr.push_back(json::array({p.i, p.j}));
    return arr;
  };
  return json{{"similar", list(pairs.similar)}, {"dissimilar", list(pairs.dissimilar)}};
}

PairSets pairs_from_json(const json& j) {
  PairSets out;
  out.similar = pair_list_from_json(field(j, "similar"), "similar");
  out.dissimilar = pair_list_from_json(field(j, "dissimilar"), "dissimilar");
  return out;
}

json to_json(const FittedModel& model) {
  return json{{"likelihood", to_string(model.spec.likelihood)},
              {"prior", to_string(model.spec.prior)},
              {"coefficients", vector_to_json(model.coefficients)},
              {"intercept", model.intercept},
              {"diagnostics",
               {{"objective", model.diagnostics.objective},
                {"iterations", model.diagnostics.iterations},
                {"converged", model.diagnostics.converged}}}};
}

FittedModel model_from_json(const json& j) {
  FittedModel model;
  try {
    model.spec.likelihood = parse_likelihood(field(j, "likelihood").get<std::string>());
    model.spec.prior = parse_prior(field(j, "prior").get<std::string>());
    model.coefficients = vector_from_json(field(j, "coefficients"), "coefficients");
    if (j.contains("intercept")) model.intercept = j.at("intercept").get<double>();
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      model.diagnostics.objective = d.value("objective", 0.0);
      model.diagnostics.iterations = d.value("iterations", 0);
      model.diagnostics.converged = d.value("converged", false);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) fail(ErrorCode::ParseError, e.what());
    throw;
  }
  return model;
}

json theta_to_json(const Vector& theta) { return json{{"theta", vector_to_json(theta)}}; }

Vector theta_from_json(const json& j) { return vector_from_json(field(j, "theta"), "theta"); }

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

void write_dataset_csv(const std::filesystem::path& path, const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) fail(ErrorCode::DimensionMismatch, "X and y row counts differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  for (Eigen::Index j = 0; j < x.cols(); ++j) out << "x_" << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << format_double(x(i, j)) << ',';
    out << format_double(y[i]) << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  std::vector<std::size_t> x_cols;
  std::optional<std::size_t> y_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") {
      y_col = c;
    } else if (header[c].rfind("x_", 0) == 0) {
      x_cols.push_back(c);
    } else {
      fail(ErrorCode::ParseError, path.string() + ": unexpected column '" + header[c] + "'");
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::ParseError, path.string() + ": line " + std::to_string(line_no) +
                                      " has " + std::to_string(cells.size()) + " fields, expected " +
                                      std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, line_no));
    rows.push_back(std::move(row));
  }
  Dataset d;
  const auto m = static_cast<Eigen::Index>(rows.size());
  d.x.resize(m, static_cast<Eigen::Index>(x_cols.size()));
  d.y.resize(y_col ? m : 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < x_cols.size(); ++c) d.x(i, static_cast<Eigen::Index>(c)) = row[x_cols[c]];
    if (y_col) d.y[i] = row[*y_col];
  }
  if (!d.x.allFinite() || !d.y.allFinite()) {
    fail(ErrorCode::NonFiniteInput, path.string() + ": non-finite value");
  }
  return d;
}

}  // namespace dmlreg
