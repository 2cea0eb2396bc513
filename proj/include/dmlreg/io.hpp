#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dmlreg/expert_sim.hpp"
#include "dmlreg/glm.hpp"
#include "dmlreg/metric_learning.hpp"

namespace dmlreg {

// JSON forms:
//   metric: {"weights": [w_1, ..., w_n]}            (null encodes +inf)
//   pairs:  {"similar": [[i, j], ...], "dissimilar": [[i, j], ...]}
//   model:  {"likelihood": ..., "prior": ..., "coefficients": [...],
//            "intercept": b, "diagnostics": {...}}
//   theta:  {"theta": [...]}

nlohmann::json to_json(const DiagonalMetric& metric);
DiagonalMetric metric_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PairSets& pairs);
PairSets pairs_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

nlohmann::json theta_to_json(const Vector& theta);
Vector theta_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Writes the header x_1,...,x_n,y then one row per observation, numbers in
/// shortest round-trip form, LF line endings.
void write_dataset_csv(const std::filesystem::path& path, const Matrix& x, const Vector& y);

/// Reads a CSV written by write_dataset_csv. Columns named x_<k> form X in
/// file order; a column named "y" (optional) forms y.
Dataset read_dataset_csv(const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace dmlreg
