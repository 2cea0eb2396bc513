#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dmlreg/experiment.hpp"

namespace dmlreg {

/// A rectangular table of already formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws InvalidConfig if absent.
  std::size_t column(const std::string& name) const;
};

Table to_table(const std::vector<ResultRow>& rows);
Table to_table(const std::vector<SummaryRow>& rows);
Table to_table(const std::vector<CoefficientRow>& rows);
Table to_table(const std::vector<LogisticRow>& rows);

/// Comma-separated, header first, LF line endings, no quoting (cells never
/// contain commas).
std::string render_csv(const Table& table);
void emit_csv(const Table& table, const std::filesystem::path& path);

struct PlotOptions {
  std::string title;
  bool log_y = false;
};

/// Single-panel SVG line plot with one polyline per distinct value of
/// `series_field`, points ordered by x. Rows whose x or y does not parse as a
/// finite number (or y <= 0 on a log axis) are skipped.
std::string render_svg_lineplot(const Table& table, const std::string& x_field,
                                const std::string& y_field, const std::string& series_field,
                                const PlotOptions& options = {});
void emit_svg_lineplot(const Table& table, const std::string& x_field,
                       const std::string& y_field, const std::string& series_field,
                       const std::filesystem::path& path, const PlotOptions& options = {});

}  // namespace dmlreg

namespace dmlreg {

/// Writes results.csv and summary.csv into `dir` (created if missing), plus
/// <experiment>.svg (mean validation MSE against n, or against p for fig4,
/// one line per model or knowledge arm), coefficients.csv for fig5 and
/// logistic.csv when logistic diagnostics were produced.
void write_experiment_outputs(const ExperimentConfig& config, const ResultTable& table,
                              const std::filesystem::path& dir);

}  // namespace dmlreg
