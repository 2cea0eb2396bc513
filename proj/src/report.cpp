#include "dmlreg/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "dmlreg/error.hpp"
#include "dmlreg/io.hpp"

namespace dmlreg {

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorCode::InvalidConfig, "table has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::string num(double v) { return std::isnan(v) ? "nan" : format_double(v); }

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

bool parse_number(const std::string& s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

Table to_table(const std::vector<ResultRow>& rows) {
  Table t;
  t.header = {"experiment", "replicate", "n", "p", "model",
              "knowledge", "metric_source", "val_mse", "wall_ms"};
  for (const auto& r : rows) {
    t.rows.push_back({r.experiment, std::to_string(r.replicate), std::to_string(r.n),
                      std::to_string(r.p), r.model, r.knowledge, r.metric_source, num(r.val_mse),
                      num(r.wall_ms)});
  }
  return t;
}

Table to_table(const std::vector<SummaryRow>& rows) {
  Table t;
  t.header = {"experiment", "n", "p", "model", "knowledge", "metric_source",
              "mean_val_mse", "count", "failed"};
  for (const auto& r : rows) {
    t.rows.push_back({r.experiment, std::to_string(r.n), std::to_string(r.p), r.model,
                      r.knowledge, r.metric_source, num(r.mean_val_mse),
                      std::to_string(r.count), std::to_string(r.failed)});
  }
  return t;
}

Table to_table(const std::vector<CoefficientRow>& rows) {
  Table t;
  t.header = {"replicate", "n", "feature", "group", "theta_true", "theta_dmlreg", "theta_lasso"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.replicate), std::to_string(r.n),
                      std::to_string(r.feature), r.relevant ? "relevant" : "noise",
                      num(r.theta_true), num(r.theta_dmlreg), num(r.theta_lasso)});
  }
  return t;
}

Table to_table(const std::vector<LogisticRow>& rows) {
  Table t;
  t.header = {"experiment", "replicate", "n", "model", "knowledge",
              "objective", "iterations", "converged", "val_accuracy"};
  for (const auto& r : rows) {
    t.rows.push_back({r.experiment, std::to_string(r.replicate), std::to_string(r.n), r.model,
                      r.knowledge, num(r.objective), std::to_string(r.iterations),
                      r.converged ? "true" : "false", num(r.val_accuracy)});
  }
  return t;
}

std::string render_csv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void emit_csv(const Table& table, const std::filesystem::path& path) {
  write_text(path, render_csv(table));
}

std::string render_svg_lineplot(const Table& table, const std::string& x_field,
                                const std::string& y_field, const std::string& series_field,
                                const PlotOptions& options) {
  const std::size_t xc = table.column(x_field);
  const std::size_t yc = table.column(y_field);
  const std::size_t sc = table.column(series_field);

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& row : table.rows) {
    double x = 0.0;
    double y = 0.0;
    if (!parse_number(row[xc], x) || !parse_number(row[yc], y)) continue;
    if (options.log_y) {
      if (y <= 0.0) continue;
      y = std::log10(y);
    }
    series[row[sc]].emplace_back(x, y);
  }

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  constexpr double width = 720, height = 440;
  constexpr double left = 80, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
       "viewBox=\"0 0 720 440\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"440\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         xml_escape(options.title) + "</text>\n";
  }
  // Axes.
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + fixed(left + pw) +
       "\" y2=\"" + fixed(top + ph) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) +
       "\" y2=\"" + fixed(top + ph) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    s += "<line x1=\"" + fixed(sx(xv)) + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" +
         fixed(sx(xv)) + "\" y2=\"" + fixed(top + ph + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fixed(sx(xv)) + "\" y=\"" + fixed(top + ph + 18) +
         "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    s += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + fixed(sy(yv)) + "\" x2=\"" + fixed(left) +
         "\" y2=\"" + fixed(sy(yv)) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(sy(yv) + 4) +
         "\" text-anchor=\"end\">" + tick_label(options.log_y ? std::pow(10.0, yv) : yv) +
         "</text>\n";
  }
  s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 18) +
       "\" text-anchor=\"middle\">" + xml_escape(x_field) + "</text>\n";
  const std::string ylabel = options.log_y ? y_field + " (log scale)" : y_field;
  s += "<text x=\"18\" y=\"" + fixed(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       fixed(top + ph / 2) + ")\">" + xml_escape(ylabel) + "</text>\n";

  std::size_t idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (const auto& [x, y] : pts) {
      if (!points.empty()) points += ' ';
      points += fixed(sx(x)) + "," + fixed(sy(y));
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    for (const auto& [x, y] : pts) {
      s += "<circle cx=\"" + fixed(sx(x)) + "\" cy=\"" + fixed(sy(y)) + "\" r=\"3\" fill=\"" +
           color + "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(idx);
    s += "<line x1=\"" + fixed(left + pw + 15) + "\" y1=\"" + fixed(ly) + "\" x2=\"" +
         fixed(left + pw + 40) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fixed(left + pw + 46) + "\" y=\"" + fixed(ly + 4) + "\">" +
         xml_escape(name) + "</text>\n";
    ++idx;
  }
  s += "</svg>\n";
  return s;
}

void emit_svg_lineplot(const Table& table, const std::string& x_field, const std::string& y_field,
                       const std::string& series_field, const std::filesystem::path& path,
                       const PlotOptions& options) {
  write_text(path, render_svg_lineplot(table, x_field, y_field, series_field, options));
}

}  // namespace dmlreg

namespace dmlreg {

void write_experiment_outputs(const ExperimentConfig& config, const ResultTable& table,
                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  emit_csv(to_table(table.rows), dir / "results.csv");
  const auto summary = summarize(table.rows);
  emit_csv(to_table(summary), dir / "summary.csv");

  const std::string name = to_string(config.experiment);
  const bool by_p = config.experiment == ExperimentKind::Fig4;
  const std::string x_field = by_p ? "p" : "n";
  Table plot;
  plot.header = {x_field, "mean_val_mse", "series"};
  for (const auto& s : summary) {
    std::string label;
    if (config.experiment == ExperimentKind::Fig1 || config.experiment == ExperimentKind::Fig5) {
      label = s.model;
    } else {
      label = s.knowledge;
      if (s.metric_source == "true") label += " (true metric)";
    }
    plot.rows.push_back({std::to_string(by_p ? static_cast<long long>(s.p)
                                             : static_cast<long long>(s.n)),
                         format_double(s.mean_val_mse), label});
  }

  PlotOptions opts;
  if (config.experiment == ExperimentKind::Fig5) {
    // Coefficient estimates of the first replicate against feature index.
    Table coef;
    coef.header = {"feature", "value", "series"};
    for (const auto& c : table.coefficients) {
      if (c.replicate != table.coefficients.front().replicate || c.n != table.coefficients.front().n) {
        continue;
      }
      const std::string f = std::to_string(c.feature);
      coef.rows.push_back({f, format_double(c.theta_true), "true"});
      coef.rows.push_back({f, format_double(c.theta_dmlreg), "dmlreg (noisy, laplace)"});
      coef.rows.push_back({f, format_double(c.theta_lasso), "lasso (lambda=1)"});
    }
    opts.title = "fig5: true vs estimated coefficients";
    emit_svg_lineplot(coef, "feature", "value", "series", dir / (name + ".svg"), opts);
    emit_csv(to_table(table.coefficients), dir / "coefficients.csv");
  } else {
    opts.title = name + ": validation MSE";
    opts.log_y = config.experiment == ExperimentKind::Fig1;
    emit_svg_lineplot(plot, x_field, "mean_val_mse", "series", dir / (name + ".svg"), opts);
  }
  if (!table.logistic.empty()) emit_csv(to_table(table.logistic), dir / "logistic.csv");
}

}  // namespace dmlreg
