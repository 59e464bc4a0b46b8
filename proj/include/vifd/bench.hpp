#pragma once

// Experiment harness: named presets for the four benchmark tables, a json
// config format, and csv/json/table output.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vifd/errors.hpp"
#include "vifd/operators.hpp"
#include "vifd/solver.hpp"

namespace vifd::bench {

using json = nlohmann::json;

enum class OutputFormat { Csv, Json, Table };

inline const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Table: return "table";
  }
  return "?";
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "table") return OutputFormat::Table;
  throw ConfigError("unknown output format '" + s + "'");
}

struct ExperimentConfig {
  std::string label;
  std::string problem;
  std::vector<Point> starts;
  SolverParams params;
  /// Box half-width or simplex total. Unset: the family default, except for
  /// simplex problems where it is taken from each start's coordinate sum.
  std::optional<double> scale;
  int repetitions = 1;
  std::uint64_t seed = 20160101;
  OutputFormat output_format = OutputFormat::Table;

  void validate() const {
    const auto& names = problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end()) {
      throw UnknownProblem("unknown problem '" + problem + "'");
    }
    if (starts.empty()) throw ConfigError("experiment '" + label + "' has no start points");
    const Eigen::Index n = starts.front().size();
    for (const Point& s : starts) {
      if (s.size() == 0 || s.size() != n) throw ConfigError("start points must share one positive dimension");
      if (!s.allFinite()) throw ConfigError("start point has a non-finite entry");
    }
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    params.validate();
  }
};

struct ResultRow {
  Point start;
  int iterations = 0;
  int operator_evals = 0;
  double wall_time_s = 0.0;
  Point terminal_point;
  StopReason stop_reason = StopReason::MaxIterations;

  bool operator==(const ResultRow& o) const {
    return start.size() == o.start.size() && start == o.start && iterations == o.iterations &&
           operator_evals == o.operator_evals && wall_time_s == o.wall_time_s &&
           terminal_point.size() == o.terminal_point.size() && terminal_point == o.terminal_point &&
           stop_reason == o.stop_reason;
  }
};

inline ProblemInstance instance_for(const ExperimentConfig& cfg, const Point& start) {
  ProblemOptions opts;
  opts.dimension = start.size();
  opts.seed = cfg.seed;
  opts.scale = cfg.scale;
  if (!opts.scale && cfg.problem == "fractional-simplex") opts.scale = start.sum();
  return make_problem(cfg.problem, opts);
}

/// Solves from one start; `record_history` overrides the config.
inline RunReport run_start(const ExperimentConfig& cfg, const Point& start, bool record_history = false) {
  const ProblemInstance problem = instance_for(cfg, start);
  SolverParams params = cfg.params;
  params.record_history = params.record_history || record_history;
  return solve(problem, start, params);
}

inline ResultRow to_row(const RunReport& r) {
  return {r.start, r.counters.outer_iters, r.counters.operator_evals, r.wall_time, r.terminal_point,
          r.stop_reason};
}

/// One row per start, in config order. Wall time is the median over
/// `repetitions` identical solves.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ResultRow> rows;
  rows.reserve(cfg.starts.size());
  for (const Point& start : cfg.starts) {
    std::vector<double> times;
    std::optional<ResultRow> row;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const RunReport rep_report = run_start(cfg, start);
      times.push_back(rep_report.wall_time);
      if (!row) row = to_row(rep_report);
    }
    std::sort(times.begin(), times.end());
    const size_t mid = times.size() / 2;
    row->wall_time_s = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    // Rows report the caller's start, even if it was projected onto C.
    row->start = start;
    rows.push_back(std::move(*row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Presets

namespace detail {

inline Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) p(i++) = d;
  return p;
}

inline SolverParams params(double delta, double theta, double tol) {
  SolverParams p;
  p.delta = delta;
  p.theta = theta;
  p.tol_residual = tol;
  return p;
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"table1", "table2", "table3", "table4"};
  return names;
}

inline std::vector<ExperimentConfig> preset(const std::string& name) {
  using detail::pt;
  constexpr double pi = std::numbers::pi;
  if (name == "table1") {
    ExperimentConfig c;
    c.label = "table1";
    c.problem = "hs-quasimonotone";
    c.params = detail::params(0.01, 0.5, 1e-8);
    c.starts = {pt({0, 1}), pt({0, 0}), pt({1, 0}), pt({0.5, 0.5}), pt({0.2, 0.7}), pt({0.1, 0.7})};
    return {c};
  }
  if (name == "table2") {
    std::vector<ExperimentConfig> out;
    ExperimentConfig sq;
    sq.label = "table2 |x|^2 n=1";
    sq.problem = "rho-squared";
    sq.params = detail::params(0.01, 0.5, 1e-8);
    sq.starts = {pt({0.1}), pt({0.5}), pt({-0.5})};
    out.push_back(sq);
    const std::vector<std::pair<Eigen::Index, double>> norm_rows = {{5, 1e-3}, {50, -0.1}, {100, -1e-3}};
    for (const auto& [n, v] : norm_rows) {
      ExperimentConfig c;
      c.label = "table2 |x| n=" + std::to_string(n);
      c.problem = "rho-norm";
      c.params = detail::params(0.01, 0.5, 1e-8);
      c.starts = {Point::Constant(n, v)};
      out.push_back(c);
    }
    return out;
  }
  if (name == "table3") {
    std::vector<ExperimentConfig> out;
    const std::vector<std::pair<double, std::vector<Point>>> groups = {
        {0.01, {pt({0, 0, 5, 0, 0}), pt({0, 2, 0, 2, 1}), pt({1, 1, 1, 1, 6}), pt({1, 1, 6, 1, 1})}},
        {0.5, {pt({0, 0, 5, 0, 0}), pt({0, 2, 0, 2, 1})}},
        {0.99, {pt({1, 1, 1, 1, 6}), pt({1, 1, 6, 1, 1})}},
    };
    for (const auto& [delta, starts] : groups) {
      ExperimentConfig c;
      std::ostringstream label;
      label << "table3 delta=" << delta;
      c.label = label.str();
      c.problem = "fractional-simplex";
      c.params = detail::params(delta, 0.25, 1e-4);
      c.starts = starts;
      out.push_back(c);
    }
    return out;
  }
  if (name == "table4") {
    ExperimentConfig c;
    c.label = "table4";
    c.problem = "ray-setvalued";
    c.params = detail::params(0.5, 0.5, 1e-30);
    c.starts = {pt({1, pi / 2}),  pt({0.5, pi / 3}), pt({0.1, pi / 2}),
                pt({100, pi / 2}), pt({0.1, pi / 10}), pt({1, pi / 100}),
                pt({20, pi / 6}), pt({10, pi / 4}),   pt({1500, pi / 8})};
    return {c};
  }
  throw ConfigError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Config (de)serialization

inline json point_to_json(const Point& p) { return json(std::vector<double>(p.data(), p.data() + p.size())); }

inline Point point_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("point must be a json array");
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json to_json(const ExperimentConfig& c) {
  json starts = json::array();
  for (const Point& s : c.starts) starts.push_back(point_to_json(s));
  json j = {
      {"label", c.label},
      {"problem", c.problem},
      {"starts", starts},
      {"repetitions", c.repetitions},
      {"seed", c.seed},
      {"output", to_string(c.output_format)},
      {"params",
       {{"delta", c.params.delta},
        {"theta", c.params.theta},
        {"beta", c.params.beta.lower},
        {"tol_residual", c.params.tol_residual},
        {"tol_step4", c.params.tol_step4},
        {"max_iter", c.params.max_outer_iterations},
        {"max_linesearch_halvings", c.params.max_linesearch_halvings},
        {"qp_tol", c.params.qp_tol}}},
  };
  if (c.scale) j["scale"] = *c.scale;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment must be a json object");
  try {
    ExperimentConfig c;
    c.problem = j.at("problem").get<std::string>();
    c.label = j.value("label", c.problem);
    for (const json& s : j.at("starts")) c.starts.push_back(point_from_json(s));
    c.repetitions = j.value("repetitions", 1);
    c.seed = j.value("seed", c.seed);
    if (j.contains("scale")) c.scale = j.at("scale").get<double>();
    if (j.contains("output")) c.output_format = parse_format(j.at("output").get<std::string>());
    if (j.contains("params")) {
      const json& p = j.at("params");
      c.params.delta = p.value("delta", c.params.delta);
      c.params.theta = p.value("theta", c.params.theta);
      c.params.beta = BetaSchedule::constant(p.value("beta", 1.0));
      c.params.tol_residual = p.value("tol_residual", c.params.tol_residual);
      c.params.tol_step4 = p.value("tol_step4", c.params.tol_step4);
      c.params.max_outer_iterations = p.value("max_iter", c.params.max_outer_iterations);
      c.params.max_linesearch_halvings = p.value("max_linesearch_halvings", c.params.max_linesearch_halvings);
      c.params.qp_tol = p.value("qp_tol", c.params.qp_tol);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

/// Accepts a single experiment object or {"experiments": [...]}.
inline std::vector<ExperimentConfig> configs_from_json(const json& j) {
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("experiments")) {
    for (const json& e : j.at("experiments")) out.push_back(config_from_json(e));
  } else {
    out.push_back(config_from_json(j));
  }
  if (out.empty()) throw ConfigError("config lists no experiments");
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string point_csv(const Point& p) {
  std::string s;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) s += ';';
    s += fmt6(p(i));
  }
  return s;
}

inline std::string point_paren(const Point& p) {
  if (p.size() > 6 && (p.array() == p(0)).all()) return fmt6(p(0)) + "*(1,...,1)";
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    s += fmt6(p(i));
  }
  return s + ")";
}

inline json row_to_json(const ResultRow& r) {
  return {{"x0", point_to_json(r.start)},
          {"iter", r.iterations},
          {"nT", r.operator_evals},
          {"cpu_s", r.wall_time_s},
          {"sol", point_to_json(r.terminal_point)},
          {"stop_reason", vifd::to_string(r.stop_reason)}};
}

inline ResultRow row_from_json(const json& j) {
  ResultRow r;
  r.start = point_from_json(j.at("x0"));
  r.iterations = j.at("iter").get<int>();
  r.operator_evals = j.at("nT").get<int>();
  r.wall_time_s = j.at("cpu_s").get<double>();
  r.terminal_point = point_from_json(j.at("sol"));
  r.stop_reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
  return r;
}

inline std::vector<ResultRow> rows_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("rows") : j;
  std::vector<ResultRow> rows;
  for (const json& r : arr) rows.push_back(row_from_json(r));
  return rows;
}

/// Renders rows. csv: header plus one line per row. json: an array of rows,
/// or {"config", "rows"} when a config is supplied. table: aligned text.
inline std::string emit(const std::vector<ResultRow>& rows, OutputFormat format,
                        const ExperimentConfig* config = nullptr) {
  if (rows.empty()) throw InvalidArgument("no rows to emit");
  std::ostringstream out;
  switch (format) {
    case OutputFormat::Csv:
      out << "x0,iter,nT,cpu_s,sol,stop_reason\n";
      for (const ResultRow& r : rows) {
        out << point_csv(r.start) << ',' << r.iterations << ',' << r.operator_evals << ','
            << fmt6(r.wall_time_s) << ',' << point_csv(r.terminal_point) << ','
            << vifd::to_string(r.stop_reason) << '\n';
      }
      break;
    case OutputFormat::Json: {
      json arr = json::array();
      for (const ResultRow& r : rows) arr.push_back(row_to_json(r));
      if (config) {
        out << json{{"config", to_json(*config)}, {"rows", arr}}.dump(2) << '\n';
      } else {
        out << arr.dump(2) << '\n';
      }
      break;
    }
    case OutputFormat::Table: {
      std::vector<std::array<std::string, 4>> cells;
      cells.push_back({"x0", "iter(nT)", "cpu", "sol"});
      for (const ResultRow& r : rows) {
        cells.push_back({point_paren(r.start),
                         std::to_string(r.iterations) + "(" + std::to_string(r.operator_evals) + ")",
                         fmt6(r.wall_time_s), point_paren(r.terminal_point)});
      }
      std::array<size_t, 4> width{};
      for (const auto& row : cells) {
        for (size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
      }
      auto line = [&](const std::array<std::string, 4>& row) {
        for (size_t c = 0; c < 4; ++c) {
          out << (c ? " | " : "") << row[c] << std::string(c < 3 ? width[c] - row[c].size() : 0, ' ');
        }
        out << '\n';
      };
      if (config && !config->label.empty()) out << config->label << '\n';
      line(cells.front());
      size_t total = 9;
      for (size_t w : width) total += w;
      out << std::string(total, '-') << '\n';
      for (size_t i = 1; i < cells.size(); ++i) line(cells[i]);
      break;
    }
  }
  return out.str();
}

/// Process exit code for a finished set of rows: 0 all solved, 2 some run hit
/// the iteration cap, 3 some linesearch failed.
inline int exit_code(const std::vector<ResultRow>& rows) {
  int code = 0;
  for (const ResultRow& r : rows) {
    if (r.stop_reason == StopReason::LinesearchFailure) return 3;
    if (r.stop_reason == StopReason::MaxIterations) code = 2;
  }
  return code;
}

}  // namespace vifd::bench
