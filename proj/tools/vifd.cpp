// vifd: command-line front end for the projection solver and the benchmark
// presets.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vifd/vifd.hpp"

namespace {

vifd::Point parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw vifd::ConfigError("--x0: '" + item + "' is not a decimal number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw vifd::ConfigError("--x0: '" + item + "' is not a decimal number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw vifd::ConfigError("--x0 is empty");
  return Eigen::Map<const vifd::Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int run_configs(const std::vector<vifd::bench::ExperimentConfig>& configs,
                std::optional<vifd::bench::OutputFormat> format) {
  using namespace vifd::bench;
  int code = 0;
  std::vector<ResultRow> all_rows;
  json combined = json::array();
  for (const ExperimentConfig& cfg : configs) {
    const auto rows = run_experiment(cfg);
    const OutputFormat f = format.value_or(cfg.output_format);
    if (f == OutputFormat::Json && configs.size() > 1) {
      combined.push_back(json::parse(emit(rows, f, &cfg)));
    } else if (f == OutputFormat::Csv && configs.size() > 1) {
      all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    } else {
      std::cout << emit(rows, f, &cfg);
      if (f == OutputFormat::Table) std::cout << '\n';
    }
    const int c = exit_code(rows);
    code = std::max(code, c);
  }
  if (!combined.empty()) std::cout << combined.dump(2) << '\n';
  if (!all_rows.empty()) std::cout << emit(all_rows, OutputFormat::Csv);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection solver for variational inequalities with point-to-set operators"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem from one start point");
  std::string problem;
  std::string x0_text;
  vifd::SolverParams params;
  double beta = 1.0;
  std::uint64_t seed = vifd::bench::ExperimentConfig{}.seed;
  std::optional<double> scale;
  std::string output = "table";
  solve_cmd->add_option("--problem", problem, "Problem name")
      ->required()
      ->check(CLI::IsMember(vifd::problem_names()));
  solve_cmd->add_option("--x0", x0_text, "Start point, comma-separated")->required();
  solve_cmd->add_option("--delta", params.delta, "Linesearch acceptance fraction in (0,1)");
  solve_cmd->add_option("--theta", params.theta, "Backtracking factor in (0,1)");
  solve_cmd->add_option("--beta", beta, "Constant step beta > 0");
  solve_cmd->add_option("--tol", params.tol_residual, "Stop when |x - z|^2 <= tol");
  solve_cmd->add_option("--tol-step4", params.tol_step4, "Stop when |x+ - x| <= tol");
  solve_cmd->add_option("--max-iter", params.max_outer_iterations, "Outer iteration cap");
  solve_cmd->add_option("--seed", seed, "Seed for random problem data");
  solve_cmd->add_option("--scale", scale, "Box half-width or simplex total (problem dependent)");
  solve_cmd->add_option("--output", output, "csv, json or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark preset or config file");
  std::string preset;
  std::string config_path;
  std::optional<std::string> bench_output;
  auto* preset_opt = bench_cmd->add_option("--preset", preset, "table1, table2, table3 or table4")
                         ->check(CLI::IsMember(vifd::bench::preset_names()));
  auto* config_opt = bench_cmd->add_option("--config", config_path, "Path to a json config")
                         ->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  bench_cmd->add_option("--output", bench_output, "csv, json or table")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are "errors" with exit code 0
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) {
      vifd::bench::ExperimentConfig cfg;
      cfg.label = problem;
      cfg.problem = problem;
      cfg.starts = {parse_point(x0_text)};
      params.beta = vifd::BetaSchedule::constant(beta);
      cfg.params = params;
      cfg.seed = seed;
      cfg.scale = scale;
      cfg.output_format = vifd::bench::parse_format(output);
      return run_configs({cfg}, std::nullopt);
    }
    std::vector<vifd::bench::ExperimentConfig> configs;
    if (!preset.empty()) {
      configs = vifd::bench::preset(preset);
    } else if (!config_path.empty()) {
      std::ifstream in(config_path);
      configs = vifd::bench::configs_from_json(vifd::bench::json::parse(in));
    } else {
      std::cerr << "bench: one of --preset or --config is required\n";
      return 1;
    }
    std::optional<vifd::bench::OutputFormat> fmt;
    if (bench_output) fmt = vifd::bench::parse_format(*bench_output);
    return run_configs(configs, fmt);
  } catch (const std::exception& e) {
    std::cerr << "vifd: " << e.what() << '\n';
    return 1;
  }
}
