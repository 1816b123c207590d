#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfo/dfo.hpp"

namespace {

// key=value overrides from --param.
dfo::SolverParams parse_params(const std::vector<std::string>& items) {
  dfo::SolverParams p;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw dfo::ConfigError("--param expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw dfo::ConfigError("parameter " + key + " is not a number: " + value);
    p[key] = v;
  }
  dfo::validate_params(p);
  return p;
}

void print_report(const dfo::ComparisonReport& rep, const std::string& out_dir) {
  std::printf("%-4s %-14s %-24s %-8s %-8s %s\n", "rank", "solver", "f_best", "evals", "over", "stop");
  int rank = 1;
  for (const auto& e : rep.entries)
    std::printf("%-4d %-14s %-24.17g %-8ld %-8ld %s\n", rank++, e.solver.c_str(), e.f_best, e.evaluations, e.overshoot,
                e.stop_reason.c_str());
  if (!out_dir.empty()) std::printf("wrote traces, instance.txt and report.json to %s\n", out_dir.c_str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free optimization with adaptive finite-difference intervals"};
  app.set_config("--config", "", "INI/TOML file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run solvers on one problem instance and rank them");
  std::string problem = "leastsquares", solvers = "dfc-fordif,dfc-cendif,nelder-mead,imfil-fordif,imfil-cendif";
  std::string x0 = "zeros", out_dir;
  int n = 10, m = 0;
  double noise = 0.0;
  long budget_mult = 200;
  std::uint64_t seed = 0, instance_seed = 0;
  bool serial = false;
  std::vector<std::string> params;
  run->add_option("--problem", problem, "leastsquares | imagerestore | rosenbrock")->capture_default_str();
  run->add_option("--n", n, "Dimension")->capture_default_str();
  run->add_option("--m", m, "Rows of A for least squares (0: m = n)")->capture_default_str();
  run->add_option("--noise", noise, "Uniform noise level epsilon")->capture_default_str();
  run->add_option("--solver", solvers, "Comma-separated solver ids")->capture_default_str();
  run->add_option("--budget-mult", budget_mult, "Budget = multiplier * n evaluations")->capture_default_str();
  run->add_option("--seed", seed, "Run seed; solver noise and direction streams derive from it")->capture_default_str();
  run->add_option("--instance-seed", instance_seed, "Instance seed (defaults to --seed)");
  run->add_option("--x0", x0, "zeros | halves | path to a whitespace-separated vector")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory for traces and report");
  run->add_option("--param", params, "Solver parameter override key=value (repeatable)");
  run->add_flag("--serial", serial, "Run solvers one after another");

  auto* plot = app.add_subcommand("plot", "Plot f_best against evaluations for trace files");
  std::vector<std::string> traces;
  std::string svg_out = "traces.svg";
  plot->add_option("--traces", traces, "Trace CSV files")->required();
  plot->add_option("--out", svg_out, "SVG output path")->capture_default_str();

  auto* rate = app.add_subcommand("rate", "Classify the convergence rate of a trace");
  std::string trace_path;
  double target = 0.0;
  rate->add_option("--trace", trace_path, "Trace CSV file")->required();
  rate->add_option("--target", target, "Reference optimal value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      dfo::ExperimentConfig cfg;
      const auto fam = dfo::parse_family(problem);
      if (!fam) throw dfo::ConfigError("unknown problem family '" + problem + "'");
      cfg.problem = {*fam, n, m, run->count("--instance-seed") ? instance_seed : seed};
      cfg.noise_level = noise;
      cfg.solvers = dfo::parse_solver_list(solvers);
      cfg.params = parse_params(params);
      cfg.budget_multiplier = budget_mult;
      cfg.run_seed = seed;
      cfg.initial_point = x0;
      cfg.output_dir = out_dir;
      cfg.parallel = !serial;
      print_report(dfo::run_experiment(cfg), out_dir);
    } else if (*plot) {
      std::vector<dfo::LabeledTrace> labeled;
      for (const auto& t : traces)
        labeled.push_back({std::filesystem::path(t).stem().string(), dfo::read_csv(t)});
      dfo::emit_plot(labeled, svg_out);
      std::printf("wrote %s\n", svg_out.c_str());
    } else if (*rate) {
      const auto est = dfo::estimate_rate(dfo::read_csv(trace_path), target);
      std::printf("kind: %s\n", std::string(dfo::to_string(est.kind)).c_str());
      if (est.kind == dfo::RateKind::linear) std::printf("factor: %.6g\n", est.factor_or_exponent);
      if (est.kind == dfo::RateKind::sublinear) std::printf("exponent: %.6g\n", est.factor_or_exponent);
      std::printf("r2_linear: %.6f\nr2_power: %.6f\n", est.r2_linear, est.r2_power);
    }
  } catch (const dfo::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) { // ConfigError, DimensionError, InsufficientData
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
