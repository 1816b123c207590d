#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfo/csv.hpp"
#include "dfo/experiment.hpp"
#include "dfo/plot.hpp"
#include "dfo/rate.hpp"

using namespace dfo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("dfo_harness_" + name);
  fs::remove_all(p);
  return p;
}

Trace geometric_trace(int count, double ratio, double base = 1.0) {
  Trace t;
  double f = base;
  for (int k = 1; k <= count; ++k, f *= ratio)
    t.push_back({k, 2L * k, f, f, 0.0, 0.1, 1.0, 0.5, StepStatus::accepted});
  return t;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

} // namespace

TEST(Csv, SingleRecordHasHeaderAndOneRow) {
  const auto dir = scratch_dir("csv1");
  fs::create_directories(dir);
  const Trace t{{1, 11, 0.1 + 0.2, 0.3, 1.0 / 3.0, 0.05, 2.0, 0.25, StepStatus::accepted}};
  emit_csv(t, (dir / "a.csv").string());
  const auto text = slurp(dir / "a.csv");
  EXPECT_EQ(count_of(text, "\n"), 2u);
  EXPECT_EQ(text.substr(0, kTraceHeader.size()), kTraceHeader);
  EXPECT_EQ(read_csv((dir / "a.csv").string()), t);
  fs::remove_all(dir);
}

TEST(Csv, RoundTripIsBitExactAndReemitIsByteIdentical) {
  const auto dir = scratch_dir("csv2");
  fs::create_directories(dir);
  Trace t = geometric_trace(40, 0.37, 3.14159);
  t[3].step_status = StepStatus::null_step;
  t[4].step_status = StepStatus::rejected;
  t[5].f_current = -1e-300;
  t.back().step_status = StepStatus::budget;
  emit_csv(t, (dir / "a.csv").string());
  const Trace back = read_csv((dir / "a.csv").string());
  EXPECT_EQ(back, t);
  emit_csv(back, (dir / "b.csv").string());
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  fs::remove_all(dir);
}

TEST(Csv, Errors) {
  EXPECT_THROW(emit_csv({}, "/tmp/never.csv"), ConfigError);
  EXPECT_THROW(emit_csv(geometric_trace(2, 0.5), "/nonexistent/dir/x.csv"), IoError);
  EXPECT_THROW(read_csv("/nonexistent/dir/x.csv"), IoError);
  EXPECT_THROW(trace_from_csv("iter,evals\n1,2\n"), IoError);
  EXPECT_THROW(trace_from_csv(std::string(kTraceHeader) + "\n1,2,3\n"), IoError);
  EXPECT_THROW(trace_from_csv(std::string(kTraceHeader) + "\n1,2,3,3,0,0.1,1,0.5,sideways\n"), IoError);
}

TEST(Plot, TwoTracesOnLogAxis) {
  const auto svg = plot_svg({{"dfc-fordif", geometric_trace(30, 0.5)}, {"nelder-mead", geometric_trace(30, 0.8)}});
  EXPECT_EQ(count_of(svg, "class=\"curve\""), 2u);
  EXPECT_EQ(count_of(svg, "class=\"legend\""), 2u);
  EXPECT_NE(svg.find("y-axis: log10"), std::string::npos);
  EXPECT_NE(svg.find("function evaluations"), std::string::npos);
  EXPECT_NE(svg.find("dfc-fordif"), std::string::npos);
}

TEST(Plot, LinearAxisWhenValuesAreNotPositive) {
  Trace t = geometric_trace(10, 0.5);
  t.back().f_best = 0.0;
  const auto svg = plot_svg({{"x", t}});
  EXPECT_EQ(svg.find("y-axis: log10"), std::string::npos);
}

TEST(Plot, SinglePointTraceIsDrawn) {
  const auto svg = plot_svg({{"lonely", geometric_trace(1, 0.5)}});
  EXPECT_EQ(count_of(svg, "class=\"curve\""), 1u);
  EXPECT_EQ(count_of(svg, "class=\"legend\""), 1u);
}

TEST(Plot, WritesFileAndRejectsEmptyInput) {
  const auto dir = scratch_dir("plot");
  fs::create_directories(dir);
  emit_plot({{"a", geometric_trace(5, 0.5)}}, (dir / "p.svg").string());
  EXPECT_EQ(slurp(dir / "p.svg").rfind("<svg", 0), 0u);
  EXPECT_THROW(plot_svg({}), ConfigError);
  EXPECT_THROW(emit_plot({{"a", geometric_trace(5, 0.5)}}, "/nonexistent/dir/p.svg"), IoError);
  fs::remove_all(dir);
}

TEST(Rate, GeometricDecayIsLinear) {
  const auto est = estimate_rate(geometric_trace(60, 0.5), 0.0);
  EXPECT_EQ(est.kind, RateKind::linear);
  EXPECT_NEAR(est.factor_or_exponent, 0.5, 0.01);
}

TEST(Rate, PowerLawIsSublinear) {
  Trace t;
  for (int k = 1; k <= 200; ++k) {
    const double f = 1.0 / (static_cast<double>(k) * k);
    t.push_back({k, k, f, f, 0.0, 0.1, 1.0, 0.5, StepStatus::accepted});
  }
  const auto est = estimate_rate(t, 0.0);
  EXPECT_EQ(est.kind, RateKind::sublinear);
  EXPECT_NEAR(est.factor_or_exponent, -2.0, 0.1);
}

TEST(Rate, StagnationHasNoRate) {
  Trace t = geometric_trace(40, 1.0);
  EXPECT_EQ(estimate_rate(t, 0.0).kind, RateKind::none);
}

TEST(Rate, TooFewRecords) {
  EXPECT_THROW(estimate_rate(geometric_trace(19, 0.5), 0.0), InsufficientData);
  // Records at or below the target do not count.
  EXPECT_THROW(estimate_rate(geometric_trace(40, 0.5), 0.5), InsufficientData);
}

TEST(Solvers, IdsRoundTrip) {
  for (auto id : kAllSolvers) EXPECT_EQ(parse_solver_id(to_string(id)), id);
  EXPECT_EQ(parse_solver_list("dfc-fordif,rg").size(), 2u);
  EXPECT_THROW(parse_solver_list("dfc-fordif,bogus"), ConfigError);
  EXPECT_THROW(validate_params({{"not_a_key", 1.0}}), ConfigError);
}

TEST(Experiment, ValidationErrors) {
  ExperimentConfig cfg;
  cfg.problem = {Family::least_squares, 4, 0, 1};
  cfg.solvers = {SolverId::dfc_fordif};
  cfg.budget_multiplier = 0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg.budget_multiplier = 10;
  cfg.solvers.clear();
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg.solvers = {SolverId::dfc_fordif};
  cfg.noise_level = -1.0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(Experiment, UnwritableOutputDirectory) {
  ExperimentConfig cfg;
  cfg.problem = {Family::least_squares, 3, 0, 1};
  cfg.solvers = {SolverId::dfc_fordif};
  cfg.budget_multiplier = 10;
  cfg.output_dir = "/proc/dfo_cannot_write_here";
  EXPECT_THROW(run_experiment(cfg), IoError);
}

TEST(Experiment, InitialPointFromFile) {
  const auto dir = scratch_dir("x0");
  fs::create_directories(dir);
  std::ofstream(dir / "x0.txt") << "0.25 -1\n 2\n";
  EXPECT_EQ(resolve_initial_point((dir / "x0.txt").string(), 3), (Vector{{0.25, -1.0, 2.0}}));
  EXPECT_THROW(resolve_initial_point((dir / "x0.txt").string(), 2), DimensionError);
  std::ofstream(dir / "bad.txt") << "1 two 3\n";
  EXPECT_THROW(resolve_initial_point((dir / "bad.txt").string(), 3), ConfigError);
  EXPECT_THROW(resolve_initial_point((dir / "missing.txt").string(), 3), IoError);
  fs::remove_all(dir);
}

TEST(Experiment, RosenbrockPresetsStartWhereAsked) {
  for (const char* preset : {"zeros", "halves"}) {
    ExperimentConfig cfg;
    cfg.problem = {Family::rosenbrock, 2, 0, 0};
    cfg.solvers = {SolverId::dfb_fordif, SolverId::nelder_mead};
    cfg.budget_multiplier = 50;
    cfg.initial_point = preset;
    const auto rep = run_experiment(cfg);
    const auto inst = make_rosenbrock(2);
    const double f1 = inst.objective(resolve_initial_point(preset, 2));
    for (const auto& run : rep.runs) {
      EXPECT_EQ(run.f_initial, f1) << preset;
      EXPECT_LE(run.trace.back().f_best, f1);
    }
  }
}

TEST(Experiment, ReportMatchesTracesOnDisk) {
  const auto dir = scratch_dir("exp");
  ExperimentConfig cfg;
  cfg.problem = {Family::least_squares, 5, 0, 3};
  cfg.solvers = std::vector<SolverId>(std::begin(kAllSolvers), std::end(kAllSolvers));
  cfg.noise_level = 1e-6;
  cfg.budget_multiplier = 40;
  cfg.run_seed = 9;
  cfg.output_dir = dir.string();
  const auto rep = run_experiment(cfg);

  ASSERT_TRUE(fs::exists(dir / "report.json"));
  ASSERT_TRUE(fs::exists(dir / "instance.txt"));
  EXPECT_EQ(InstanceSpec::load((dir / "instance.txt").string()).build().A, cfg.problem.build().A);

  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : rep.entries) files.emplace_back(e.solver, e.trace_path);
  EXPECT_EQ(rank_trace_files(files), rep.ranking());

  const auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["ranking"].get<std::vector<std::string>>(), rep.ranking());
  EXPECT_EQ(j["config"]["budget"].get<long>(), 200);
  EXPECT_EQ(j["config"]["solvers"].size(), 8u);

  for (const auto& run : rep.runs) {
    EXPECT_EQ(run.evaluations, run.declared_cost) << run.solver;
    EXPECT_EQ(run.budget, 200) << run.solver;
    EXPECT_LE(run.overshoot(), 2 * cfg.problem.n) << run.solver;
    for (std::size_t i = 1; i < run.trace.size(); ++i) {
      EXPECT_LE(run.trace[i].f_best, run.trace[i - 1].f_best) << run.solver;
      EXPECT_GE(run.trace[i].evals, run.trace[i - 1].evals) << run.solver;
    }
  }
  fs::remove_all(dir);
}

TEST(Experiment, SerialAndParallelAgree) {
  ExperimentConfig cfg;
  cfg.problem = {Family::image_restoration, 4, 0, 2};
  cfg.solvers = {SolverId::dfc_cendif, SolverId::dfb_fordif, SolverId::rg, SolverId::imfil_fordif};
  cfg.noise_level = 1e-4;
  cfg.budget_multiplier = 30;
  cfg.run_seed = 5;
  const auto a = run_experiment(cfg);
  cfg.parallel = false;
  std::reverse(cfg.solvers.begin(), cfg.solvers.end());
  const auto b = run_experiment(cfg);
  EXPECT_EQ(a.ranking(), b.ranking());
  for (const auto& ra : a.runs) {
    const auto it = std::find_if(b.runs.begin(), b.runs.end(), [&](const RunReport& r) { return r.solver == ra.solver; });
    ASSERT_NE(it, b.runs.end());
    EXPECT_EQ(ra.trace, it->trace) << ra.solver;
  }
}

TEST(Experiment, ParameterOverridesReachTheSolvers) {
  const auto inst = random_instance(Family::least_squares, 3, 0, 1);
  const Vector x0 = Vector::Zero(3);
  const SolverParams p{{"kappa", 0.3}, {"delta_floor_factor", 1e-6}, {"beta", 0.1}};
  const auto dfc = resolved_solver_config(SolverId::dfc_fordif, p, inst, x0, 100);
  EXPECT_EQ(dfc["kappa"].get<double>(), 0.3);
  EXPECT_DOUBLE_EQ(dfc["delta_floor"].get<double>(), 1e-7);
  const auto dfb = resolved_solver_config(SolverId::dfb_cendif, p, inst, x0, 100);
  EXPECT_EQ(dfb["beta"].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(dfb["delta_floor"].get<double>(), 1e-7);
}
