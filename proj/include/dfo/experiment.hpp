#ifndef DFO_EXPERIMENT_HPP
#define DFO_EXPERIMENT_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dfo/baselines.hpp"
#include "dfo/csv.hpp"
#include "dfo/dfb.hpp"
#include "dfo/dfc.hpp"
#include "dfo/problems.hpp"
#include "dfo/trace.hpp"

namespace dfo {

enum class SolverId { dfc_fordif, dfc_cendif, dfb_fordif, dfb_cendif, nelder_mead, imfil_fordif, imfil_cendif, rg };

inline constexpr SolverId kAllSolvers[] = {SolverId::dfc_fordif,   SolverId::dfc_cendif,   SolverId::dfb_fordif,
                                           SolverId::dfb_cendif,   SolverId::nelder_mead,  SolverId::imfil_fordif,
                                           SolverId::imfil_cendif, SolverId::rg};

constexpr std::string_view to_string(SolverId id) noexcept {
  switch (id) {
  case SolverId::dfc_fordif: return "dfc-fordif";
  case SolverId::dfc_cendif: return "dfc-cendif";
  case SolverId::dfb_fordif: return "dfb-fordif";
  case SolverId::dfb_cendif: return "dfb-cendif";
  case SolverId::nelder_mead: return "nelder-mead";
  case SolverId::imfil_fordif: return "imfil-fordif";
  case SolverId::imfil_cendif: return "imfil-cendif";
  case SolverId::rg: return "rg";
  }
  return "unknown";
}

inline std::optional<SolverId> parse_solver_id(std::string_view s) {
  for (auto id : kAllSolvers)
    if (to_string(id) == s) return id;
  return std::nullopt;
}

/// Comma-separated solver ids. Unknown ids are a ConfigError.
inline std::vector<SolverId> parse_solver_list(const std::string& csv) {
  std::vector<SolverId> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    auto id = parse_solver_id(tok);
    if (!id) throw ConfigError("unknown solver id '" + tok + "'");
    out.push_back(*id);
  }
  return out;
}

/// Parameter overrides by name, e.g. {"kappa", 0.3}. Keys that the chosen
/// solver does not understand are ignored by that solver; keys that no solver
/// understands are rejected by validate_params.
using SolverParams = std::map<std::string, double>;

inline void validate_params(const SolverParams& p) {
  static const char* known[] = {"delta1", "C1",      "theta",        "mu",          "r",
                                "kappa",  "eta",     "beta",         "gamma",       "tau_bar",
                                "t_min1", "i_max",   "rg_lipschitz", "rg_smoothing", "imfil_h0",
                                "imfil_scales", "nm_step", "delta_floor_factor"};
  for (const auto& [k, v] : p)
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known))
      throw ConfigError("unknown solver parameter '" + k + "'");
}

namespace detail {
template <class T>
void override(const SolverParams& p, const char* key, T& field) {
  if (auto it = p.find(key); it != p.end()) field = static_cast<T>(it->second);
}
} // namespace detail

inline DfcConfig make_dfc_config(const SolverParams& p, const Vector& x0, long budget) {
  DfcConfig c;
  c.x1 = x0;
  c.budget = budget;
  detail::override(p, "delta1", c.delta1);
  detail::override(p, "C1", c.C1);
  detail::override(p, "theta", c.theta);
  detail::override(p, "mu", c.mu);
  detail::override(p, "r", c.r);
  detail::override(p, "kappa", c.kappa);
  detail::override(p, "i_max", c.i_max);
  detail::override(p, "delta_floor_factor", c.delta_floor_factor);
  return c;
}

inline DfbConfig make_dfb_config(const SolverParams& p, const Vector& x0, long budget) {
  DfbConfig c;
  c.x1 = x0;
  c.budget = budget;
  detail::override(p, "delta1", c.delta1);
  detail::override(p, "C1", c.C1);
  detail::override(p, "theta", c.theta);
  detail::override(p, "mu", c.mu);
  detail::override(p, "eta", c.eta);
  detail::override(p, "beta", c.beta);
  detail::override(p, "gamma", c.gamma);
  detail::override(p, "tau_bar", c.tau_bar);
  detail::override(p, "t_min1", c.t_min1);
  detail::override(p, "i_max", c.i_max);
  detail::override(p, "delta_floor_factor", c.delta_floor_factor);
  return c;
}

inline BaselineConfig make_baseline_config(BaselineKind kind, const SolverParams& p, const ProblemInstance& inst,
                                           const Vector& x0, long budget) {
  BaselineConfig c;
  c.kind = kind;
  c.x1 = x0;
  c.budget = budget;
  double h0 = 0.1;
  int count = 12;
  detail::override(p, "delta1", h0);
  detail::override(p, "imfil_h0", h0);
  detail::override(p, "imfil_scales", count);
  c.imfil_scales = halving_scales(h0, count);
  detail::override(p, "nm_step", c.nm_initial_step);
  if (kind == BaselineKind::rg) {
    c.rg_lipschitz = inst.objective.lipschitz_grad_constant;
    if (auto it = p.find("rg_lipschitz"); it != p.end()) c.rg_lipschitz = it->second;
    if (auto it = p.find("rg_smoothing"); it != p.end()) c.rg_smoothing = it->second;
    else c.rg_smoothing = 1e-6 * (1.0 + x0.norm());
  }
  return c;
}

/// Every parameter the solver will actually use, defaults included.
inline nlohmann::json resolved_solver_config(SolverId id, const SolverParams& p, const ProblemInstance& inst,
                                             const Vector& x0, long budget) {
  nlohmann::json j;
  j["id"] = std::string(to_string(id));
  j["budget"] = budget;
  switch (id) {
  case SolverId::dfc_fordif:
  case SolverId::dfc_cendif: {
    const auto c = make_dfc_config(p, x0, budget);
    j.update({{"delta1", c.delta1}, {"C1", c.C1}, {"theta", c.theta}, {"mu", c.mu}, {"r", c.r},
              {"kappa", c.kappa}, {"i_max", c.i_max}, {"delta_floor", c.delta_floor_factor * c.delta1}});
    break;
  }
  case SolverId::dfb_fordif:
  case SolverId::dfb_cendif: {
    const auto c = make_dfb_config(p, x0, budget);
    j.update({{"delta1", c.delta1}, {"C1", c.C1}, {"theta", c.theta}, {"mu", c.mu}, {"eta", c.eta},
              {"beta", c.beta}, {"gamma", c.gamma}, {"tau_bar", c.tau_bar}, {"t_min1", c.t_min1},
              {"i_max", c.i_max}, {"nu", "delta1/k"}, {"delta_floor", c.delta_floor_factor * c.delta1}});
    break;
  }
  case SolverId::nelder_mead: {
    const auto c = make_baseline_config(BaselineKind::nelder_mead, p, inst, x0, budget);
    j.update({{"reflection", c.nm.reflection}, {"expansion", c.nm.expansion}, {"contraction", c.nm.contraction},
              {"shrink", c.nm.shrink}, {"initial_step", c.nm_initial_step}});
    break;
  }
  case SolverId::imfil_fordif:
  case SolverId::imfil_cendif: {
    const auto c = make_baseline_config(BaselineKind::imfil_forward, p, inst, x0, budget);
    j.update({{"scales", c.imfil_scales}, {"armijo", c.imfil_armijo}, {"max_backtracks", c.imfil_max_backtracks},
              {"stencil_tol", c.imfil_stencil_tol}});
    break;
  }
  case SolverId::rg: {
    const auto c = make_baseline_config(BaselineKind::rg, p, inst, x0, budget);
    j["lipschitz"] = c.rg_lipschitz ? nlohmann::json(*c.rg_lipschitz) : nlohmann::json(nullptr);
    j["smoothing"] = *c.rg_smoothing;
    break;
  }
  }
  return j;
}

/// Stream seed of one solver within an experiment; depends only on the run
/// seed and the solver, not on the order solvers are listed in.
inline std::uint64_t solver_seed(std::uint64_t run_seed, SolverId id) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(id) + 1);
}

inline RunReport run_solver(SolverId id, const ProblemInstance& inst, const Vector& x0, long budget,
                            double noise_level, std::uint64_t seed, const SolverParams& p = {}) {
  Oracle oracle(inst.objective, noise_level, seed);
  RunReport rep;
  switch (id) {
  case SolverId::dfc_fordif: rep = dfc_solve(oracle, Scheme::forward, make_dfc_config(p, x0, budget)); break;
  case SolverId::dfc_cendif: rep = dfc_solve(oracle, Scheme::central, make_dfc_config(p, x0, budget)); break;
  case SolverId::dfb_fordif: rep = dfb_solve(oracle, Scheme::forward, make_dfb_config(p, x0, budget)); break;
  case SolverId::dfb_cendif: rep = dfb_solve(oracle, Scheme::central, make_dfb_config(p, x0, budget)); break;
  case SolverId::nelder_mead:
    rep = nelder_mead_solve(oracle, make_baseline_config(BaselineKind::nelder_mead, p, inst, x0, budget));
    break;
  case SolverId::imfil_fordif:
    rep = imfil_solve(oracle, Scheme::forward, make_baseline_config(BaselineKind::imfil_forward, p, inst, x0, budget));
    break;
  case SolverId::imfil_cendif:
    rep = imfil_solve(oracle, Scheme::central, make_baseline_config(BaselineKind::imfil_central, p, inst, x0, budget));
    break;
  case SolverId::rg: rep = rg_solve(oracle, make_baseline_config(BaselineKind::rg, p, inst, x0, budget), seed); break;
  }
  rep.solver = std::string(to_string(id));
  return rep;
}

struct ExperimentConfig {
  InstanceSpec problem;
  double noise_level = 0.0;
  std::vector<SolverId> solvers;
  SolverParams params;
  long budget_multiplier = 200;
  std::uint64_t run_seed = 0;
  std::string initial_point = "zeros"; // zeros | halves | path to a whitespace-separated vector
  std::string output_dir;             // empty: nothing is written
  bool parallel = true;

  long budget() const { return budget_multiplier * problem.n; }

  void validate() const {
    require(budget_multiplier > 0, "budget multiplier must be positive");
    require(problem.n > 0, "dimension must be positive");
    require(problem.family != Family::rosenbrock || problem.n >= 2, "rosenbrock needs n >= 2");
    require(noise_level >= 0.0, "noise level must be nonnegative");
    require(!solvers.empty(), "no solvers selected");
    validate_params(params);
  }
};

inline Vector resolve_initial_point(const std::string& spec, int n) {
  if (spec == "zeros") return initial_point(InitialPreset::zeros, n);
  if (spec == "halves") return initial_point(InitialPreset::halves, n);
  std::ifstream in(spec);
  if (!in) throw IoError("cannot read initial point file " + spec);
  std::vector<double> v;
  double d;
  while (in >> d) v.push_back(d);
  if (!in.eof()) throw ConfigError("initial point file " + spec + " has a non-numeric entry");
  if (static_cast<int>(v.size()) != n)
    throw DimensionError("initial point has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
  return Eigen::Map<Vector>(v.data(), n);
}

struct ComparisonEntry {
  std::string solver;
  double f_best = 0.0; // final f_best of the trace
  long evaluations = 0;
  long declared_cost = 0;
  long overshoot = 0;
  std::string stop_reason;
  std::string trace_path;
};

struct ComparisonReport {
  nlohmann::json config;
  std::vector<ComparisonEntry> entries; // in ranking order
  std::vector<RunReport> runs;          // in the order the solvers were requested

  std::vector<std::string> ranking() const {
    std::vector<std::string> r;
    for (const auto& e : entries) r.push_back(e.solver);
    return r;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = config;
    j["ranking"] = ranking();
    for (const auto& e : entries)
      j["results"].push_back({{"solver", e.solver},
                              {"f_best", e.f_best},
                              {"evaluations", e.evaluations},
                              {"declared_cost", e.declared_cost},
                              {"overshoot", e.overshoot},
                              {"stop_reason", e.stop_reason},
                              {"trace", e.trace_path}});
    return j;
  }
};

/// Final f_best of a trace; the ranking key.
inline double final_best(const Trace& t, double fallback) { return t.empty() ? fallback : t.back().f_best; }

/// Orders (solver, final f_best) pairs by value, ties by solver id.
inline std::vector<std::string> rank_by_value(std::vector<std::pair<std::string, double>> v) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (auto& [s, _] : v) out.push_back(s);
  return out;
}

/// Re-ranks from trace files on disk: {solver id, csv path}.
inline std::vector<std::string> rank_trace_files(const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::pair<std::string, double>> v;
  for (const auto& [id, path] : files) v.emplace_back(id, final_best(read_csv(path), 0.0));
  return rank_by_value(std::move(v));
}

/// Runs every selected solver on the same instance with the same budget.
/// With an output directory it writes <solver>.csv, instance.txt and
/// report.json there.
inline ComparisonReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProblemInstance inst = cfg.problem.build();
  const Vector x0 = resolve_initial_point(cfg.initial_point, inst.dim);
  const long budget = cfg.budget();

  if (!cfg.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir))
      throw IoError("cannot create output directory " + cfg.output_dir);
  }

  ComparisonReport report;
  nlohmann::json& c = report.config;
  c["problem"] = {{"family", std::string(to_string(cfg.problem.family))},
                  {"n", cfg.problem.n},
                  {"m", inst.A.size() ? inst.A.rows() : 0},
                  {"seed", cfg.problem.seed}};
  c["noise_level"] = cfg.noise_level;
  c["budget_multiplier"] = cfg.budget_multiplier;
  c["budget"] = budget;
  c["run_seed"] = cfg.run_seed;
  c["initial_point"] = cfg.initial_point;
  c["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
  if (inst.objective.lipschitz_grad_constant) c["lipschitz"] = *inst.objective.lipschitz_grad_constant;
  for (auto id : cfg.solvers) {
    auto sc = resolved_solver_config(id, cfg.params, inst, x0, budget);
    sc["seed"] = solver_seed(cfg.run_seed, id);
    c["solvers"].push_back(sc);
  }

  auto job = [&](SolverId id) {
    return run_solver(id, inst, x0, budget, cfg.noise_level, solver_seed(cfg.run_seed, id), cfg.params);
  };
  if (cfg.parallel && cfg.solvers.size() > 1) {
    std::vector<std::future<RunReport>> futs;
    for (auto id : cfg.solvers) futs.push_back(std::async(std::launch::async, job, id));
    for (auto& f : futs) report.runs.push_back(f.get());
  } else {
    for (auto id : cfg.solvers) report.runs.push_back(job(id));
  }

  std::vector<std::pair<std::string, double>> keyed;
  for (const auto& run : report.runs) {
    ComparisonEntry e;
    e.solver = run.solver;
    e.f_best = final_best(run.trace, run.f_initial);
    e.evaluations = run.evaluations;
    e.declared_cost = run.declared_cost;
    e.overshoot = run.overshoot();
    e.stop_reason = std::string(to_string(run.stop_reason));
    if (!cfg.output_dir.empty() && !run.trace.empty()) {
      e.trace_path = (std::filesystem::path(cfg.output_dir) / (run.solver + ".csv")).string();
      emit_csv(run.trace, e.trace_path);
    }
    keyed.emplace_back(e.solver, e.f_best);
    report.entries.push_back(e);
  }
  const auto order = rank_by_value(keyed);
  std::vector<ComparisonEntry> ranked;
  for (const auto& id : order)
    ranked.push_back(*std::find_if(report.entries.begin(), report.entries.end(),
                                   [&](const ComparisonEntry& e) { return e.solver == id; }));
  report.entries = std::move(ranked);

  if (!cfg.output_dir.empty()) {
    cfg.problem.save((std::filesystem::path(cfg.output_dir) / "instance.txt").string());
    const auto path = std::filesystem::path(cfg.output_dir) / "report.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << report.to_json().dump(2) << "\n";
  }
  return report;
}

} // namespace dfo

#endif // DFO_EXPERIMENT_HPP
