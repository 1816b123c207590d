#ifndef DFO_GDF_HPP
#define DFO_GDF_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "dfo/gradapprox.hpp"
#include "dfo/oracle.hpp"
#include "dfo/trace.hpp"

namespace dfo {

/// State-dependent stepsize rule tau_k = rule(k, x^k, g^k).
using StepsizeRule = std::function<double(long, const Vector&, const Vector&)>;
/// Either an explicit sequence (tau_1, tau_2, ...) or a rule.
using StepsizePolicy = std::variant<std::vector<double>, StepsizeRule>;

/// General scheme with caller-supplied C_k and tau_k. Used for local
/// convergence studies; it has no globalization of its own.
struct GdfConfig {
  Vector x1;
  double delta1 = 0.1;
  std::function<double(long)> C_seq = [](long) { return 1.0; };
  StepsizePolicy tau;
  std::function<double(long)> nu_seq; // unset: no cap on the interval
  double theta = 0.5;
  double mu = 4.0;
  int i_max = 60;
  double delta_floor_factor = std::ldexp(1.0, -60);
  long budget = 1000;
  long max_iterations = std::numeric_limits<long>::max();
  bool monitor_values = true; // evaluate phi(x^{k+1}) for the trace, one call per iteration
  bool record_iterates = false;

  void validate(int dim) const {
    require(x1.size() == dim, "x1 dimension does not match the objective");
    require(delta1 > 0.0, "delta1 must be positive");
    require(static_cast<bool>(C_seq), "C_seq must be set");
    require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    require(mu > 2.0, "mu must exceed 2");
    require(i_max > 0, "i_max must be positive");
    require(budget >= 0, "budget must be nonnegative");
    if (const auto* seq = std::get_if<std::vector<double>>(&tau))
      for (double t : *seq) require(t >= 0.0, "explicit stepsizes must be nonnegative");
    else
      require(static_cast<bool>(std::get<StepsizeRule>(tau)), "stepsize rule must be set");
  }
};

struct GdfReport : RunReport {
  long clamped_steps = 0; // rule returned a negative stepsize, replaced by 0
};

inline GdfReport gdf_solve(Oracle& oracle, Scheme scheme, const GdfConfig& cfg) {
  cfg.validate(oracle.dim());
  GdfReport rep;
  rep.solver = scheme == Scheme::forward ? "gdf-fordif" : "gdf-cendif";
  rep.budget = cfg.budget;
  const long start = oracle.eval_count();

  Vector x = cfg.x1;
  double delta = cfg.delta1;
  double f_x = oracle.evaluate(x);
  rep.declared_cost = 1;
  rep.f_initial = rep.f_best = f_x;
  rep.x_best = x;
  if (cfg.record_iterates) rep.iterates.push_back(x);

  const auto params = AdaptiveGradParams{cfg.mu, cfg.theta, cfg.i_max, cfg.delta_floor_factor * cfg.delta1};
  rep.stop_reason = StopReason::budget;
  for (long k = 1;; ++k) {
    if (k > cfg.max_iterations) {
      rep.stop_reason = StopReason::iteration_limit;
      break;
    }
    if (const auto* seq = std::get_if<std::vector<double>>(&cfg.tau); seq && k > static_cast<long>(seq->size())) {
      rep.stop_reason = StopReason::iteration_limit;
      break;
    }
    if (oracle.eval_count() >= cfg.budget) break;

    const double C_k = cfg.C_seq(k);
    require(C_k > 0.0, "C_k must be positive");
    std::optional<double> nu_k;
    if (cfg.nu_seq) {
      nu_k = cfg.nu_seq(k);
      require(*nu_k > 0.0, "nu_k must be positive");
    }
    const auto res = adaptive_gradient(oracle, scheme, x, delta, C_k, params, nu_k, cfg.budget);
    rep.declared_cost += res.evals;
    if (res.budget_hit && res.evals == 0) break;

    TraceRecord rec;
    rec.iter = k;
    rec.grad_norm_approx = res.g.size() ? res.g.norm() : 0.0;
    rec.C = C_k;
    if (res.budget_hit || res.exhausted) {
      rec.delta = delta;
      rec.step_status = res.exhausted ? StepStatus::stopped : StepStatus::budget;
      rec.evals = oracle.eval_count() - start;
      rec.f_current = f_x;
      rec.f_best = rep.f_best;
      rep.trace.push_back(rec);
      if (res.exhausted) rep.stop_reason = StopReason::stationary;
      break;
    }
    delta = res.delta_next;

    double tau_k = 0.0;
    if (const auto* seq = std::get_if<std::vector<double>>(&cfg.tau))
      tau_k = (*seq)[static_cast<std::size_t>(k - 1)];
    else
      tau_k = std::get<StepsizeRule>(cfg.tau)(k, x, res.g);
    if (tau_k < 0.0 || std::isnan(tau_k)) {
      tau_k = 0.0;
      ++rep.clamped_steps;
    }

    x -= tau_k * res.g;
    rep.tau_sum += tau_k;
    if (cfg.monitor_values) {
      f_x = oracle.evaluate(x);
      rep.declared_cost += 1;
    }
    if (f_x < rep.f_best) {
      rep.f_best = f_x;
      rep.x_best = x;
    }
    rec.delta = delta;
    rec.tau = tau_k;
    rec.step_status = StepStatus::accepted;
    rec.evals = oracle.eval_count() - start;
    rec.f_current = f_x;
    rec.f_best = rep.f_best;
    rep.trace.push_back(rec);
    if (cfg.record_iterates) {
      rep.iterates.push_back(x);
      rep.gradients.push_back(res.g);
    }
  }
  rep.x_final = x;
  rep.C_final = rep.trace.empty() ? cfg.C_seq(1) : rep.trace.back().C;
  rep.evaluations = oracle.eval_count() - start;
  return rep;
}

inline GdfReport gdf_run(const Objective& objective, Scheme scheme, const GdfConfig& cfg, double noise_level = 0.0,
                         std::uint64_t seed = 0) {
  Oracle oracle(objective, noise_level, seed);
  return gdf_solve(oracle, scheme, cfg);
}

} // namespace dfo

#endif // DFO_GDF_HPP
