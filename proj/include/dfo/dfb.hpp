#ifndef DFO_DFB_HPP
#define DFO_DFB_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

#include "dfo/gradapprox.hpp"
#include "dfo/oracle.hpp"
#include "dfo/trace.hpp"

namespace dfo {

/// Parameters of the backtracking method.
///
/// nu(k) supplies the manually controlled interval cap nu_k for k >= 1 and
/// must decrease to zero. When unset, nu_k = delta1 / k.
struct DfbConfig {
  Vector x1;
  double delta1 = 0.1;
  double C1 = 1.0;
  double theta = 0.5;
  double mu = 4.0;
  double eta = 2.0;
  double beta = 0.25;
  double gamma = 0.5;
  double tau_bar = 1.0;
  double t_min1 = 1e-10;
  std::function<double(long)> nu;
  int i_max = 60;
  double delta_floor_factor = std::ldexp(1.0, -60);
  long budget = 1000;
  bool record_iterates = false;

  void validate(int dim) const {
    require(x1.size() == dim, "x1 dimension does not match the objective");
    require(delta1 > 0.0, "delta1 must be positive");
    require(C1 > 0.0, "C1 must be positive");
    require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    require(mu > 2.0, "mu must exceed 2");
    require(eta > 1.0, "eta must exceed 1");
    require(beta > 0.0 && beta < 0.5, "beta must lie in (0, 1/2)");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(tau_bar > 0.0, "tau_bar must be positive");
    require(t_min1 > 0.0 && t_min1 < tau_bar, "t_min1 must lie in (0, tau_bar)");
    require(i_max > 0, "i_max must be positive");
    require(budget >= 0, "budget must be nonnegative");
  }

  double nu_at(long k) const { return nu ? nu(k) : delta1 / static_cast<double>(k); }
  AdaptiveGradParams grad_params() const { return {mu, theta, i_max, delta_floor_factor * delta1}; }
};

struct BacktrackResult {
  double t = 0.0;
  bool sufficient = false;  // outcome of the last evaluated decrease test
  long evals_used = 0;
  double f_at_t = 0.0;      // phi(x - t g) at the returned t
  bool budget_hit = false;
};

/// Armijo backtracking with a floor. Starting from t = tau_bar:
///   while phi(x - t g) > f_x - beta t ||g||^2 and t >= t_min:  t <- gamma t
/// The decrease test is evaluated first, so the loop may exit with t < t_min
/// after one evaluation below the floor.
inline BacktrackResult backtrack(Oracle& oracle, const Vector& x, const Vector& g, double f_x, double beta,
                                 double gamma, double tau_bar, double t_min,
                                 std::optional<long> budget = std::nullopt) {
  require(g.size() == x.size(), "direction dimension mismatch");
  require(t_min > 0.0 && t_min < tau_bar, "t_min must lie in (0, tau_bar)");
  const double gg = g.squaredNorm();
  BacktrackResult out;
  out.t = tau_bar;
  while (true) {
    if (budget && oracle.eval_count() >= *budget) {
      out.budget_hit = true;
      return out;
    }
    out.f_at_t = oracle.evaluate(x - out.t * g);
    ++out.evals_used;
    out.sufficient = !(out.f_at_t > f_x - beta * out.t * gg);
    if (out.sufficient || out.t < t_min) return out;
    out.t *= gamma;
  }
}

struct DfbState {
  long k = 1;
  Vector x;
  double delta = 0.0;
  double C = 0.0;
  double t_min = 0.0;
  double f_x = 0.0;
  double last_tau = 0.0;
  StepStatus last_step = StepStatus::init;

  Vector g;
  long step_cost = 0;
  long escalations = 0;   // C <- eta C
  long floor_cuts = 0;    // t_min <- gamma t_min
};

inline DfbState dfb_initial_state(Oracle& oracle, const DfbConfig& cfg) {
  cfg.validate(oracle.dim());
  DfbState s;
  s.x = cfg.x1;
  s.delta = cfg.delta1;
  s.C = cfg.C1;
  s.t_min = cfg.t_min1;
  s.f_x = oracle.evaluate(cfg.x1);
  return s;
}

inline DfbState dfb_step(DfbState state, Oracle& oracle, Scheme scheme, const DfbConfig& cfg) {
  state.step_cost = 0;
  state.last_tau = 0.0;
  if (state.last_step == StepStatus::stopped || state.last_step == StepStatus::budget) return state;
  if (oracle.eval_count() >= cfg.budget) {
    state.last_step = StepStatus::budget;
    return state;
  }

  // Step 1: approximate gradient with the interval capped by nu_k.
  const double nu_k = cfg.nu_at(state.k);
  require(nu_k > 0.0, "nu_k must be positive");
  const auto res = adaptive_gradient(oracle, scheme, state.x, state.delta, state.C, cfg.grad_params(), nu_k,
                                     cfg.budget);
  state.step_cost += res.evals;
  state.g = res.g;
  if (res.budget_hit) {
    state.last_step = StepStatus::budget;
    return state;
  }
  if (res.exhausted) {
    state.last_step = StepStatus::stopped;
    return state;
  }
  state.delta = res.delta_next;

  // Step 2: linesearch.
  const auto ls =
      backtrack(oracle, state.x, res.g, state.f_x, cfg.beta, cfg.gamma, cfg.tau_bar, state.t_min, cfg.budget);
  state.step_cost += ls.evals_used;
  if (ls.budget_hit) {
    state.last_step = StepStatus::budget;
    return state;
  }

  // Steps 3 and 4.
  if (ls.t >= state.t_min) {
    state.last_tau = ls.t;
    state.x = state.x - ls.t * res.g;
    state.f_x = ls.f_at_t;
    state.last_step = StepStatus::accepted;
  } else {
    state.C *= cfg.eta;
    state.t_min *= cfg.gamma;
    ++state.escalations;
    ++state.floor_cuts;
    state.last_step = StepStatus::null_step;
  }
  ++state.k;
  return state;
}

inline RunReport dfb_solve(Oracle& oracle, Scheme scheme, const DfbConfig& cfg) {
  RunReport rep;
  rep.solver = scheme == Scheme::forward ? "dfb-fordif" : "dfb-cendif";
  rep.budget = cfg.budget;
  const long start = oracle.eval_count();

  DfbState s = dfb_initial_state(oracle, cfg);
  rep.declared_cost = 1;
  rep.f_initial = rep.f_best = s.f_x;
  rep.x_best = s.x;
  if (cfg.record_iterates) rep.iterates.push_back(s.x);

  long iter = 0;
  while (true) {
    const double C_used = s.C;
    s = dfb_step(std::move(s), oracle, scheme, cfg);
    rep.declared_cost += s.step_cost;
    if (s.step_cost == 0) break;

    ++iter;
    if (s.f_x < rep.f_best) {
      rep.f_best = s.f_x;
      rep.x_best = s.x;
    }
    TraceRecord rec;
    rec.iter = iter;
    rec.evals = oracle.eval_count() - start;
    rec.f_current = s.f_x;
    rec.f_best = rep.f_best;
    rec.grad_norm_approx = s.g.size() ? s.g.norm() : 0.0;
    rec.delta = s.delta;
    rec.C = C_used;
    rec.tau = s.last_tau;
    rec.step_status = s.last_step;
    rep.trace.push_back(rec);
    rep.tau_sum += s.last_tau;
    if (cfg.record_iterates) {
      rep.iterates.push_back(s.x);
      rep.gradients.push_back(s.g);
    }
    if (s.last_step == StepStatus::stopped || s.last_step == StepStatus::budget) break;
  }
  rep.stop_reason = s.last_step == StepStatus::stopped ? StopReason::stationary : StopReason::budget;
  rep.x_final = s.x;
  rep.C_final = s.C;
  rep.evaluations = oracle.eval_count() - start;
  return rep;
}

inline RunReport dfb_run(const Objective& objective, Scheme scheme, const DfbConfig& cfg, double noise_level = 0.0,
                         std::uint64_t seed = 0) {
  Oracle oracle(objective, noise_level, seed);
  return dfb_solve(oracle, scheme, cfg);
}

} // namespace dfo

#endif // DFO_DFB_HPP
