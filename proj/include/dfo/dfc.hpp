#ifndef DFO_DFC_HPP
#define DFO_DFC_HPP

#include <cmath>
#include <cstdint>

#include "dfo/gradapprox.hpp"
#include "dfo/oracle.hpp"
#include "dfo/trace.hpp"

namespace dfo {

/// Parameters of the constant-stepsize method. The defaults sit inside the
/// admissible ranges (mu > 2, r > 1, kappa > 0, theta in (0,1)).
struct DfcConfig {
  Vector x1;
  double delta1 = 0.1;
  double C1 = 1.0;
  double theta = 0.5;
  double mu = 4.0;
  double r = 2.0;
  double kappa = 0.5;
  int i_max = 60;
  double delta_floor_factor = std::ldexp(1.0, -60); // floor = factor * delta1
  long budget = 1000;
  bool record_iterates = false;

  void validate(int dim) const {
    require(x1.size() == dim, "x1 dimension does not match the objective");
    require(delta1 > 0.0, "delta1 must be positive");
    require(C1 > 0.0, "C1 must be positive");
    require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    require(mu > 2.0, "mu must exceed 2");
    require(r > 1.0, "r must exceed 1");
    require(kappa > 0.0, "kappa must be positive");
    require(i_max > 0, "i_max must be positive");
    require(budget >= 0, "budget must be nonnegative");
  }

  AdaptiveGradParams grad_params() const { return {mu, theta, i_max, delta_floor_factor * delta1}; }
};

struct DfcState {
  long k = 1;
  Vector x;
  double delta = 0.0;
  double C = 0.0;
  double f_x = 0.0;
  StepStatus last_step = StepStatus::init;

  // Diagnostics of the most recent step.
  Vector g;
  double tau = 0.0;
  long step_cost = 0;
  long escalations = 0;
};

inline DfcState dfc_initial_state(Oracle& oracle, const DfcConfig& cfg) {
  cfg.validate(oracle.dim());
  DfcState s;
  s.x = cfg.x1;
  s.delta = cfg.delta1;
  s.C = cfg.C1;
  s.f_x = oracle.evaluate(cfg.x1);
  return s;
}

/// One iteration: adaptive interval search, then the sufficient-decrease test
///   phi(x - (kappa/C) g) <= phi(x) - kappa (mu - 2) / (2 C mu) ||g||^2.
/// On success x moves and C is kept; otherwise x stays and C <- r C. The
/// candidate value is reused as the new phi(x^k).
inline DfcState dfc_step(DfcState state, Oracle& oracle, Scheme scheme, const DfcConfig& cfg) {
  state.step_cost = 0;
  state.tau = 0.0;
  if (state.last_step == StepStatus::stopped || state.last_step == StepStatus::budget) return state;
  if (oracle.eval_count() >= cfg.budget) {
    state.last_step = StepStatus::budget;
    return state;
  }

  const auto res = adaptive_gradient(oracle, scheme, state.x, state.delta, state.C, cfg.grad_params(),
                                     std::nullopt, cfg.budget);
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

  if (oracle.eval_count() >= cfg.budget) {
    state.last_step = StepStatus::budget;
    return state;
  }
  const double step = cfg.kappa / state.C;
  const Vector candidate = state.x - step * res.g;
  const double f_candidate = oracle.evaluate(candidate);
  state.step_cost += 1;
  const double decrease = cfg.kappa * (cfg.mu - 2.0) / (2.0 * state.C * cfg.mu) * res.g.squaredNorm();
  if (f_candidate <= state.f_x - decrease) {
    state.x = candidate;
    state.f_x = f_candidate;
    state.tau = step;
    state.last_step = StepStatus::accepted;
  } else {
    state.C *= cfg.r;
    ++state.escalations;
    state.last_step = StepStatus::rejected;
  }
  ++state.k;
  return state;
}

/// Runs the constant-stepsize method on an existing oracle until the budget
/// is spent or the interval search reports near-stationarity.
inline RunReport dfc_solve(Oracle& oracle, Scheme scheme, const DfcConfig& cfg) {
  RunReport rep;
  rep.solver = scheme == Scheme::forward ? "dfc-fordif" : "dfc-cendif";
  rep.budget = cfg.budget;
  const long start = oracle.eval_count();

  DfcState s = dfc_initial_state(oracle, cfg);
  rep.declared_cost = 1;
  rep.f_initial = rep.f_best = s.f_x;
  rep.x_best = s.x;
  if (cfg.record_iterates) rep.iterates.push_back(s.x);

  long iter = 0;
  while (true) {
    const double C_used = s.C;
    s = dfc_step(std::move(s), oracle, scheme, cfg);
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
    rec.tau = s.tau;
    rec.step_status = s.last_step;
    rep.trace.push_back(rec);
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

inline RunReport dfc_run(const Objective& objective, Scheme scheme, const DfcConfig& cfg, double noise_level = 0.0,
                         std::uint64_t seed = 0) {
  Oracle oracle(objective, noise_level, seed);
  return dfc_solve(oracle, scheme, cfg);
}

} // namespace dfo

#endif // DFO_DFC_HPP
