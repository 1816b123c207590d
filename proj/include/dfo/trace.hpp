#ifndef DFO_TRACE_HPP
#define DFO_TRACE_HPP

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfo/core.hpp"

namespace dfo {

enum class StepStatus { init, accepted, rejected, null_step, stopped, budget };

constexpr std::string_view to_string(StepStatus s) noexcept {
  switch (s) {
  case StepStatus::init: return "init";
  case StepStatus::accepted: return "accepted";
  case StepStatus::rejected: return "rejected";
  case StepStatus::null_step: return "null";
  case StepStatus::stopped: return "stopped";
  case StepStatus::budget: return "budget";
  }
  return "unknown";
}

inline std::optional<StepStatus> parse_step_status(std::string_view s) {
  for (auto st : {StepStatus::init, StepStatus::accepted, StepStatus::rejected, StepStatus::null_step,
                  StepStatus::stopped, StepStatus::budget})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

/// One row per iteration. Fields that do not apply to a solver are 0.
struct TraceRecord {
  long iter = 0;
  long evals = 0; // cumulative oracle calls after this iteration
  double f_current = 0.0;
  double f_best = 0.0;
  double grad_norm_approx = 0.0;
  double delta = 0.0; // delta_{k+1}, or the current scale for implicit filtering
  double C = 0.0;
  double tau = 0.0;
  StepStatus step_status = StepStatus::accepted;

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

enum class StopReason { budget, stationary, schedule_done, iteration_limit };

constexpr std::string_view to_string(StopReason r) noexcept {
  switch (r) {
  case StopReason::budget: return "budget";
  case StopReason::stationary: return "stationary";
  case StopReason::schedule_done: return "schedule_done";
  case StopReason::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

struct RunReport {
  std::string solver;
  Trace trace;
  double f_initial = 0.0; // phi(x^1), always evaluated once
  double f_best = std::numeric_limits<double>::infinity();
  Vector x_best;
  Vector x_final;
  double C_final = 0.0;
  long evaluations = 0;   // oracle counter at exit
  long declared_cost = 0; // sum of the declared costs of every operation performed
  long budget = 0;
  StopReason stop_reason = StopReason::budget;
  double tau_sum = 0.0;   // sum of tau_k, reported by the general scheme

  // Per-iteration iterates x^k (k = 1, ..., K+1) and approximate gradients
  // g^k, filled only when the solver is asked to record them.
  std::vector<Vector> iterates;
  std::vector<Vector> gradients;

  long overshoot() const { return evaluations > budget ? evaluations - budget : 0; }
};

} // namespace dfo

#endif // DFO_TRACE_HPP
