#ifndef DFO_GRADAPPROX_HPP
#define DFO_GRADAPPROX_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string_view>

#include "dfo/core.hpp"
#include "dfo/oracle.hpp"

namespace dfo {

enum class Scheme { forward, central };

constexpr std::string_view to_string(Scheme s) noexcept {
  return s == Scheme::forward ? "forward" : "central";
}

/// Oracle calls consumed by one gradient approximation in dimension n.
constexpr long evals_per_call(Scheme s, int n) noexcept {
  return s == Scheme::forward ? static_cast<long>(n) + 1 : 2L * n;
}

/// Side information from one stencil sweep. Implicit filtering uses it for
/// its stencil-failure test.
struct StencilInfo {
  double center_value = std::numeric_limits<double>::quiet_NaN(); // forward only
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_point;
};

namespace detail {

inline void check_interval(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("finite difference interval must be positive");
}

inline void track(StencilInfo* info, const Vector& p, double v) {
  if (info && v < info->best_value) {
    info->best_value = v;
    info->best_point = p;
  }
}

} // namespace detail

/// (1/delta) * sum_i (phi(x + delta e_i) - phi(x)) e_i, with phi(x) evaluated
/// once. Costs n + 1 oracle calls.
inline Vector forward_diff(Oracle& oracle, const Vector& x, double delta, StencilInfo* info = nullptr) {
  detail::check_interval(delta);
  const double f0 = oracle.evaluate(x);
  if (info) info->center_value = f0;
  Vector g(x.size());
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + delta;
    const double fi = oracle.evaluate(p);
    detail::track(info, p, fi);
    g[i] = (fi - f0) / delta;
    p[i] = x[i];
  }
  return g;
}

/// (1/(2 delta)) * sum_i (phi(x + delta e_i) - phi(x - delta e_i)) e_i.
/// Costs 2n oracle calls.
inline Vector central_diff(Oracle& oracle, const Vector& x, double delta, StencilInfo* info = nullptr) {
  detail::check_interval(delta);
  Vector g(x.size());
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + delta;
    const double fp = oracle.evaluate(p);
    detail::track(info, p, fp);
    p[i] = x[i] - delta;
    const double fm = oracle.evaluate(p);
    detail::track(info, p, fm);
    g[i] = (fp - fm) / (2.0 * delta);
    p[i] = x[i];
  }
  return g;
}

inline Vector approximate_gradient(Scheme s, Oracle& oracle, const Vector& x, double delta,
                                   StencilInfo* info = nullptr) {
  return s == Scheme::forward ? forward_diff(oracle, x, delta, info) : central_diff(oracle, x, delta, info);
}

/// Noiseless error bound L * sqrt(n) * delta / 2 shared by both schemes
/// when the gradient is L-Lipschitz on the ball of radius delta around x.
inline double fd_error_bound(double L, int dim, double delta) {
  require(L > 0.0, "Lipschitz constant must be positive");
  require(dim > 0, "dimension must be positive");
  require(delta > 0.0, "interval must be positive");
  return L * std::sqrt(static_cast<double>(dim)) * delta / 2.0;
}

struct AdaptiveGradParams {
  double mu = 4.0;    // > 2
  double theta = 0.5; // in (0, 1)
  int i_max = 60;
  double delta_floor = 0.0; // intervals below this count as exhaustion

  void validate() const {
    require(mu > 2.0, "mu must exceed 2");
    require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    require(i_max > 0, "i_max must be positive");
    require(delta_floor >= 0.0, "delta floor must be nonnegative");
  }
};

struct AdaptiveGradResult {
  Vector g;                 // last computed approximation (accepted unless exhausted)
  double delta_next = 0.0;  // theta^inner_steps * delta_k
  int inner_steps = 0;
  bool exhausted = false;   // no qualifying i before i_max or the interval floor
  bool budget_hit = false;  // stopped before a scheme call because the budget was spent
  long evals = 0;           // declared cost of the scheme calls made
};

/// Shared interval search: the smallest i >= 0 with
///   g = G(x, min{theta^i delta_k, nu_k}),  ||g|| > mu * C_k * theta^i * delta_k.
///
/// Without nu_k the probe interval is theta^i delta_k alone. Each scheme call
/// is only started while oracle.eval_count() < budget (when a budget is set).
inline AdaptiveGradResult adaptive_gradient(Oracle& oracle, Scheme scheme, const Vector& x, double delta_k,
                                            double C_k, const AdaptiveGradParams& p,
                                            std::optional<double> nu_k = std::nullopt,
                                            std::optional<long> budget = std::nullopt) {
  require(delta_k > 0.0, "delta_k must be positive");
  require(C_k > 0.0, "C_k must be positive");
  p.validate();
  if (nu_k) require(*nu_k > 0.0, "nu_k must be positive when given");

  AdaptiveGradResult out;
  const long cost = evals_per_call(scheme, oracle.dim());
  double radius = delta_k;
  for (int i = 0; i < p.i_max; ++i, radius *= p.theta) {
    if (radius < p.delta_floor) break;
    if (budget && oracle.eval_count() >= *budget) {
      out.budget_hit = true;
      out.inner_steps = i;
      out.delta_next = radius;
      return out;
    }
    const double h = nu_k ? std::min(radius, *nu_k) : radius;
    out.g = approximate_gradient(scheme, oracle, x, h);
    out.evals += cost;
    out.inner_steps = i;
    out.delta_next = radius;
    if (out.g.norm() > p.mu * C_k * radius) return out;
  }
  out.exhausted = true;
  return out;
}

} // namespace dfo

#endif // DFO_GRADAPPROX_HPP
