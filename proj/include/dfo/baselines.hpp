#ifndef DFO_BASELINES_HPP
#define DFO_BASELINES_HPP

// Competitor solvers for comparative benchmarking. These are faithful
// variants of the standard published algorithms, not ports of any specific
// third-party code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "dfo/gradapprox.hpp"
#include "dfo/oracle.hpp"
#include "dfo/trace.hpp"

namespace dfo {

enum class BaselineKind { nelder_mead, imfil_forward, imfil_central, rg };

constexpr std::string_view to_string(BaselineKind k) noexcept {
  switch (k) {
  case BaselineKind::nelder_mead: return "nelder-mead";
  case BaselineKind::imfil_forward: return "imfil-fordif";
  case BaselineKind::imfil_central: return "imfil-cendif";
  case BaselineKind::rg: return "rg";
  }
  return "unknown";
}

struct NelderMeadCoefficients {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

/// h_j = 2^-j * h0 for j = 0, ..., count - 1.
inline std::vector<double> halving_scales(double h0 = 0.1, int count = 12) {
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) s[static_cast<std::size_t>(j)] = std::ldexp(h0, -j);
  return s;
}

struct BaselineConfig {
  BaselineKind kind = BaselineKind::nelder_mead;
  Vector x1;
  long budget = 1000;

  std::optional<double> rg_lipschitz;  // required for rg
  std::optional<double> rg_smoothing;  // default 1e-6 (1 + ||x1||)

  std::vector<double> imfil_scales = halving_scales();
  double imfil_armijo = 1e-4;
  int imfil_max_backtracks = 20;
  double imfil_stencil_tol = 1e-2; // scale is abandoned when ||g|| <= tol * h

  NelderMeadCoefficients nm;
  double nm_initial_step = 0.05;

  void validate(int dim) const {
    require(x1.size() == dim, "x1 dimension does not match the objective");
    require(budget >= 0, "budget must be nonnegative");
    switch (kind) {
    case BaselineKind::rg:
      require(rg_lipschitz.has_value(), "rg requires a Lipschitz constant");
      require(*rg_lipschitz > 0.0, "rg Lipschitz constant must be positive");
      if (rg_smoothing) require(*rg_smoothing > 0.0, "rg smoothing must be positive");
      break;
    case BaselineKind::imfil_forward:
    case BaselineKind::imfil_central:
      require(!imfil_scales.empty(), "imfil needs at least one scale");
      for (std::size_t j = 0; j < imfil_scales.size(); ++j) {
        require(imfil_scales[j] > 0.0, "imfil scales must be positive");
        if (j > 0) require(imfil_scales[j] < imfil_scales[j - 1], "imfil scales must strictly decrease");
      }
      require(imfil_max_backtracks > 0, "imfil needs at least one backtrack");
      break;
    case BaselineKind::nelder_mead:
      require(nm.reflection > 0.0 && nm.expansion > 1.0 && nm.expansion > nm.reflection,
              "invalid Nelder-Mead reflection/expansion");
      require(nm.contraction > 0.0 && nm.contraction < 1.0, "invalid Nelder-Mead contraction");
      require(nm.shrink > 0.0 && nm.shrink < 1.0, "invalid Nelder-Mead shrink");
      break;
    }
  }
};

namespace detail {

inline TraceRecord make_record(long iter, long evals, double f_cur, double f_best, StepStatus st) {
  TraceRecord r;
  r.iter = iter;
  r.evals = evals;
  r.f_current = f_cur;
  r.f_best = f_best;
  r.step_status = st;
  return r;
}

} // namespace detail

/// Nelder-Mead with an axis-aligned initial simplex
/// x1 + step * max(|x1_i|, 1) e_i. One trace row per iteration, holding the
/// best vertex value.
inline RunReport nelder_mead_solve(Oracle& oracle, const BaselineConfig& cfg) {
  const int n = oracle.dim();
  cfg.validate(n);
  RunReport rep;
  rep.solver = "nelder-mead";
  rep.budget = cfg.budget;
  const long start = oracle.eval_count();
  const auto& c = cfg.nm;
  auto spent = [&] { return oracle.eval_count() >= cfg.budget; };

  std::vector<Vector> v(static_cast<std::size_t>(n) + 1, cfg.x1);
  std::vector<double> fv(v.size());
  fv[0] = oracle.evaluate(v[0]);
  rep.f_initial = fv[0];
  rep.declared_cost = 1;
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i) + 1][i] += cfg.nm_initial_step * std::max(std::abs(cfg.x1[i]), 1.0);
    if (spent()) break;
    fv[static_cast<std::size_t>(i) + 1] = oracle.evaluate(v[static_cast<std::size_t>(i) + 1]);
    ++rep.declared_cost;
  }
  const bool complete = rep.declared_cost == n + 1;

  std::vector<std::size_t> order(v.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<Vector> v2;
    std::vector<double> f2;
    for (auto i : order) {
      v2.push_back(v[i]);
      f2.push_back(fv[i]);
    }
    v.swap(v2);
    fv.swap(f2);
  };

  if (!complete) {
    // Budget smaller than the simplex: only the evaluated vertices count.
    v.resize(static_cast<std::size_t>(rep.declared_cost));
    fv.resize(v.size());
  }
  sort_simplex();
  long iter = 0;
  rep.trace.push_back(detail::make_record(iter, oracle.eval_count() - start, fv[0], fv[0], StepStatus::init));

  rep.stop_reason = StopReason::budget;
  while (complete && !spent()) {
    const std::size_t w = static_cast<std::size_t>(n);
    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i < w; ++i) centroid += v[i];
    centroid /= static_cast<double>(n);

    bool halted = false;
    auto eval = [&](const Vector& p, double& out) {
      if (spent()) {
        halted = true;
        return false;
      }
      out = oracle.evaluate(p);
      ++rep.declared_cost;
      return true;
    };

    const Vector xr = centroid + c.reflection * (centroid - v[w]);
    double fr = 0.0;
    if (!eval(xr, fr)) break;
    bool do_shrink = false;
    if (fr < fv[0]) {
      const Vector xe = centroid + c.expansion * (xr - centroid);
      double fe = 0.0;
      if (eval(xe, fe) && fe < fr) {
        v[w] = xe;
        fv[w] = fe;
      } else {
        v[w] = xr;
        fv[w] = fr;
      }
    } else if (fr < fv[w - 1]) {
      v[w] = xr;
      fv[w] = fr;
    } else if (fr < fv[w]) {
      const Vector xc = centroid + c.contraction * (xr - centroid);
      double fc = 0.0;
      if (!eval(xc, fc)) break;
      if (fc <= fr) {
        v[w] = xc;
        fv[w] = fc;
      } else {
        do_shrink = true;
      }
    } else {
      const Vector xcc = centroid - c.contraction * (centroid - v[w]);
      double fcc = 0.0;
      if (!eval(xcc, fcc)) break;
      if (fcc < fv[w]) {
        v[w] = xcc;
        fv[w] = fcc;
      } else {
        do_shrink = true;
      }
    }
    if (do_shrink) {
      if (spent()) break;
      for (std::size_t i = 1; i < v.size(); ++i) {
        v[i] = v[0] + c.shrink * (v[i] - v[0]);
        fv[i] = oracle.evaluate(v[i]);
        ++rep.declared_cost;
      }
    }
    sort_simplex();
    ++iter;
    const double best = std::min(fv[0], rep.trace.back().f_best);
    rep.trace.push_back(detail::make_record(iter, oracle.eval_count() - start, fv[0], best,
                                            halted ? StepStatus::budget : StepStatus::accepted));
    if (halted) break;
  }

  rep.f_best = rep.trace.back().f_best;
  rep.x_best = v[0];
  rep.x_final = v[0];
  rep.evaluations = oracle.eval_count() - start;
  return rep;
}

/// Implicit filtering, steepest-descent variant. For each scale h (in
/// order) it repeats: difference gradient at interval h, Armijo backtracking
/// from t = 1. The scale is abandoned on stencil failure (no stencil point
/// beats the center), on ||g|| <= tol * h, or on linesearch failure.
inline RunReport imfil_solve(Oracle& oracle, Scheme scheme, const BaselineConfig& cfg) {
  const int n = oracle.dim();
  cfg.validate(n);
  RunReport rep;
  rep.solver = scheme == Scheme::forward ? "imfil-fordif" : "imfil-cendif";
  rep.budget = cfg.budget;
  const long start = oracle.eval_count();
  auto spent = [&] { return oracle.eval_count() >= cfg.budget; };

  Vector x = cfg.x1;
  double f_x = oracle.evaluate(x);
  rep.declared_cost = 1;
  rep.f_initial = rep.f_best = f_x;
  rep.x_best = x;

  long iter = 0;
  rep.stop_reason = StopReason::schedule_done;
  for (double h : cfg.imfil_scales) {
    bool next_scale = false;
    while (!next_scale) {
      if (spent()) {
        rep.stop_reason = StopReason::budget;
        break;
      }
      StencilInfo info;
      const Vector g = approximate_gradient(scheme, oracle, x, h, &info);
      rep.declared_cost += evals_per_call(scheme, n);
      if (scheme == Scheme::forward) f_x = info.center_value;
      const double gn = g.norm();

      TraceRecord rec;
      rec.iter = ++iter;
      rec.grad_norm_approx = gn;
      rec.delta = h;
      rec.step_status = StepStatus::rejected;

      if (info.best_value >= f_x || gn <= cfg.imfil_stencil_tol * h) {
        next_scale = true;
      } else {
        double t = 1.0;
        bool ok = false;
        bool halted = false;
        for (int j = 0; j < cfg.imfil_max_backtracks; ++j, t *= 0.5) {
          if (spent()) {
            halted = true;
            break;
          }
          const Vector trial = x - t * g;
          const double ft = oracle.evaluate(trial);
          ++rep.declared_cost;
          if (ft <= f_x - cfg.imfil_armijo * t * gn * gn) {
            x = trial;
            f_x = ft;
            ok = true;
            break;
          }
        }
        if (ok) {
          rec.tau = t;
          rec.step_status = StepStatus::accepted;
        } else if (halted) {
          rec.step_status = StepStatus::budget;
        } else {
          next_scale = true;
        }
      }
      if (f_x < rep.f_best) {
        rep.f_best = f_x;
        rep.x_best = x;
      }
      rec.f_current = f_x;
      rec.f_best = rep.f_best;
      rec.evals = oracle.eval_count() - start;
      rep.trace.push_back(rec);
      if (rec.step_status == StepStatus::budget) {
        rep.stop_reason = StopReason::budget;
        break;
      }
    }
    if (rep.stop_reason == StopReason::budget) break;
  }
  rep.x_final = x;
  rep.evaluations = oracle.eval_count() - start;
  return rep;
}

/// Two-point Gaussian random gradient-free method:
///   g = (phi(x + sigma u) - phi(x)) / sigma * u,  x <- x - g / (4 (n + 4) L).
/// Two oracle calls per iteration. Directions come from a generator seeded
/// with derive_seed(seed, 1).
inline RunReport rg_solve(Oracle& oracle, const BaselineConfig& cfg, std::uint64_t seed) {
  const int n = oracle.dim();
  cfg.validate(n);
  RunReport rep;
  rep.solver = "rg";
  rep.budget = cfg.budget;
  const long start = oracle.eval_count();
  const double L = *cfg.rg_lipschitz;
  const double sigma = cfg.rg_smoothing.value_or(1e-6 * (1.0 + cfg.x1.norm()));
  const double h = 1.0 / (4.0 * (n + 4.0) * L);
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::normal_distribution<double> z(0.0, 1.0);

  Vector x = cfg.x1;
  double f_x = oracle.evaluate(x);
  rep.declared_cost = 1;
  rep.f_initial = rep.f_best = f_x;
  rep.x_best = x;
  long iter = 0;
  Vector u(n);
  while (oracle.eval_count() < cfg.budget) {
    if (iter > 0) {
      f_x = oracle.evaluate(x);
      ++rep.declared_cost;
      if (f_x < rep.f_best) {
        rep.f_best = f_x;
        rep.x_best = x;
      }
    }
    for (auto& e : u) e = z(rng);
    const double fu = oracle.evaluate(x + sigma * u);
    ++rep.declared_cost;
    const Vector g = ((fu - f_x) / sigma) * u;
    x -= h * g;

    TraceRecord rec;
    rec.iter = ++iter;
    rec.evals = oracle.eval_count() - start;
    rec.f_current = f_x;
    rec.f_best = rep.f_best;
    rec.grad_norm_approx = g.norm();
    rec.delta = sigma;
    rec.tau = h;
    rec.step_status = StepStatus::accepted;
    rep.trace.push_back(rec);
  }
  rep.stop_reason = StopReason::budget;
  rep.x_final = x;
  rep.evaluations = oracle.eval_count() - start;
  return rep;
}

inline RunReport nelder_mead_run(const Objective& objective, const BaselineConfig& cfg, double noise_level = 0.0,
                                 std::uint64_t seed = 0) {
  Oracle oracle(objective, noise_level, seed);
  return nelder_mead_solve(oracle, cfg);
}

inline RunReport imfil_run(const Objective& objective, Scheme scheme, const BaselineConfig& cfg,
                           double noise_level = 0.0, std::uint64_t seed = 0) {
  Oracle oracle(objective, noise_level, seed);
  return imfil_solve(oracle, scheme, cfg);
}

/// Validates the configuration before the oracle is built, so a missing
/// Lipschitz constant fails without any evaluation.
inline RunReport rg_run(const Objective& objective, const BaselineConfig& cfg, double noise_level = 0.0,
                        std::uint64_t seed = 0) {
  cfg.validate(objective.dim);
  Oracle oracle(objective, noise_level, seed);
  return rg_solve(oracle, cfg, seed);
}

} // namespace dfo

#endif // DFO_BASELINES_HPP
