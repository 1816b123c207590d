#include <gtest/gtest.h>

#include <cmath>

#include "dfo/dfc.hpp"
#include "dfo/problems.hpp"
#include "dfo/rate.hpp"
#include "test_util.hpp"

using namespace dfo;

namespace {

DfcConfig scalar_config(double kappa) {
  DfcConfig c;
  c.x1 = Vector::Ones(1);
  c.delta1 = 1.0;
  c.C1 = 1.0;
  c.kappa = kappa;
  c.mu = 4.0;
  c.theta = 0.5;
  c.budget = 1000;
  return c;
}

// Minimizer and optimal value of ||Ax - b||^2 via a QR solve.
double least_squares_optimum(const ProblemInstance& inst) {
  const Vector xs = inst.A.colPivHouseholderQr().solve(inst.b);
  return (inst.A * xs - inst.b).squaredNorm();
}

} // namespace

TEST(DfcStep, AcceptsHandSimulatedStep) {
  Oracle o(test::squared_norm(1));
  const auto cfg = scalar_config(0.5);
  auto s = dfc_initial_state(o, cfg);
  s = dfc_step(s, o, Scheme::central, cfg);
  EXPECT_EQ(s.last_step, StepStatus::accepted);
  EXPECT_EQ(s.delta, 0.25);
  EXPECT_NEAR(s.g[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[0], 0.0, 1e-12);
  EXPECT_EQ(s.C, 1.0);
  EXPECT_EQ(s.step_cost, 3 * 2 + 1);
}

TEST(DfcStep, RejectsOvershootAndEscalates) {
  Oracle o(test::squared_norm(1));
  const auto cfg = scalar_config(10.0);
  auto s = dfc_initial_state(o, cfg);
  s = dfc_step(s, o, Scheme::central, cfg);
  EXPECT_EQ(s.last_step, StepStatus::rejected);
  EXPECT_EQ(s.x[0], 1.0);
  EXPECT_EQ(s.C, 2.0);
  EXPECT_EQ(s.delta, 0.25);
  EXPECT_EQ(s.escalations, 1);
}

TEST(DfcStep, ConstantObjectiveStops) {
  Oracle o(test::constant(2));
  DfcConfig cfg;
  cfg.x1 = Vector::Ones(2);
  auto s = dfc_initial_state(o, cfg);
  s = dfc_step(s, o, Scheme::forward, cfg);
  EXPECT_EQ(s.last_step, StepStatus::stopped);
  EXPECT_EQ(s.x, Vector::Ones(2));
  const auto again = dfc_step(s, o, Scheme::forward, cfg);
  EXPECT_EQ(again.step_cost, 0);
}

TEST(DfcConfig, RangesAreEnforced) {
  Oracle o(test::squared_norm(1));
  auto bad = scalar_config(0.5);
  bad.mu = 2.0;
  EXPECT_THROW(dfc_initial_state(o, bad), ConfigError);
  bad = scalar_config(0.5);
  bad.r = 1.0;
  EXPECT_THROW(dfc_initial_state(o, bad), ConfigError);
  bad = scalar_config(0.0);
  EXPECT_THROW(dfc_initial_state(o, bad), ConfigError);
  bad = scalar_config(0.5);
  bad.x1 = Vector::Ones(2);
  EXPECT_THROW(dfc_initial_state(o, bad), ConfigError);
}

TEST(DfcRun, SquaredNormInPlane) {
  DfcConfig c;
  c.x1 = Vector::Ones(2);
  c.budget = 500;
  const auto rep = dfc_run(test::squared_norm(2), Scheme::central, c);
  EXPECT_LE(rep.f_best, 1e-8);
  const std::size_t half = rep.trace.size() / 2;
  for (std::size_t i = half; i < rep.trace.size(); ++i) EXPECT_EQ(rep.trace[i].C, rep.trace[half].C);
}

TEST(DfcRun, LeastSquaresReducesOptimalityGap) {
  const auto inst = random_instance(Family::least_squares, 10, 20, 42);
  DfcConfig c;
  c.x1 = Vector::Zero(10);
  c.budget = 2000;
  const auto rep = dfc_run(inst.objective, Scheme::forward, c);
  const double fstar = least_squares_optimum(inst);
  EXPECT_LE(rep.f_best - fstar, 1e-3 * (rep.f_initial - fstar));
}

TEST(DfcRun, ZeroBudgetEvaluatesOnce) {
  DfcConfig c;
  c.x1 = Vector::Ones(2);
  c.budget = 0;
  const auto rep = dfc_run(test::squared_norm(2), Scheme::central, c);
  EXPECT_TRUE(rep.trace.empty());
  EXPECT_EQ(rep.evaluations, 1);
  EXPECT_EQ(rep.f_best, 2.0);
}

TEST(DfcRun, InvariantsOnRandomLeastSquares) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 3 + static_cast<int>(seed % 6);
    const auto inst = random_instance(Family::least_squares, n, 2 * n, seed);
    const double L = *inst.objective.lipschitz_grad_constant;
    for (Scheme s : {Scheme::forward, Scheme::central}) {
      DfcConfig c;
      c.x1 = Vector::Zero(n);
      c.budget = 200L * n;
      c.record_iterates = true;
      // Stop once the interval reaches ~1e-7: below that, roundoff in the
      // differences behaves like noise and drives further escalations.
      c.delta_floor_factor = std::ldexp(1.0, -20);
      const auto rep = dfc_run(inst.objective, s, c);

      EXPECT_EQ(rep.evaluations, rep.declared_cost);
      EXPECT_LE(rep.evaluations, c.budget + evals_per_call(s, n) + 1);

      double f_prev = rep.f_initial;
      double C_prev = c.C1;
      long escalations = 0;
      for (std::size_t k = 0; k < rep.trace.size(); ++k) {
        const auto& r = rep.trace[k];
        EXPECT_LE(r.f_current, f_prev);
        EXPECT_GE(r.C, C_prev);
        if (r.step_status == StepStatus::accepted) {
          const double need = c.kappa * (c.mu - 2.0) / (2.0 * r.C * c.mu) * rep.gradients[k].squaredNorm();
          EXPECT_LE(r.f_current, f_prev - need);
          EXPECT_GT(r.grad_norm_approx, c.mu * r.C * r.delta);
          EXPECT_EQ(rep.iterates[k + 1], rep.iterates[k] - (c.kappa / r.C) * rep.gradients[k]);
        }
        if (r.step_status == StepStatus::rejected) {
          EXPECT_EQ(r.f_current, f_prev);
          EXPECT_EQ(rep.iterates[k + 1], rep.iterates[k]);
          ++escalations;
          if (k + 1 < rep.trace.size()) {
            EXPECT_EQ(rep.trace[k + 1].C, c.r * r.C);
          }
        }
        if (k > 0) {
          EXPECT_LE(r.delta, rep.trace[k - 1].delta);
        }
        f_prev = r.f_current;
        C_prev = r.C;
      }
      const double Cfd = L * std::sqrt(static_cast<double>(n)) / 2.0;
      const double bound = std::ceil(std::log(std::max(Cfd, L * c.kappa) / c.C1) / std::log(c.r)) + 1.0;
      EXPECT_LE(static_cast<double>(escalations), bound) << "seed " << seed;
    }
  }
}

TEST(DfcRun, LinearContractionOnSquaredNorm) {
  // Forward differences: the centered step never lands exactly on 0.
  DfcConfig c;
  c.x1 = Vector::Ones(5);
  c.budget = 5000;
  c.record_iterates = true;
  const auto rep = dfc_run(test::squared_norm(5), Scheme::forward, c);
  std::vector<double> ratios;
  for (std::size_t k = 0; k < rep.trace.size(); ++k)
    if (rep.trace[k].step_status == StepStatus::accepted)
      ratios.push_back(rep.iterates[k + 1].norm() / rep.iterates[k].norm());
  ASSERT_GE(ratios.size(), 20u);
  for (std::size_t i = ratios.size() - 20; i < ratios.size(); ++i) EXPECT_LE(ratios[i], 0.99);
  EXPECT_EQ(estimate_rate(rep.trace, 0.0).kind, RateKind::linear);
}

TEST(DfcRun, LinearRateWithCentralDifferencesAndShortStep) {
  DfcConfig c;
  c.x1 = Vector::Ones(5);
  c.kappa = 0.3; // x <- 0.4 x, never exactly zero
  c.budget = 5000;
  const auto rep = dfc_run(test::squared_norm(5), Scheme::central, c);
  const auto est = estimate_rate(rep.trace, 0.0);
  EXPECT_EQ(est.kind, RateKind::linear);
  EXPECT_NEAR(est.factor_or_exponent, 0.16, 0.01);
}

TEST(DfcRun, NoisyRunCompletesWithinBudget) {
  const auto inst = random_instance(Family::least_squares, 10, 10, 3);
  DfcConfig c;
  c.x1 = Vector::Zero(10);
  c.budget = 2000;
  const auto rep = dfc_run(inst.objective, Scheme::forward, c, 1e-4, 9);
  EXPECT_EQ(rep.evaluations, rep.declared_cost);
  EXPECT_LT(rep.f_best, rep.f_initial);
  EXPECT_LE(rep.evaluations, c.budget + 12);
}
