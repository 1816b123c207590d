#ifndef DFO_ORACLE_HPP
#define DFO_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "dfo/core.hpp"

namespace dfo {

/// A smooth objective f : R^dim -> R.
///
/// The analytic gradient and Lipschitz constant are for validation only.
/// Solvers never see an Objective; they receive an Oracle, which exposes
/// nothing but function values.
struct Objective {
  int dim = 0;
  std::function<double(const Vector&)> evaluator;
  std::function<Vector(const Vector&)> analytic_gradient; // may be empty
  std::optional<double> lipschitz_grad_constant;

  double operator()(const Vector& x) const { return evaluator(x); }
  bool has_gradient() const { return static_cast<bool>(analytic_gradient); }
  Vector gradient(const Vector& x) const {
    if (!analytic_gradient) throw ConfigError("objective has no analytic gradient");
    return analytic_gradient(x);
  }
};

/// Counting black box returning phi(x) = f(x) + xi with xi ~ U(-eps, eps).
///
/// Noise is redrawn on every call, including repeated calls at the same
/// point. The generator is std::mt19937_64 seeded with rng_seed; the draw
/// sequence is reproducible for a fixed seed and call sequence.
class Oracle {
public:
  Oracle(const Objective& objective, double noise_level = 0.0, std::uint64_t rng_seed = 0)
      : dim_(objective.dim), f_(objective.evaluator), noise_(noise_level), seed_(rng_seed),
        rng_(rng_seed) {
    require(objective.dim > 0, "objective dimension must be positive");
    require(static_cast<bool>(f_), "objective has no evaluator");
    require(noise_level >= 0.0, "noise level must be nonnegative");
  }

  double evaluate(const Vector& x) {
    if (x.size() != dim_)
      throw DimensionError("point has dimension " + std::to_string(x.size()) + ", objective expects " +
                           std::to_string(dim_));
    ++count_;
    const double fx = f_(x);
    if (noise_ == 0.0) return fx;
    std::uniform_real_distribution<double> xi(-noise_, noise_);
    return fx + xi(rng_);
  }

  double operator()(const Vector& x) { return evaluate(x); }

  void reset_counter() {
    count_ = 0;
    rng_.seed(seed_);
  }

  int dim() const { return dim_; }
  long eval_count() const { return count_; }
  double noise_level() const { return noise_; }
  std::uint64_t seed() const { return seed_; }

private:
  int dim_;
  std::function<double(const Vector&)> f_;
  double noise_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  long count_ = 0;
};

} // namespace dfo

#endif // DFO_ORACLE_HPP
