#ifndef DFO_RATE_HPP
#define DFO_RATE_HPP

#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/trace.hpp"

namespace dfo {

enum class RateKind { linear, sublinear, none };

constexpr std::string_view to_string(RateKind k) noexcept {
  switch (k) {
  case RateKind::linear: return "linear";
  case RateKind::sublinear: return "sublinear";
  case RateKind::none: return "none";
  }
  return "unknown";
}

/// factor_or_exponent is the per-iteration contraction factor exp(slope)
/// for linear rates and the log-log slope for sublinear ones.
struct RateEstimate {
  RateKind kind = RateKind::none;
  double factor_or_exponent = 0.0;
  double r2_linear = 0.0; // fit quality of log gap vs iteration
  double r2_power = 0.0;  // fit quality of log gap vs log iteration
};

class InsufficientData : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  if (sxx == 0.0 || syy == 0.0) return f;
  f.slope = sxy / sxx;
  f.r2 = sxy * sxy / (sxx * syy);
  return f;
}

} // namespace detail

/// Classifies the decay of f_best - target over the final half of the trace.
///
/// Two straight-line fits compete: log gap against the iteration index
/// (geometric decay) and log gap against log index (power law). The better
/// fit wins when its R^2 is at least min_r2 and its slope is negative.
inline RateEstimate estimate_rate(const Trace& trace, double target_value, double min_r2 = 0.95) {
  std::vector<double> k, lk, y;
  for (const auto& r : trace) {
    const double gap = r.f_best - target_value;
    if (gap > 0.0 && std::isfinite(gap) && r.iter > 0) {
      k.push_back(static_cast<double>(r.iter));
      y.push_back(std::log(gap));
    }
  }
  if (k.size() < 20) throw InsufficientData("rate estimation needs at least 20 records above the target");
  const std::size_t from = k.size() / 2;
  std::vector<double> ks(k.begin() + static_cast<long>(from), k.end());
  std::vector<double> ys(y.begin() + static_cast<long>(from), y.end());
  std::vector<double> lks;
  for (double v : ks) lks.push_back(std::log(v));

  const auto semi = detail::least_squares_line(ks, ys);
  const auto loglog = detail::least_squares_line(lks, ys);
  RateEstimate est;
  est.r2_linear = semi.r2;
  est.r2_power = loglog.r2;
  if (semi.r2 >= loglog.r2 && semi.r2 >= min_r2 && semi.slope < 0.0) {
    est.kind = RateKind::linear;
    est.factor_or_exponent = std::exp(semi.slope);
  } else if (loglog.r2 >= min_r2 && loglog.slope < 0.0) {
    est.kind = RateKind::sublinear;
    est.factor_or_exponent = loglog.slope;
  }
  return est;
}

} // namespace dfo

#endif // DFO_RATE_HPP
