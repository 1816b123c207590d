#ifndef DFO_PROBLEMS_HPP
#define DFO_PROBLEMS_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "dfo/core.hpp"
#include "dfo/oracle.hpp"

namespace dfo {

enum class Family { least_squares, image_restoration, rosenbrock };

constexpr std::string_view to_string(Family f) noexcept {
  switch (f) {
  case Family::least_squares: return "leastsquares";
  case Family::image_restoration: return "imagerestore";
  case Family::rosenbrock: return "rosenbrock";
  }
  return "unknown";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (auto f : {Family::least_squares, Family::image_restoration, Family::rosenbrock})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

/// Power iteration did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

private:
  double last_estimate_;
};

/// Largest singular value of M by power iteration on M^T M.
///
/// Stops when the relative change of the estimate drops below tol.
inline double spectral_norm(const Matrix& M, double tol = 1e-8, int max_iter = 10000) {
  require(M.allFinite(), "matrix has non-finite entries");
  if (M.size() == 0) return 0.0;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Vector v(M.cols());
  for (auto& e : v) e = u(rng);
  v.normalize();

  double sigma = (M * v).norm();
  if (sigma == 0.0 && M.norm() == 0.0) return 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = M.transpose() * (M * v);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    const double next = (M * v).norm();
    if (std::abs(next - sigma) <= tol * next) return next;
    sigma = next;
  }
  throw ConvergenceError("power iteration did not converge", sigma);
}

/// Max absolute row sum.
inline double inf_norm(const Matrix& M) { return M.cwiseAbs().rowwise().sum().maxCoeff(); }

struct ProblemInstance {
  Family family = Family::least_squares;
  int dim = 0;
  Matrix A; // empty for rosenbrock
  Vector b;
  Objective objective;
};

namespace detail {
struct AffineData {
  Matrix A;
  Vector b;
};
} // namespace detail

/// f(x) = ||Ax - b||^2 with gradient 2 A^T (Ax - b) and L = 2 ||A^T A||.
inline ProblemInstance make_least_squares(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size() || A.cols() == 0)
    throw DimensionError("least squares: A has " + std::to_string(A.rows()) + " rows, b has " +
                         std::to_string(b.size()) + " entries");
  auto d = std::make_shared<const detail::AffineData>(detail::AffineData{A, b});
  ProblemInstance p;
  p.family = Family::least_squares;
  p.dim = static_cast<int>(A.cols());
  p.A = A;
  p.b = b;
  p.objective.dim = p.dim;
  p.objective.evaluator = [d](const Vector& x) { return (d->A * x - d->b).squaredNorm(); };
  p.objective.analytic_gradient = [d](const Vector& x) -> Vector {
    return 2.0 * d->A.transpose() * (d->A * x - d->b);
  };
  p.objective.lipschitz_grad_constant = 2.0 * spectral_norm(A.transpose() * A);
  return p;
}

/// f(x) = sum_i log(1 + (Ax - b)_i^2) with L = 2 ||A^T A||_inf.
inline ProblemInstance make_image_restoration(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols()) throw DimensionError("image restoration: A must be square");
  if (A.rows() != b.size() || A.cols() == 0) throw DimensionError("image restoration: b does not match A");
  auto d = std::make_shared<const detail::AffineData>(detail::AffineData{A, b});
  ProblemInstance p;
  p.family = Family::image_restoration;
  p.dim = static_cast<int>(A.cols());
  p.A = A;
  p.b = b;
  p.objective.dim = p.dim;
  p.objective.evaluator = [d](const Vector& x) {
    const Vector r = d->A * x - d->b;
    return r.array().square().log1p().sum();
  };
  p.objective.analytic_gradient = [d](const Vector& x) -> Vector {
    const Vector r = d->A * x - d->b;
    const Vector w = (2.0 * r.array() / (1.0 + r.array().square())).matrix();
    return d->A.transpose() * w;
  };
  p.objective.lipschitz_grad_constant = 2.0 * inf_norm(A.transpose() * A);
  return p;
}

/// sum_{i<n} 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2. The gradient is only
/// locally Lipschitz, so no constant is attached.
inline ProblemInstance make_rosenbrock(int n) {
  require(n >= 2, "rosenbrock needs n >= 2");
  ProblemInstance p;
  p.family = Family::rosenbrock;
  p.dim = n;
  p.objective.dim = n;
  p.objective.evaluator = [](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double c = x[i] - 1.0;
      s += 100.0 * a * a + c * c;
    }
    return s;
  };
  p.objective.analytic_gradient = [](const Vector& x) -> Vector {
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * a + 2.0 * (x[i] - 1.0);
      g[i + 1] += 200.0 * a;
    }
    return g;
  };
  return p;
}

/// i.i.d. standard normal matrix from a seeded generator.
inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = z(rng);
  return M;
}

/// Random (A, b) instance with standard Gaussian entries. Least squares uses
/// an m x n matrix (m = n when m <= 0); image restoration is always n x n.
/// Rosenbrock ignores m and the seed.
inline ProblemInstance random_instance(Family family, int n, int m, std::uint64_t seed) {
  require(n > 0, "dimension must be positive");
  if (family == Family::rosenbrock) return make_rosenbrock(n);
  const int rows = (family == Family::least_squares && m > 0) ? m : n;
  std::mt19937_64 rng(seed);
  Matrix A = gaussian_matrix(rows, n, rng);
  Matrix bm = gaussian_matrix(rows, 1, rng);
  Vector b = bm.col(0);
  return family == Family::least_squares ? make_least_squares(A, b) : make_image_restoration(A, b);
}

/// Named initial points.
enum class InitialPreset { zeros, halves };

inline Vector initial_point(InitialPreset preset, int n) {
  return preset == InitialPreset::zeros ? Vector::Zero(n) : Vector::Constant(n, 0.5);
}

/// Everything needed to regenerate an instance. Matrices are never stored.
struct InstanceSpec {
  Family family = Family::least_squares;
  int n = 10;
  int m = 0;
  std::uint64_t seed = 0;

  ProblemInstance build() const { return random_instance(family, n, m, seed); }

  /// key = value lines: family, n, m, seed.
  std::string to_text() const {
    std::ostringstream os;
    os << "family = " << to_string(family) << "\n"
       << "n = " << n << "\n"
       << "m = " << (m > 0 ? m : (family == Family::least_squares ? n : 0)) << "\n"
       << "seed = " << seed << "\n";
    return os.str();
  }

  static InstanceSpec from_text(const std::string& text) {
    InstanceSpec s;
    bool have_family = false, have_n = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string v) {
        const auto a = v.find_first_not_of(" \t\r");
        const auto z = v.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : v.substr(a, z - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      try {
        if (key == "family") {
          auto f = parse_family(val);
          if (!f) throw ConfigError("unknown family '" + val + "'");
          s.family = *f;
          have_family = true;
        } else if (key == "n") {
          s.n = std::stoi(val);
          have_n = true;
        } else if (key == "m") {
          s.m = std::stoi(val);
        } else if (key == "seed") {
          s.seed = std::stoull(val);
        }
      } catch (const std::logic_error& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError("bad value for '" + key + "': " + val);
      }
    }
    require(have_family && have_n, "instance file needs family and n");
    return s;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_text();
  }

  static InstanceSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
  }
};

} // namespace dfo

#endif // DFO_PROBLEMS_HPP
