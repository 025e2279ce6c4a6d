#include "kaclab/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "kaclab/error.hpp"

namespace kac {

namespace {

// Orthonormal-recurrence coefficients of the monic Jacobi polynomials.
void jacobi_recurrence(int n, double a, double b, std::vector<double>& diag, std::vector<double>& off) {
  diag.assign(n, 0.0);
  off.assign(n > 0 ? n - 1 : 0, 0.0);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0) {
      diag[0] = (b - a) / (a + b + 2.0);
    } else {
      diag[k] = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 1) {
      // (k + a + b) / (s - 1) == 1 here; cancelled so that a + b = -1 works.
      off[0] = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0)));
      continue;
    }
    const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    off[k - 1] = std::sqrt(num / den);
  }
}

// P_n^{(a,b)}(x) and its derivative via the standard recurrence.
std::pair<double, double> jacobi_value(int n, double a, double b, double x) {
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  // (1 - x^2) P_n' = n[(a - b) - (2n + a + b)x] P_n / (2n + a + b) + 2(n + a)(n + b) P_{n-1} / (2n + a + b)
  const double c = 2.0 * n + a + b;
  const double dp = (n * ((a - b) - c * x) * p1 + 2.0 * (n + a) * (n + b) * p0) / (c * (1.0 - x * x));
  return {p1, dp};
}

QuadratureRule build_gauss_jacobi(int n, double a, double b) {
  std::vector<double> diag, off;
  jacobi_recurrence(n, a, b, diag, off);
  Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(off.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("Gauss-Jacobi eigen-solve failed");

  const double log_mu0 = (a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                         std::lgamma(a + b + 2.0);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = solver.eigenvalues()[k];
    // Two Newton polishes; the eigen-solve is already near machine precision.
    for (int it = 0; it < 2; ++it) {
      auto [p, dp] = jacobi_value(n, a, b, x);
      if (dp != 0.0 && std::isfinite(p / dp)) {
        const double nx = x - p / dp;
        if (std::abs(nx - x) < 1e-8) x = nx;
      }
    }
    const double v0 = solver.eigenvectors()(0, k);
    rule.nodes[k] = x;
    rule.weights[k] = std::exp(log_mu0) * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  require(n >= 1, "gauss_jacobi: n must be >= 1");
  require(alpha > -1.0 && beta > -1.0, "gauss_jacobi: exponents must exceed -1");
  // Rules are immutable once built; cache them since the same orders recur.
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, QuadratureRule> cache;
  const auto key = std::make_tuple(n, alpha, beta);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  QuadratureRule rule;
  if (n == 1) {
    rule.nodes = {(beta - alpha) / (alpha + beta + 2.0)};
    rule.weights = {std::exp((alpha + beta + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                             std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0))};
  } else {
    rule = build_gauss_jacobi(n, alpha, beta);
  }
  std::lock_guard lock(mutex);
  cache.emplace(key, rule);
  return rule;
}

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    rule.nodes[k] = mid + half * rule.nodes[k];
    rule.weights[k] *= half;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int n, int panels, double a, double b) {
  require(panels >= 1, "composite_gauss_legendre: panels must be >= 1");
  const QuadratureRule base = gauss_legendre(n);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(n) * panels);
  rule.weights.reserve(static_cast<std::size_t>(n) * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t k = 0; k < base.size(); ++k) {
      rule.nodes.push_back(lo + 0.5 * h * (base.nodes[k] + 1.0));
      rule.weights.push_back(0.5 * h * base.weights[k]);
    }
  }
  return rule;
}

QuadratureRule gauss_chebyshev(int n) {
  require(n >= 1, "gauss_chebyshev: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, std::numbers::pi / n);
  for (int k = 0; k < n; ++k) rule.nodes[k] = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * n));
  return rule;
}

}  // namespace kac
