#include "kaclab/spectral.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kaclab/error.hpp"
#include "kaclab/special.hpp"

namespace kac::spectral {

SphereAreaRatio SphereAreaRatio::of(double a, double b) {
  require(a >= 1.0 && b >= 1.0, "SphereAreaRatio: dimensions must be >= 1");
  return {a, b, std::exp(log_sphere_area(a - 1.0) - log_sphere_area(b - 1.0))};
}

double apply_Q(const SphereFunction& phi, std::span<const double> v, const AngleQuadrature& quad) {
  const std::size_t n = v.size();
  require(n >= 2, "apply_Q: need N >= 2");
  double energy = 0.0;
  for (double x : v) energy += x * x;
  if (std::abs(energy - static_cast<double>(n)) > 1e-9 * static_cast<double>(n)) {
    std::ostringstream os;
    os.precision(17);
    os << "apply_Q: point is off the sphere (sum v^2 = " << energy << ", N = " << n << ")";
    throw DomainError(os.str());
  }
  std::vector<double> w(v.begin(), v.end());
  std::vector<double> cs(quad.theta.size()), sn(quad.theta.size());
  for (std::size_t k = 0; k < quad.theta.size(); ++k) {
    cs[k] = std::cos(quad.theta[k]);
    sn[k] = std::sin(quad.theta[k]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double pair = 0.0;
      for (std::size_t k = 0; k < cs.size(); ++k) {
        w[i] = v[i] * cs[k] - v[j] * sn[k];
        w[j] = v[i] * sn[k] + v[j] * cs[k];
        pair += quad.weight[k] * phi(w);
      }
      w[i] = v[i];
      w[j] = v[j];
      total += pair;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return total / pairs;
}

double apply_Q(const SphereFunction& phi, std::span<const double> v, const ScatteringDensity& rho, int order) {
  return apply_Q(phi, v, rho.quadrature(order));
}

GapEigenfunction::GapEigenfunction(std::size_t particles) : n(particles) {
  require(n >= 2, "gap_eigenfunction: need N >= 2");
}

double GapEigenfunction::operator()(std::span<const double> v) const {
  const double nn = static_cast<double>(n);
  const double centre = 3.0 * nn / (nn + 2.0);
  double s = 0.0;
  for (double x : v) {
    const double x2 = x * x;
    s += x2 * x2 - centre;
  }
  return s;
}

Delta2 delta2(const ScatteringDensity& rho, int k_max) {
  require(k_max >= 4, "delta2: k_max must be >= 4");
  Delta2 best{std::numeric_limits<double>::infinity(), 0};
  for (int k = 1; k <= k_max; ++k) {
    const double val = 2.0 * (1.0 - rho.cosine_moment(k));
    if (val < best.value - 1e-14) best = {val, k};
  }
  return best;
}

double gamma2(const ScatteringDensity& rho) { return 2.0 * (1.0 - rho.cosine_moment(4)); }

double uniform_gap(std::size_t n) {
  const double nn = static_cast<double>(n);
  return 0.5 * (nn + 2.0) / (nn - 1.0);
}

GapReport gap_value(std::size_t n, const ScatteringDensity& rho) {
  require(n >= 2, "gap_value: need N >= 2");
  GapReport r;
  r.n = n;
  r.gamma2 = gamma2(rho);
  r.delta2 = delta2(rho).value;
  const double nn = static_cast<double>(n);
  r.gap = 0.25 * (nn + 2.0) / (nn - 1.0) * r.gamma2;
  r.eigenfunction = "sum_j (v_j^4 - 3N/(N+2))";
  r.method = "closed-form";
  r.large_n_exact = r.delta2 > 0.45 * r.gamma2;
  r.exact = rho.is_uniform();
  return r;
}

double K_apply(const std::function<double(double)>& h, double v, std::size_t n, int order) {
  require(n >= 4, "K_apply: need N >= 4");
  const double nn = static_cast<double>(n);
  if (std::abs(v) > std::sqrt(nn)) throw DomainError("K_apply: |v| exceeds sqrt(N)");
  const double exponent = 0.5 * (nn - 4.0);
  const QuadratureRule rule = gauss_jacobi(order, exponent, exponent);
  const double ratio = SphereAreaRatio::of(nn - 2.0, nn - 1.0).value;
  const double r = std::sqrt(std::max(0.0, nn - v * v));
  return ratio * rule.integrate([&](double s) { return h(r * s); });
}

double K_eigenvalue(int m, std::size_t n) {
  require(m >= 0, "K_eigenvalue: m must be >= 0");
  require(n >= 3, "K_eigenvalue: need N >= 3");
  const double nn = static_cast<double>(n);
  const double exponent = 0.5 * (nn - 4.0);
  // s = cos(theta) turns the angular integral into a Gauss-Jacobi one.
  const QuadratureRule rule = gauss_jacobi(std::max(8, m + 4), exponent, exponent);
  const double integral = rule.integrate([m](double s) { return std::pow(s, 2 * m); });
  const double ratio = SphereAreaRatio::of(nn - 2.0, nn - 1.0).value;
  return (m % 2 == 0 ? 1.0 : -1.0) * ratio * integral;
}

double K_eigenvalue_closed_form(int m, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double log_mag = std::lgamma(m + 0.5) + std::lgamma(0.5 * (nn - 1.0)) - std::lgamma(0.5) -
                         std::lgamma(m + 0.5 * (nn - 1.0));
  return (m % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag);
}

double Polynomial::operator()(double x) const {
  double s = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * x + *it;
  return s;
}

std::vector<Polynomial> K_eigenpolynomials(std::size_t n, int max_degree) {
  require(n >= 4, "K_eigenpolynomials: need N >= 4");
  require(max_degree >= 0 && max_degree <= 16, "K_eigenpolynomials: degree out of range");
  const double nn = static_cast<double>(n);
  const double exponent = 0.5 * (nn - 3.0);
  // Work in x = v / sqrt(N) on [-1, 1] with weight (1 - x^2)^{(N-3)/2}.
  const QuadratureRule rule = gauss_jacobi(max_degree + 8, exponent, exponent);
  double mass = 0.0;
  for (double w : rule.weights) mass += w;

  auto inner = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      double pa = 0.0, pb = 0.0;
      for (auto it = a.rbegin(); it != a.rend(); ++it) pa = pa * rule.nodes[k] + *it;
      for (auto it = b.rbegin(); it != b.rend(); ++it) pb = pb * rule.nodes[k] + *it;
      s += rule.weights[k] * pa * pb;
    }
    return s / mass;
  };

  std::vector<std::vector<double>> basis;
  for (int d = 0; d <= max_degree; ++d) {
    std::vector<double> p(d + 1, 0.0);
    p[d] = 1.0;
    // Modified Gram-Schmidt, applied twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = inner(p, q);
        for (std::size_t k = 0; k < q.size(); ++k) p[k] -= c * q[k];
      }
    }
    const double norm = std::sqrt(inner(p, p));
    for (double& c : p) c /= norm;
    basis.push_back(std::move(p));
  }

  std::vector<Polynomial> out;
  const double scale = 1.0 / std::sqrt(nn);
  for (auto& p : basis) {
    Polynomial poly;
    poly.coeffs.resize(p.size());
    double f = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      poly.coeffs[k] = p[k] * f;
      f *= scale;
    }
    out.push_back(std::move(poly));
  }
  return out;
}

double induction_bound(std::size_t n) {
  require(n >= 2, "induction_bound: need N >= 2");
  double bound = 2.0;
  for (std::size_t k = 3; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    bound *= 1.0 - 3.0 / (kk * kk - 1.0);
  }
  return bound;
}

std::pair<std::int64_t, std::int64_t> induction_bound_exact(std::size_t n) {
  require(n >= 2 && n <= 1'000'000, "induction_bound_exact: need 2 <= N <= 10^6");
  std::int64_t num = 2, den = 1;
  for (std::size_t k = 3; k <= n; ++k) {
    const auto kk = static_cast<std::int64_t>(k);
    std::int64_t a = kk * kk - 4, b = kk * kk - 1;
    // Cross-cancel before multiplying to keep the terms small.
    std::int64_t g1 = std::gcd(num, b), g2 = std::gcd(a, den);
    num /= g1;
    b /= g1;
    a /= g2;
    den /= g2;
    num *= a;
    den *= b;
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  return {num, den};
}

Delta2 delta2_3d(const AngularKernel3D& b, int l_max) {
  Delta2 best{std::numeric_limits<double>::infinity(), 0};
  for (int l = 1; l <= l_max; ++l) {
    const double val = 2.0 * (1.0 - b.legendre_moment(l));
    if (val < best.value - 1e-14) best = {val, l};
  }
  return best;
}

Gap3DReport gap_3d(std::size_t n, const AngularKernel3D& b) {
  require(n >= 3, "gap_3d: need N >= 3");
  Gap3DReport r;
  r.n = n;
  r.b1 = b.b1();
  r.b2 = b.b2();
  r.delta2 = delta2_3d(b).value;
  const double nn = static_cast<double>(n);
  r.candidate_b2 = nn / (nn - 1.0) * (1.0 - r.b2);
  r.candidate_b1 = 1.0 - r.b1;
  const std::string phi_space = "Phi_a = sum_j |v_j|^2 v_j^a, a = 1,2,3";
  const std::string pair_space = "|v_i|^2 - |v_j|^2 and v_i^a - v_j^a, i < j";
  if (r.b2 > r.b1 && r.delta2 >= 20.0 / 9.0 * (1.0 - r.b2)) {
    r.which = Gap3DCase::b2_dominant;
    r.gap = r.candidate_b2;
    r.eigenspace = phi_space;
  } else if (std::abs(r.delta2 - 2.0 * (1.0 - r.b1)) <= 1e-10 && n >= 7) {
    r.which = Gap3DCase::min_rule;
    if (r.candidate_b1 < r.candidate_b2) {
      r.gap = r.candidate_b1;
      r.eigenspace = pair_space;
    } else {
      r.gap = r.candidate_b2;
      r.eigenspace = phi_space;
    }
  } else {
    r.which = Gap3DCase::not_verified;
    r.gap = std::numeric_limits<double>::quiet_NaN();
    r.eigenspace = "conditions not verified";
  }
  return r;
}

}  // namespace kac::spectral
