#ifndef KACLAB_SPECTRAL_HPP
#define KACLAB_SPECTRAL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kaclab/kernel3d.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/scattering.hpp"

namespace kac::spectral {

using SphereFunction = std::function<double(std::span<const double>)>;

/// |S^{a-1}| / |S^{b-1}| (unit spheres in R^a and R^b), via log-gamma.
struct SphereAreaRatio {
  double dim_num = 0.0;
  double dim_den = 0.0;
  double value = 0.0;

  static SphereAreaRatio of(double a, double b);
};

/// Q_N phi at v: average over all pairs of the rho-average of phi after the
/// pair rotation. v must lie on the sphere of radius sqrt(N) to 1e-9 relative.
double apply_Q(const SphereFunction& phi, std::span<const double> v, const AngleQuadrature& quad);
double apply_Q(const SphereFunction& phi, std::span<const double> v, const ScatteringDensity& rho, int order = 64);

/// sum_j (v_j^4 - 3N/(N+2)), the quartic gap eigenfunction.
struct GapEigenfunction {
  std::size_t n = 0;
  explicit GapEigenfunction(std::size_t particles);
  double operator()(std::span<const double> v) const;
};

/// Result of Delta_2 minimization over Fourier modes.
struct Delta2 {
  double value = 0.0;
  int argmin_k = 0;
};

/// Delta_2 = 2 min_{1<=k<=k_max} int (1 - cos k theta) rho.
Delta2 delta2(const ScatteringDensity& rho, int k_max = 64);

/// Gamma_2 = 2 int (1 - cos 4 theta) rho.
double gamma2(const ScatteringDensity& rho);

struct GapReport {
  std::size_t n = 0;
  double gap = 0.0;
  std::string eigenfunction;
  std::string method;
  double gamma2 = 0.0;
  double delta2 = 0.0;
  /// Delta_2 > 0.45 Gamma_2: Gamma_N is the true gap for all large N.
  bool large_n_exact = false;
  /// The reported value is proven to be the gap at this N.
  bool exact = false;
};

/// Gamma_N = (1/4)(N + 2)/(N - 1) Gamma_2; equals the gap for uniform rho.
GapReport gap_value(std::size_t n, const ScatteringDensity& rho);

/// (1/2)(N + 2)/(N - 1).
double uniform_gap(std::size_t n);

/// (K h)(v) = (|S^{N-3}|/|S^{N-2}|) int h(sqrt(N - v^2) s)(1 - s^2)^{(N-4)/2} ds,
/// 128-point Gauss-Jacobi.
double K_apply(const std::function<double(double)>& h, double v, std::size_t n, int order = 128);

/// alpha_{2m} = (-1)^m (|S^{N-3}|/|S^{N-2}|) int_0^pi cos^{2m} sin^{N-3}, by quadrature.
double K_eigenvalue(int m, std::size_t n);

/// Same value from the Beta-function closed form.
double K_eigenvalue_closed_form(int m, std::size_t n);

/// Polynomial in v with coefficients in increasing degree.
struct Polynomial {
  std::vector<double> coeffs;
  double operator()(double x) const;
  [[nodiscard]] int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Orthogonal polynomials p_0..p_max_degree for the single-coordinate sphere
/// marginal weight (1 - v^2/N)^{(N-3)/2} on [-sqrt N, sqrt N], normalized to
/// unit L^2 norm. K is self-adjoint in this weight, so these are its eigenfunctions.
std::vector<Polynomial> K_eigenpolynomials(std::size_t n, int max_degree);

/// Telescoped lower bound Delta_2 prod_{k=3}^{N} (1 - 3/(k^2 - 1)).
double induction_bound(std::size_t n);

/// The same product in exact rational arithmetic, as (numerator, denominator) in lowest terms.
std::pair<std::int64_t, std::int64_t> induction_bound_exact(std::size_t n);

/// Gap of the two-particle three-dimensional operator: 2 min_l (1 - b_l),
/// b_l the Legendre moments of B.
Delta2 delta2_3d(const AngularKernel3D& b, int l_max = 32);

enum class Gap3DCase { b2_dominant, min_rule, not_verified };

struct Gap3DReport {
  std::size_t n = 0;
  double gap = 0.0;
  Gap3DCase which = Gap3DCase::not_verified;
  std::string eigenspace;
  double b1 = 0.0;
  double b2 = 0.0;
  double delta2 = 0.0;
  /// N/(N-1)(1 - B_2) and (1 - B_1), reported in every case.
  double candidate_b2 = 0.0;
  double candidate_b1 = 0.0;
};

Gap3DReport gap_3d(std::size_t n, const AngularKernel3D& b);

}  // namespace kac::spectral

#endif
