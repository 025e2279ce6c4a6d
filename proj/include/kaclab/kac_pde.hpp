#ifndef KACLAB_KAC_PDE_HPP
#define KACLAB_KAC_PDE_HPP
// Deterministic solver for the spatially homogeneous Kac equation in Fourier
// variables:
//   d/dt phi(xi) = 2 int rho(theta) [phi(xi cos theta) phi(xi sin theta) - phi(xi)] dtheta.
// phi is stored on xi_k = k h, k = 0..M-1 (h = xi_max/(M-1)); negative xi are
// reached through phi(-xi) = conj(phi(xi)).

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "kaclab/csv.hpp"
#include "kaclab/density.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/scattering.hpp"

namespace kac::pde {

using cplx = std::complex<double>;

struct GridSpec {
  double xi_max = 20.0;
  int m_xi = 1024;
  double v_max = 10.0;
  int m_v = 801;
  /// Lagrange stencil width for off-grid phi values (4 = cubic, 6 = quintic).
  int interp_points = 6;
  int theta_points = 64;
};

class CharacteristicGrid {
 public:
  CharacteristicGrid() = default;
  CharacteristicGrid(double xi_max, int m);
  static CharacteristicGrid from_density(const Density1D& f, double xi_max, int m);
  /// Trapezoid transform of grid values f(v_j).
  static CharacteristicGrid from_samples(std::span<const double> v, std::span<const double> f, double xi_max, int m);

  [[nodiscard]] int size() const { return static_cast<int>(phi.size()); }
  [[nodiscard]] double step() const { return h_; }
  [[nodiscard]] double xi(int k) const { return h_ * k; }
  [[nodiscard]] double xi_max() const { return h_ * (size() - 1); }
  /// Value at k, k < 0 by conjugate symmetry.
  [[nodiscard]] cplx node(int k) const { return k >= 0 ? phi[k] : std::conj(phi[-k]); }
  /// Lagrange interpolation with `points` nodes; |x| <= xi_max required.
  [[nodiscard]] cplx at(double x, int points = 6) const;

  std::vector<cplx> phi;

 private:
  double h_ = 0.0;
};

/// (1/pi) int_0^xi_max Re(e^{-i xi x} phi(xi)) dxi by the trapezoid rule.
double inverse_at(const CharacteristicGrid& phi, double x);

/// Density on the symmetric v-grid, recovered from phi.
struct VelocityDensity {
  double t = 0.0;
  std::vector<double> v;
  std::vector<double> f;
  CharacteristicGrid phi;

  [[nodiscard]] double step() const { return v[1] - v[0]; }
  /// Trapezoid moment int v^k f dv.
  [[nodiscard]] double moment(int k) const;
  /// Inverse transform evaluated at an arbitrary point.
  [[nodiscard]] double at(double x) const;
  /// Probability of [a, b] by 8-point Gauss-Legendre on at().
  [[nodiscard]] double mass(double a, double b) const;
};

/// Inverse transform onto the v-grid. Values below -1e-6 raise NumericError;
/// values in [-1e-6, 0) are zeroed.
VelocityDensity to_velocity(const CharacteristicGrid& phi, const GridSpec& spec, double t = 0.0,
                            Exec exec = Exec::serial);

/// Right-hand side with precomputed interpolation stencils.
class FourierSolver {
 public:
  FourierSolver(const ScatteringDensity& rho, const GridSpec& spec);
  void rhs(std::span<const cplx> phi, std::span<cplx> out, Exec exec = Exec::serial) const;
  [[nodiscard]] const GridSpec& spec() const { return spec_; }

 private:
  struct Stencil {
    int base = 0;
    int count = 0;
    double w[8] = {};
  };
  [[nodiscard]] Stencil stencil(double x) const;
  [[nodiscard]] cplx eval(const Stencil& s, std::span<const cplx> phi) const;

  GridSpec spec_;
  double h_ = 0.0;
  std::vector<double> weight_;     // theta weights including rho
  double weight_sum_ = 0.0;
  std::vector<Stencil> cos_, sin_;  // [k * Q + q]
};

std::vector<cplx> rhs_fourier(const CharacteristicGrid& phi, const ScatteringDensity& rho,
                              const GridSpec& spec = {}, Exec exec = Exec::serial);

struct IntegrateOptions {
  double dt = 0.01;
  std::vector<double> snapshot_times;
  /// Records h_functional after every RK4 step.
  bool track_entropy = false;
  Exec exec = Exec::parallel;
};

struct Trajectory {
  std::vector<VelocityDensity> snapshots;
  std::vector<double> step_times;
  std::vector<double> step_entropy;
};

/// Classical RK4 from phi0 up to the last snapshot time.
Trajectory integrate(const CharacteristicGrid& phi0, const ScatteringDensity& rho, const GridSpec& spec,
                     const IntegrateOptions& opt);
Trajectory integrate(const Density1D& f0, const ScatteringDensity& rho, const GridSpec& spec,
                     const IntegrateOptions& opt);

/// int f log(f / gamma) dv, trapezoid on the v-grid, 0 log 0 = 0.
double h_functional(const VelocityDensity& f);

/// a_n = int f He_n dv, the coefficient of gamma He_n / n! in f.
double hermite_coefficient(const VelocityDensity& f, int n);

/// 2 int rho (1 - cos^n - sin^n): decay rate of the n-th Hermite mode of the linearized equation.
double linear_mode_rate(const ScatteringDensity& rho, int n);

/// Collision operator evaluated directly in v-space:
///   2 int rho(theta) int [f(v c + w s) f(-v s + w c) - f(v) f(w)] dw dtheta.
double collision_integral_direct(const Density1D& f, const ScatteringDensity& rho, double v, int w_panels = 64,
                                 int theta_points = 128);

/// (t, v, f) rows, or (t, xi, re_phi, im_phi) rows when `fourier` is set.
Table snapshot_table(const Trajectory& tr, bool fourier = false);

}  // namespace kac::pde

#endif
