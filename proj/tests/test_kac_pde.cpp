#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kaclab/density.hpp"
#include "kaclab/error.hpp"
#include "kaclab/kac_pde.hpp"

using namespace kac;
using namespace kac::pde;

namespace {

double gaussian_pdf(double v) { return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi); }

double l1_between(const VelocityDensity& f, const std::function<double(double)>& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.v.size(); ++j) s += std::abs(f.f[j] - g(f.v[j]));
  return s * f.step();
}

// Inverse transform of a grid of rhs values, by an independent trapezoid sum.
double inverse_rhs(std::span<const cplx> r, double h, double v) {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double w = (k == 0 || k + 1 == r.size()) ? 0.5 : 1.0;
    s += w * std::real(std::polar(1.0, -h * static_cast<double>(k) * v) * r[k]);
  }
  return s * h / std::numbers::pi;
}

}  // namespace

TEST_CASE("characteristic grid invariants") {
  const auto g = CharacteristicGrid::from_density(Density1D::bimodal(0.8), 20.0, 1024);
  CHECK(g.phi[0] == cplx(1.0, 0.0));
  for (const auto& z : g.phi) CHECK(std::abs(z) <= 1.0 + 1e-15);
  CHECK(g.node(-5) == std::conj(g.node(5)));
  // Quintic interpolation of a smooth transform between nodes.
  const auto f = Density1D::gaussian(0.7);
  const auto gg = CharacteristicGrid::from_density(f, 20.0, 1024);
  for (double x : {0.013, 1.2345, -3.3, 7.77}) CHECK(std::abs(gg.at(x) - f.characteristic(x)) < 1e-11);
  CHECK_THROWS_AS(static_cast<void>(gg.at(20.5)), DomainError);
}

TEST_CASE("Maxwellian is stationary") {
  const GridSpec spec;
  const auto g = CharacteristicGrid::from_density(Density1D::gaussian(), spec.xi_max, spec.m_xi);
  for (const auto& rho : {ScatteringDensity::uniform(), ScatteringDensity::cos_squared()}) {
    const auto r = rhs_fourier(g, rho, spec);
    double worst = 0.0;
    for (const auto& z : r) worst = std::max(worst, std::abs(z));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("rhs symmetries and energy conservation") {
  const GridSpec spec;
  const auto g = CharacteristicGrid::from_density(Density1D::bimodal(0.8), spec.xi_max, spec.m_xi);
  const auto r = rhs_fourier(g, ScatteringDensity::uniform(), spec);
  CHECK(std::abs(r[0]) < 1e-14);
  // Even density: real transform, real rhs.
  for (const auto& z : r) CHECK(std::abs(z.imag()) < 1e-14);
  // rhs(xi) = a xi^2 + b xi^4 + ...; a is -(1/2) d/dt E v^2 and must vanish.
  const double h = g.step();
  const double a = (16.0 * r[1].real() - r[2].real()) / (12.0 * h * h);
  CHECK(std::abs(a) < 1e-6);
}

TEST_CASE("rhs matches the collision integral computed in velocity space") {
  GridSpec spec;
  spec.xi_max = 24.0;
  spec.m_xi = 1536;
  for (const auto& f : {Density1D::bimodal(0.8), Density1D::fdelta(0.3)}) {
    for (const auto& rho : {ScatteringDensity::uniform(), ScatteringDensity::one_plus_cos()}) {
      spec.theta_points = 128;
      const auto g = CharacteristicGrid::from_density(f, spec.xi_max, spec.m_xi);
      const auto r = rhs_fourier(g, rho, spec);
      for (double v : {0.0, 0.45, 1.3, -2.2, 3.0}) {
        const double direct = collision_integral_direct(f, rho, v, 96, 256);
        CHECK(std::abs(inverse_rhs(r, g.step(), v) - direct) < 1e-7);
      }
    }
  }
}

TEST_CASE("serial and parallel rhs agree bit for bit") {
  const GridSpec spec;
  const auto g = CharacteristicGrid::from_density(Density1D::bimodal(0.6), spec.xi_max, spec.m_xi);
  const auto rho = ScatteringDensity::bump(1.0, 0.3);
  CHECK(rhs_fourier(g, rho, spec, Exec::serial) == rhs_fourier(g, rho, spec, Exec::parallel));
}

TEST_CASE("Gaussian initial data stays put") {
  IntegrateOptions opt;
  opt.snapshot_times = {0.0, 0.5, 1.0};
  const auto tr = integrate(Density1D::gaussian(), ScatteringDensity::uniform(), GridSpec{}, opt);
  REQUIRE(tr.snapshots.size() == 3);
  for (const auto& s : tr.snapshots) CHECK(l1_between(s, gaussian_pdf) < 1e-7);
}

TEST_CASE("bimodal data relaxes to the Maxwellian with mass and energy conserved") {
  IntegrateOptions opt;
  opt.snapshot_times = {0.0, 0.5, 1.0, 2.0, 4.0};
  const auto tr = integrate(Density1D::bimodal(0.8), ScatteringDensity::uniform(), GridSpec{}, opt);
  double last = 1e300;
  for (const auto& s : tr.snapshots) {
    CHECK(s.moment(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.moment(2) == doctest::Approx(1.0).epsilon(1e-8));
    const double d = l1_between(s, gaussian_pdf);
    CHECK(d < last);
    last = d;
  }
  CHECK(tr.snapshots.front().t == 0.0);
  CHECK(tr.snapshots.back().t == 4.0);
}

TEST_CASE("h-functional") {
  const GridSpec spec;
  const auto gamma = to_velocity(CharacteristicGrid::from_density(Density1D::gaussian(), spec.xi_max, spec.m_xi), spec);
  CHECK(std::abs(h_functional(gamma)) < 1e-10);
  const auto half = to_velocity(CharacteristicGrid::from_density(Density1D::gaussian(0.5), spec.xi_max, spec.m_xi), spec);
  CHECK(h_functional(half) == doctest::Approx(0.5 * (0.5 - 1.0 + std::log(2.0))).epsilon(1e-8));
}

TEST_CASE("Hermite coefficients") {
  const GridSpec spec;
  const auto gamma = to_velocity(CharacteristicGrid::from_density(Density1D::gaussian(), spec.xi_max, spec.m_xi), spec);
  CHECK(hermite_coefficient(gamma, 0) == doctest::Approx(1.0).epsilon(1e-10));
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(hermite_coefficient(gamma, n)) < 1e-9);
  const double eps = 0.1;
  const auto pert = to_velocity(
      CharacteristicGrid::from_density(Density1D::hermite_perturbed(4, eps / 24.0), spec.xi_max, spec.m_xi), spec);
  CHECK(std::abs(hermite_coefficient(pert, 4) - eps) < 1e-6);
  CHECK(linear_mode_rate(ScatteringDensity::uniform(), 4) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(linear_mode_rate(ScatteringDensity::cos_squared(), 2)) < 1e-14);
}

TEST_CASE("negative recovered densities are rejected") {
  const GridSpec spec;
  std::vector<double> v(spec.m_v), f(spec.m_v);
  for (int j = 0; j < spec.m_v; ++j) {
    v[j] = -spec.v_max + 2.0 * spec.v_max * j / (spec.m_v - 1);
    const double x = v[j];
    f[j] = gaussian_pdf(x) * (1.0 + 0.5 * (x * x * x * x - 6 * x * x + 3));
  }
  const auto g = CharacteristicGrid::from_samples(v, f, spec.xi_max, spec.m_xi);
  CHECK_THROWS_AS(to_velocity(g, spec), NumericError);
}

TEST_CASE("integration preconditions") {
  IntegrateOptions opt;
  opt.dt = 0.3;
  opt.snapshot_times = {1.0};
  CHECK_THROWS_AS(integrate(Density1D::gaussian(), ScatteringDensity::uniform(), GridSpec{}, opt), ValidationError);
  opt.dt = 0.01;
  opt.snapshot_times = {1.0, 0.5};
  CHECK_THROWS_AS(integrate(Density1D::gaussian(), ScatteringDensity::uniform(), GridSpec{}, opt), ValidationError);
}

TEST_CASE("entropy decreases along trajectories") {
  IntegrateOptions opt;
  opt.snapshot_times = {1.0};
  opt.track_entropy = true;
  const auto tr = integrate(Density1D::fdelta(0.25), ScatteringDensity::cos_squared(), GridSpec{}, opt);
  REQUIRE(tr.step_entropy.size() > 10);
  for (std::size_t k = 1; k < tr.step_entropy.size(); ++k) CHECK(tr.step_entropy[k] <= tr.step_entropy[k - 1] + 1e-8);
}
