#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kaclab/chaos.hpp"
#include "kaclab/error.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/spectral.hpp"

using namespace kac;
using namespace kac::spectral;
using std::numbers::pi;

namespace {

std::vector<std::vector<double>> sphere_points(std::size_t n, int count, std::uint64_t seed) {
  Rng r(StreamKey{seed, 0}, 0);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) out.push_back(chaos::sample_uniform_sphere(n, r));
  return out;
}

// 2 int (1 - cos k theta) rho by plain composite Gauss-Legendre on [-pi, pi].
double fourier_gap(const ScatteringDensity& rho, int k) {
  const auto q = composite_gauss_legendre(16, 256, -pi, pi);
  return 2.0 * q.integrate([&](double t) { return (1.0 - std::cos(k * t)) * rho(t); });
}

double sum_pow(std::span<const double> v, int p) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, p);
  return s;
}

}  // namespace

TEST_CASE("Q preserves constants and the energy") {
  const auto rho = ScatteringDensity::cos_squared();
  for (const auto& v : sphere_points(6, 10, 1)) {
    CHECK(apply_Q([](std::span<const double>) { return 1.0; }, v, rho) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(apply_Q([](std::span<const double> x) { return sum_pow(x, 2); }, v, rho) ==
          doctest::Approx(6.0).epsilon(1e-13));
  }
  std::vector<double> off{1.0, 1.0, 2.0};
  CHECK_THROWS_AS(apply_Q([](std::span<const double>) { return 1.0; }, off, rho), DomainError);
}

TEST_CASE("quartic eigenfunction") {
  CHECK(GapEigenfunction(2)(std::vector<double>{1.0, 1.0}) == doctest::Approx(-1.0).epsilon(1e-15));

  const auto rho = ScatteringDensity::uniform();
  const GapEigenfunction f4(4);
  for (const auto& v : sphere_points(4, 100, 2)) {
    const double phi = f4(v);
    const double lhs = 4.0 * (phi - apply_Q(f4, v, rho));
    CHECK(std::abs(lhs - 1.0 * phi) < 1e-8);
  }
  // For any even rho the same function is an eigenfunction, with eigenvalue Gamma_N.
  const auto bump = ScatteringDensity::bump(1.0, 0.2);
  for (std::size_t n : {3u, 5u, 9u}) {
    const GapEigenfunction f(n);
    const double gamma_n = gap_value(n, bump).gap;
    for (const auto& v : sphere_points(n, 20, 3)) {
      const double phi = f(v);
      CHECK(std::abs(static_cast<double>(n) * (phi - apply_Q(f, v, bump, 128)) - gamma_n * phi) <
            1e-9 * (1.0 + std::abs(phi)));
    }
  }
}

TEST_CASE("closed-form gaps for uniform rho") {
  CHECK(gap_value(2, ScatteringDensity::uniform()).gap == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(gap_value(3, ScatteringDensity::uniform()).gap == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(gap_value(1000000, ScatteringDensity::uniform()).gap == doctest::Approx(0.5).epsilon(1e-5));
  const auto r = gap_value(7, ScatteringDensity::uniform());
  CHECK(r.exact);
  CHECK(r.large_n_exact);
  CHECK(uniform_gap(7) == doctest::Approx(0.5 * 9.0 / 6.0));
}

TEST_CASE("Gamma_N for a non-uniform rho") {
  const auto rho = ScatteringDensity::cos_squared();
  // Gamma_2 = 2 int (1 - cos 4t) cos^2 t / pi = 2.
  CHECK(gamma2(rho) == doctest::Approx(2.0).epsilon(1e-12));
  const auto r = gap_value(6, rho);
  CHECK(r.gap == doctest::Approx(0.25 * 8.0 / 5.0 * 2.0).epsilon(1e-12));
  CHECK_FALSE(r.exact);
}

TEST_CASE("Delta_2 over Fourier modes") {
  const auto u = delta2(ScatteringDensity::uniform());
  CHECK(u.value == doctest::Approx(2.0).epsilon(1e-14));

  // (1 + cos)/(2 pi): cosine coefficients 1/2 at k = 1, 0 otherwise.
  const auto opc = ScatteringDensity::one_plus_cos();
  const auto d = delta2(opc);
  CHECK(d.argmin_k == 1);
  CHECK(d.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.value == doctest::Approx(fourier_gap(opc, 1)).epsilon(1e-12));

  // Bumps at +-pi/2: the k = 4 mode is as slow as Gamma_2 itself.
  const auto quarter = ScatteringDensity::bump(pi / 2, 0.1);
  const auto dq = delta2(quarter);
  CHECK(dq.value == doctest::Approx(gamma2(quarter)).epsilon(1e-10));
  CHECK(dq.value == doctest::Approx(fourier_gap(quarter, 4)).epsilon(1e-10));

  // Bumps at +-2 pi/3: k = 3 is nearly invariant while Gamma_2 is large.
  const auto third = ScatteringDensity::bump(2 * pi / 3, 0.1);
  const auto dt = delta2(third);
  CHECK(dt.argmin_k == 3);
  CHECK(dt.value < 0.5 * gamma2(third));
  CHECK(dt.value == doctest::Approx(fourier_gap(third, 3)).epsilon(1e-10));
  CHECK_FALSE(gap_value(10, third).large_n_exact);
}

TEST_CASE("K operator basics") {
  for (std::size_t n : {4u, 7u, 30u}) {
    const double r = std::sqrt(static_cast<double>(n));
    for (double v : {0.0, 0.4 * r, -0.9 * r}) {
      CHECK(K_apply([](double) { return 1.0; }, v, n) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(K_apply([](double x) { return x; }, v, n)) < 1e-13);
    }
  }
  for (double v : {0.0, 0.5, 1.2, -1.9}) {
    CHECK(K_apply([](double x) { return x * x - 1.0; }, v, 4) == doctest::Approx(-(v * v - 1.0) / 3.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(K_apply([](double) { return 1.0; }, 2.5, 4), DomainError);
}

TEST_CASE("K eigenvalues") {
  CHECK(K_eigenvalue(0, 9) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(K_eigenvalue(1, 4) == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  CHECK(K_eigenvalue(2, 3) == doctest::Approx(3.0 / 8.0).epsilon(1e-13));
  for (std::size_t n = 5; n <= 20; ++n) {
    const double nn = static_cast<double>(n);
    CHECK(K_eigenvalue(1, n) == doctest::Approx(-1.0 / (nn - 1)).epsilon(1e-12));
    CHECK(K_eigenvalue(2, n) == doctest::Approx(3.0 / (nn * nn - 1)).epsilon(1e-12));
    for (int m = 0; m <= 6; ++m) CHECK(K_eigenvalue(m, n) == doctest::Approx(K_eigenvalue_closed_form(m, n)).epsilon(1e-12));
  }
  for (int m = 1; m < 6; ++m) CHECK(std::abs(K_eigenvalue(m + 1, 5)) < std::abs(K_eigenvalue(m, 5)));
}

TEST_CASE("K eigenpolynomials are orthonormal eigenfunctions") {
  for (std::size_t n : {5u, 12u}) {
    const double nn = static_cast<double>(n);
    const double r = std::sqrt(nn);
    const auto ps = K_eigenpolynomials(n, 8);
    // Weight (1 - v^2/N)^{(N-3)/2} normalized on [-sqrt N, sqrt N].
    const auto q = composite_gauss_legendre(16, 64, -r, r);
    auto w = [&](double v) { return std::pow(std::max(0.0, 1.0 - v * v / nn), 0.5 * (nn - 3)); };
    const double z = q.integrate(w);
    for (int a = 0; a <= 8; ++a) {
      for (int b = a; b <= 8; ++b) {
        const double ip = q.integrate([&](double v) { return ps[a](v) * ps[b](v) * w(v); }) / z;
        CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
      }
    }
    for (int m = 0; m <= 8; ++m) {
      const double alpha = (m % 2) ? 0.0 : K_eigenvalue(m / 2, n);
      for (double v : {0.1, 0.7 * r, -0.4 * r}) {
        CHECK(std::abs(K_apply(ps[m], v, n) - alpha * ps[m](v)) < 1e-10 * (1.0 + std::abs(ps[m](v))));
      }
    }
  }
}

TEST_CASE("induction bound telescopes to the closed form") {
  CHECK(induction_bound(2) == 2.0);
  CHECK(induction_bound(3) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(induction_bound(10) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  for (std::size_t n = 2; n <= 1000; ++n) {
    const double nn = static_cast<double>(n);
    REQUIRE(std::abs(induction_bound(n) - 0.5 * (nn + 2) / (nn - 1)) < 1e-12);
  }
  CHECK(induction_bound_exact(10) == std::pair<std::int64_t, std::int64_t>{2, 3});
  CHECK(induction_bound_exact(1000) == std::pair<std::int64_t, std::int64_t>{167, 333});
}

TEST_CASE("3D gap cases") {
  const auto u = gap_3d(4, AngularKernel3D::uniform());
  CHECK(u.b1 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(u.b2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(u.which == Gap3DCase::b2_dominant);
  CHECK(u.gap == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
  CHECK(gap_3d(100000, AngularKernel3D::uniform()).gap == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(delta2_3d(AngularKernel3D::uniform()).value == doctest::Approx(2.0).epsilon(1e-13));

  // Forward-peaked kernel: B_2 < B_1 and the l = 1 harmonic is the slowest.
  const auto p = gap_3d(8, AngularKernel3D::power(3.0));
  CHECK(p.b1 == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p.b2 < p.b1);
  CHECK(p.which == Gap3DCase::min_rule);
  CHECK(p.gap == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(p.eigenspace.find("v_i^a - v_j^a") != std::string::npos);

  // Below N = 7 the min rule is not claimed.
  CHECK(std::isnan(gap_3d(5, AngularKernel3D::power(3.0)).gap));
}
