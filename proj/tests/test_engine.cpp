#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kaclab/chaos.hpp"
#include "kaclab/error.hpp"
#include "kaclab/kac_walk.hpp"
#include "kaclab/kernel3d.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/scattering.hpp"
#include "kaclab/special.hpp"
#include "kaclab/stats.hpp"

using namespace kac;
using std::numbers::pi;

namespace {

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

Ensemble1D bimodal_state(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 ? 1.0 : -1.0) * (0.3 + 1.7 * static_cast<double>(i % 5) / 4.0);
  return Ensemble1D::projected(std::move(v));
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(StreamKey{42, 7}, 3), b(StreamKey{42, 7}, 3), c(StreamKey{42, 7}, 4), d(StreamKey{42, 7}.sub(1), 3);
  for (int k = 0; k < 100; ++k) {
    const auto x = a.bits64();
    CHECK(x == b.bits64());
    CHECK(x != c.bits64());
    CHECK(x != d.bits64());
  }
  Rng r(StreamKey{1, 1}, 0);
  double s = 0.0, s2 = 0.0;
  const int m = 200000;
  for (int k = 0; k < m; ++k) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / m) < 4.0 / std::sqrt(m));
  CHECK(std::abs(s2 / m - 1.0) < 4.0 * std::sqrt(2.0 / m));
}

TEST_CASE("gauss-legendre and gauss-jacobi integrate polynomials exactly") {
  const auto gl = gauss_legendre(8);
  for (int d = 0; d <= 15; ++d) {
    const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
    CHECK(gl.integrate([d](double x) { return std::pow(x, d); }) == doctest::Approx(exact).epsilon(1e-14));
  }
  // int (1-x)^a (1+x)^b x^2: moments from the Beta function.
  for (double a : {-0.5, 0.0, 0.5, 3.0, 48.0}) {
    const double b = a;
    const auto gj = gauss_jacobi(12, a, b);
    const double m0 = std::exp((a + b + 1) * std::log(2.0) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 2));
    // For a = b the second moment is m0 / (2a + 3).
    CHECK(gj.integrate([](double) { return 1.0; }) == doctest::Approx(m0).epsilon(1e-12));
    CHECK(gj.integrate([](double x) { return x * x; }) == doctest::Approx(m0 / (2 * a + 3)).epsilon(1e-12));
    CHECK(std::abs(gj.integrate([](double x) { return x * x * x; })) < 1e-13 * m0);
  }
  const auto gc = gauss_chebyshev(16);
  CHECK(gc.integrate([](double x) { return x * x; }) == doctest::Approx(pi / 2).epsilon(1e-14));
  const auto comp = composite_gauss_legendre(4, 10, 0.0, 3.0);
  CHECK(comp.integrate([](double x) { return std::exp(x); }) == doctest::Approx(std::expm1(3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_jacobi(4, -1.0, 0.0), ValidationError);
}

TEST_CASE("special functions") {
  CHECK(std::exp(log_sphere_area(2.0)) == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(std::exp(log_sphere_area(3.0, 2.0)) == doctest::Approx(2 * pi * pi * 8).epsilon(1e-14));
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    CHECK(hermite_he(4, x) == doctest::Approx(x * x * x * x - 6 * x * x + 3).epsilon(1e-14));
    CHECK(hermite_he(3, x) == doctest::Approx(x * x * x - 3 * x).epsilon(1e-14));
  }
  CHECK(factorial(10) == 3628800.0);
  // chi2 with 2 degrees of freedom is Exp(1/2).
  CHECK(log_chi2_pdf(2.0, 3.0) == doctest::Approx(std::log(0.5) - 1.5).epsilon(1e-14));
  CHECK(log_add(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("line fits recover exact data") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y, m, se;
  for (double t : x) {
    y.push_back(1.5 - 0.25 * t);
    m.push_back(3.0 * std::exp(-0.7 * t));
    se.push_back(0.01);
  }
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(fit_exponential_decay(x, m, se).slope == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("uniform angle sampler") {
  const auto rho = ScatteringDensity::uniform();
  Rng r(StreamKey{5, 0}, 0);
  const int m = 1000000;
  std::vector<double> th(m);
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    th[k] = rho.sample(r);
    s += std::cos(4 * th[k]);
  }
  // Var cos(4 theta) = 1/2.
  CHECK(std::abs(s / m) < 4.0 * std::sqrt(0.5 / m));
  th.resize(100000);
  CHECK(ks_statistic(th, [](double t) { return (t + pi) / (2 * pi); }) < 1.63 / std::sqrt(100000.0));
}

TEST_CASE("cos^2 angle sampler matches its quadrature moment") {
  const auto rho = ScatteringDensity::cos_squared();
  const double exact = rho.quadrature().integrate([](double t) { return 1.0 - std::cos(4 * t); });
  // cos^2/pi: int (1 - cos 4t) cos^2 t / pi = 1.
  CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));
  Rng r(StreamKey{6, 0}, 0);
  const int m = 400000;
  std::vector<double> g(m);
  for (int k = 0; k < m; ++k) g[k] = 1.0 - std::cos(4 * rho.sample(r));
  const auto est = mean_stderr(g);
  CHECK(std::abs(est.value - exact) < 4.0 * est.stderr_);
}

TEST_CASE("scattering density validation") {
  CHECK_THROWS_AS(ScatteringDensity::from_function("odd", [](double t) { return (1.0 + 0.5 * std::sin(t)) / (2 * pi); }),
                  ValidationError);
  CHECK_THROWS_AS(ScatteringDensity::from_function("negative", [](double t) { return (1.0 + 2.0 * std::cos(t)) / (2 * pi); }),
                  ValidationError);
  CHECK_THROWS_AS(ScatteringDensity::from_function("mass two", [](double) { return 1.0 / pi; }), ValidationError);
  const auto t = ScatteringDensity::from_table({-pi, 0.0, pi}, {1.0, 3.0, 1.0}, true);
  CHECK(t.quadrature().integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pair rotation examples") {
  std::vector<double> v{1.0, 2.0};
  apply_rotation(v, 0, 1, 0.0);
  CHECK(v == std::vector<double>{1.0, 2.0});
  apply_rotation(v, 0, 1, pi / 2);
  CHECK(v[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-15));
  Ensemble1D single(std::vector<double>{1.0});
  Rng r(StreamKey{0, 0}, 0);
  CHECK_THROWS_AS(kac_step(single, ScatteringDensity::uniform(), r), ValidationError);
}

TEST_CASE("1D steps conserve energy") {
  Ensemble1D e = bimodal_state(37);
  const auto rho = ScatteringDensity::one_plus_cos();
  Rng r(StreamKey{7, 0}, 0);
  for (int k = 0; k < 100000; ++k) {
    const double before = e.energy();
    kac_step(e, rho, r);
    REQUIRE(std::abs(e.energy() - before) <= 1e-12 * before);
  }
}

TEST_CASE("3D steps conserve energy and momentum") {
  std::vector<Vec3> v(25);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = 0.37 * static_cast<double>(i);
    v[i] = {std::cos(a) * (1 + i % 3), std::sin(2 * a), 0.1 * static_cast<double>(i % 7)};
  }
  Ensemble3D e = Ensemble3D::projected(std::move(v));
  CHECK(e.energy() == doctest::Approx(25.0).epsilon(1e-14));
  for (const auto& b : {AngularKernel3D::uniform(), AngularKernel3D::linear(0.5), AngularKernel3D::power(3.0)}) {
    Rng r(StreamKey{8, 0}, 1);
    for (int k = 0; k < 20000; ++k) {
      const double e0 = e.energy();
      const Vec3 p0 = e.momentum();
      kac_step_3d(e, b, r);
      const Vec3 p1 = e.momentum();
      REQUIRE(std::abs(e.energy() - e0) <= 1e-12 * e0);
      for (int a = 0; a < 3; ++a) REQUIRE(std::abs(p1[a] - p0[a]) <= 1e-12);
    }
  }
}

TEST_CASE("3D collision with w = e-hat leaves the pair unchanged") {
  Ensemble3D e = Ensemble3D::projected({{1.0, 0.5, -0.2}, {-1.0, -0.5, 0.2}});
  const Vec3 a = e.v[0], b = e.v[1];
  const Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  const double g = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  apply_collision_3d(e, 0, 1, {d[0] / g, d[1] / g, d[2] / g});
  for (int k = 0; k < 3; ++k) {
    CHECK(e.v[0][k] == doctest::Approx(a[k]).epsilon(1e-15));
    CHECK(e.v[1][k] == doctest::Approx(b[k]).epsilon(1e-15));
  }
}

TEST_CASE("3D kernel moments and cosine sampler") {
  const auto u = AngularKernel3D::uniform();
  CHECK(u.b1() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(u.b2() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto lin = AngularKernel3D::linear(0.6);
  // (1/2) int x (1 + b x) dx = b/3.
  CHECK(lin.b1() == doctest::Approx(0.2).epsilon(1e-12));
  Rng r(StreamKey{9, 0}, 0);
  const int m = 400000;
  std::vector<double> c(m);
  for (int k = 0; k < m; ++k) c[k] = lin.sample_cosine(r);
  const auto est = mean_stderr(c);
  CHECK(std::abs(est.value - 0.2) < 4.0 * est.stderr_);
}

TEST_CASE("evolve for zero time does nothing") {
  Ensemble1D e = bimodal_state(10);
  const auto before = e.v;
  JumpClock clock;
  Rng r(StreamKey{10, 0}, 0);
  CHECK(evolve(e, clock, 0.0, ScatteringDensity::uniform(), r) == 0);
  CHECK(e.v == before);
}

TEST_CASE("observable traces: constants and conserved energy") {
  const Ensemble1D e0 = bimodal_state(12);
  const std::vector<double> times{0.0, 0.5, 1.0, 3.0};
  const auto rho = ScatteringDensity::uniform();
  const Trace one = observable_trace(e0, [](const Ensemble1D&) { return 1.0; }, times, 64, rho, {11, 0});
  const Trace en = observable_trace(e0, [](const Ensemble1D& e) { return e.energy(); }, times, 64, rho, {11, 0});
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(one.mean[k] == 1.0);
    CHECK(one.stderr_[k] == 0.0);
    CHECK(en.mean[k] == doctest::Approx(12.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(observable_trace(e0, [](const Ensemble1D&) { return 1.0; }, std::vector<double>{}, 4, rho, {11, 0}),
                  ValidationError);
}

TEST_CASE("collision counts are Poisson over disjoint intervals") {
  const Ensemble1D e0 = bimodal_state(20);
  const std::vector<double> times{1.0, 2.0};
  const auto m = run_replicas(e0, [](const Ensemble1D&) { return 0.0; }, times, 4000, ScatteringDensity::uniform(),
                              {12, 0}, Exec::parallel);
  std::vector<double> first(m.replicas), second(m.replicas);
  for (std::size_t r = 0; r < m.replicas; ++r) {
    first[r] = m.collisions[r * 2];
    second[r] = m.collisions[r * 2 + 1] - m.collisions[r * 2];
  }
  // Rate N = 20 per unit time; variance/mean of a Poisson count is 1.
  for (const auto* c : {&first, &second}) {
    const double mu = mean_of(*c);
    CHECK(std::abs(mu - 20.0) < 4.0 * std::sqrt(20.0 / 4000));
    // Sampling sd of the dispersion index is about sqrt(2/(M-1)).
    CHECK(std::abs(sample_variance(*c) / mu - 1.0) < 4.0 * std::sqrt(2.0 / 3999));
  }
  // Increments over disjoint intervals are uncorrelated.
  const double m1 = mean_of(first), m2 = mean_of(second);
  double cov = 0.0;
  for (std::size_t r = 0; r < first.size(); ++r) cov += (first[r] - m1) * (second[r] - m2);
  cov /= static_cast<double>(first.size() - 1);
  CHECK(std::abs(cov / 20.0) < 4.0 / std::sqrt(4000.0));
}

TEST_CASE("long runs relax to the Mehler marginal") {
  const std::size_t n = 1000;
  const Ensemble1D e0 = bimodal_state(n);
  const std::vector<double> times{12.0};
  std::vector<double> values;
  const auto rho = ScatteringDensity::uniform();
  // One replica per stream; pool the velocities of all replicas.
  for (std::uint32_t rep = 0; rep < 60; ++rep) {
    Ensemble1D e = e0;
    JumpClock clock;
    Rng r(StreamKey{13, 0}, rep);
    evolve(e, clock, times[0], rho, r);
    values.insert(values.end(), e.v.begin(), e.v.end());
  }
  const Histogram h = make_histogram(values, -4.0, 4.0, 40);
  const double l1 = l1_distance(h, [n](double a, double b) { return chaos::mehler_marginal_mass(n, a, b); },
                                1.0 - chaos::mehler_marginal_mass(n, -4.0, 4.0));
  CHECK(l1 < 0.03);
}

TEST_CASE("replica streams are bit-identical serial and parallel") {
  const Ensemble1D e0 = bimodal_state(30);
  const std::vector<double> times{0.5, 1.0, 2.0};
  auto obs = [](const Ensemble1D& e) {
    double s = 0.0;
    for (double x : e.v) s += x * x * x * x;
    return s;
  };
  const auto rho = ScatteringDensity::cos_squared();
  const auto a = run_replicas(e0, obs, times, 97, rho, {14, 3}, Exec::serial);
  const auto b = run_replicas(e0, obs, times, 97, rho, {14, 3}, Exec::parallel);
  CHECK(a.values == b.values);
  CHECK(a.collisions == b.collisions);

  std::vector<Vec3> v(10);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {std::cos(1.0 * i), std::sin(2.0 * i), 0.1 * i};
  const Ensemble3D e3 = Ensemble3D::projected(v);
  auto obs3 = [](const Ensemble3D& e) { return e.v[0][0]; };
  const auto c = run_replicas(e3, obs3, times, 33, AngularKernel3D::uniform(), {14, 4}, Exec::serial);
  const auto d = run_replicas(e3, obs3, times, 33, AngularKernel3D::uniform(), {14, 4}, Exec::parallel);
  CHECK(c.values == d.values);
}
