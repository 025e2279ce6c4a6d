#include "kaclab/kernel3d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kaclab/error.hpp"
#include "kaclab/quadrature.hpp"

namespace kac {

namespace {
const QuadratureRule& moment_rule() {
  static const QuadratureRule rule = composite_gauss_legendre(16, 64, -1.0, 1.0);
  return rule;
}
}  // namespace

AngularKernel3D::AngularKernel3D(std::string name, std::function<double(double)> b, bool uniform)
    : name_(std::move(name)), b_(std::move(b)), uniform_(uniform) {
  const QuadratureRule& q = moment_rule();
  for (int k = 0; k <= kTableSize; ++k) {
    const double x = -1.0 + 2.0 * k / kTableSize;
    const double v = b_(x);
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("angular kernel " + name_ + ": negative or non-finite value");
  }
  const double mass = 0.5 * q.integrate(b_);
  if (std::abs(mass - 1.0) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "angular kernel " << name_ << ": (1/2) int B is " << mass << ", expected 1";
    throw ValidationError(os.str());
  }
  b1_ = 0.5 * q.integrate([this](double x) { return x * b_(x); });
  b2_ = 0.5 * q.integrate([this](double x) { return x * x * b_(x); });

  // Quantiles of c from a fine CDF.
  constexpr int kFine = 32 * kTableSize;
  std::vector<double> cdf(kFine + 1, 0.0);
  const QuadratureRule gl = gauss_legendre(8);
  const double h = 2.0 / kFine;
  for (int c = 0; c < kFine; ++c) {
    const double lo = -1.0 + c * h;
    double s = 0.0;
    for (std::size_t k = 0; k < gl.size(); ++k) s += gl.weights[k] * b_(lo + 0.5 * h * (gl.nodes[k] + 1.0));
    cdf[c + 1] = cdf[c] + 0.25 * h * s;
  }
  auto table = std::make_shared<std::vector<double>>(kTableSize + 1);
  for (int m = 0; m <= kTableSize; ++m) {
    const double target = cdf.back() * m / kTableSize;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    std::size_t c = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cdf.begin(), 1));
    if (c > static_cast<std::size_t>(kFine)) c = kFine;
    const double frac = cdf[c] > cdf[c - 1] ? (target - cdf[c - 1]) / (cdf[c] - cdf[c - 1]) : 0.0;
    (*table)[m] = -1.0 + h * (static_cast<double>(c - 1) + frac);
  }
  (*table)[0] = -1.0;
  (*table)[kTableSize] = 1.0;
  quantiles_ = std::move(table);
}

AngularKernel3D AngularKernel3D::uniform() {
  return AngularKernel3D("uniform", [](double) { return 1.0; }, true);
}

AngularKernel3D AngularKernel3D::linear(double b) {
  require(std::abs(b) <= 1.0, "linear kernel: need |b| <= 1");
  std::ostringstream name;
  name << "linear:" << b;
  return AngularKernel3D(name.str(), [b](double x) { return 1.0 + b * x; }, false);
}

AngularKernel3D AngularKernel3D::power(double a) {
  require(a >= 0.0, "power kernel: need a >= 0");
  std::ostringstream name;
  name << "power:" << a;
  return AngularKernel3D(name.str(), [a](double x) { return (a + 1.0) * std::pow(0.5 * (1.0 + x), a); }, false);
}

AngularKernel3D AngularKernel3D::from_function(std::string name, std::function<double(double)> b) {
  return AngularKernel3D(std::move(name), std::move(b), false);
}

double AngularKernel3D::legendre_moment(int l) const {
  return 0.5 * moment_rule().integrate([this, l](double x) { return std::legendre(static_cast<unsigned>(l), x) * b_(x); });
}

double AngularKernel3D::sample_cosine(Rng& rng) const {
  const double u = rng.uniform();
  if (uniform_) return -1.0 + 2.0 * u;
  const double x = u * kTableSize;
  const auto m = static_cast<std::size_t>(x);
  const double f = x - static_cast<double>(m);
  const auto& q = *quantiles_;
  return q[m] + f * (q[m + 1] - q[m]);
}

}  // namespace kac
