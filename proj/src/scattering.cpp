#include "kaclab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kaclab/error.hpp"

namespace kac {

namespace {
constexpr double kPi = std::numbers::pi;

// Cell integrals of rho on a fine uniform grid, 8-point Gauss-Legendre per cell.
std::vector<double> fine_cdf(const std::function<double(double)>& rho, int cells) {
  const QuadratureRule gl = gauss_legendre(8);
  const double h = 2.0 * kPi / cells;
  std::vector<double> cdf(cells + 1, 0.0);
  for (int c = 0; c < cells; ++c) {
    const double lo = -kPi + c * h;
    double s = 0.0;
    for (std::size_t k = 0; k < gl.size(); ++k) s += gl.weights[k] * rho(lo + 0.5 * h * (gl.nodes[k] + 1.0));
    cdf[c + 1] = cdf[c] + 0.5 * h * std::max(s, 0.0);
  }
  return cdf;
}
}  // namespace

ScatteringDensity::ScatteringDensity(std::string name, std::function<double(double)> rho, bool uniform,
                                     std::vector<double> breakpoints)
    : name_(std::move(name)), rho_(std::move(rho)), uniform_(uniform), breakpoints_(std::move(breakpoints)) {
  validate_and_tabulate();
}

ScatteringDensity ScatteringDensity::uniform() {
  return ScatteringDensity("uniform", [](double) { return 1.0 / (2.0 * kPi); }, true);
}

ScatteringDensity ScatteringDensity::cos_squared() {
  return ScatteringDensity("cos2", [](double t) { return std::cos(t) * std::cos(t) / kPi; }, false);
}

ScatteringDensity ScatteringDensity::one_plus_cos() {
  return ScatteringDensity("1pcos", [](double t) { return (1.0 + std::cos(t)) / (2.0 * kPi); }, false);
}

ScatteringDensity ScatteringDensity::bump(double center, double width) {
  require(width > 0.0 && center >= 0.0 && center <= kPi, "bump: need width > 0 and center in [0, pi]");
  auto raw = [center, width](double t) {
    // Periodic images keep the bump smooth across +-pi.
    double s = 0.0;
    for (int img = -1; img <= 1; ++img) {
      const double a = (t - center + 2.0 * kPi * img) / width;
      const double b = (t + center + 2.0 * kPi * img) / width;
      s += std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
    }
    return s;
  };
  const QuadratureRule q = composite_gauss_legendre(16, 256, -kPi, kPi);
  const double mass = q.integrate(raw);
  std::ostringstream name;
  name << "bump:" << center << "," << width;
  return ScatteringDensity(name.str(), [raw, mass](double t) { return raw(t) / mass; }, false);
}

ScatteringDensity ScatteringDensity::from_function(std::string name, std::function<double(double)> rho) {
  return ScatteringDensity(std::move(name), std::move(rho), false);
}

ScatteringDensity ScatteringDensity::from_table(std::vector<double> theta, std::vector<double> value,
                                                bool normalize) {
  require(theta.size() == value.size() && theta.size() >= 2, "scattering table: need >= 2 matching rows");
  require(std::is_sorted(theta.begin(), theta.end()), "scattering table: theta must be ascending");
  require(std::abs(theta.front() + kPi) < 1e-9 && std::abs(theta.back() - kPi) < 1e-9,
          "scattering table: theta must span [-pi, pi]");
  for (double v : value) require(v >= 0.0, "scattering table: negative density value");
  if (normalize) {
    double mass = 0.0;
    for (std::size_t k = 1; k < theta.size(); ++k) mass += 0.5 * (value[k] + value[k - 1]) * (theta[k] - theta[k - 1]);
    require(mass > 0.0, "scattering table: zero mass");
    for (double& v : value) v /= mass;
  }
  auto rho = [theta, value](double t) {
    if (t <= theta.front()) return value.front();
    if (t >= theta.back()) return value.back();
    const auto it = std::upper_bound(theta.begin(), theta.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - theta.begin());
    const double f = (t - theta[k - 1]) / (theta[k] - theta[k - 1]);
    return value[k - 1] + f * (value[k] - value[k - 1]);
  };
  return ScatteringDensity("table", rho, false, theta);
}

void ScatteringDensity::validate_and_tabulate() {
  // Non-negativity and evenness on the table grid.
  double peak = 0.0;
  for (int k = 0; k <= kTableSize; ++k) {
    const double t = -kPi + 2.0 * kPi * k / kTableSize;
    const double r = rho_(t);
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("scattering density " + name_ + ": negative or non-finite value");
    peak = std::max(peak, r);
  }
  for (int k = 0; k <= kTableSize; ++k) {
    const double t = -kPi + 2.0 * kPi * k / kTableSize;
    if (std::abs(rho_(t) - rho_(-t)) > 1e-12 * std::max(peak, 1.0))
      throw ValidationError("scattering density " + name_ + ": not even (rho(-theta) != rho(theta))");
  }
  // Normalization.
  double mass = 0.0;
  if (!breakpoints_.empty()) {
    const QuadratureRule gl = gauss_legendre(4);
    for (std::size_t p = 1; p < breakpoints_.size(); ++p) {
      const double a = breakpoints_[p - 1], b = breakpoints_[p];
      for (std::size_t k = 0; k < gl.size(); ++k)
        mass += 0.5 * (b - a) * gl.weights[k] * rho_(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k]);
    }
  } else {
    mass = composite_gauss_legendre(16, 256, -kPi, kPi).integrate(rho_);
  }
  if (std::abs(mass - 1.0) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "scattering density " << name_ << ": integral is " << mass << ", expected 1";
    throw ValidationError(os.str());
  }
  if (uniform_) return;

  // Quantile table by inverting a fine CDF.
  constexpr int kFine = 16 * kTableSize;
  const std::vector<double> cdf = fine_cdf(rho_, kFine);
  const double total = cdf.back();
  auto q = std::make_shared<std::vector<double>>(kTableSize + 1);
  const double h = 2.0 * kPi / kFine;
  for (int m = 0; m <= kTableSize; ++m) {
    const double target = total * m / kTableSize;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    std::size_t c = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cdf.begin(), 1));
    if (c > static_cast<std::size_t>(kFine)) c = kFine;
    const double lo = cdf[c - 1], hi = cdf[c];
    const double frac = hi > lo ? (target - lo) / (hi - lo) : 0.0;
    (*q)[m] = -kPi + h * (static_cast<double>(c - 1) + frac);
  }
  (*q)[0] = -kPi;
  (*q)[kTableSize] = kPi;
  quantiles_ = std::move(q);
}

double ScatteringDensity::sample(Rng& rng) const {
  const double u = rng.uniform();
  if (uniform_) return -kPi + 2.0 * kPi * u;
  const double x = u * kTableSize;
  const auto m = static_cast<std::size_t>(x);
  const double f = x - static_cast<double>(m);
  const auto& q = *quantiles_;
  const double t = q[m] + f * (q[m + 1] - q[m]);
  return t < kPi ? t : -kPi;
}

AngleQuadrature ScatteringDensity::quadrature(int points, int panels, int points_per_panel) const {
  AngleQuadrature aq;
  if (uniform_) {
    aq.theta.resize(points);
    aq.weight.assign(points, 1.0 / points);
    for (int k = 0; k < points; ++k) aq.theta[k] = -kPi + 2.0 * kPi * (k + 0.5) / points;
    return aq;
  }
  QuadratureRule rule;
  if (!breakpoints_.empty()) {
    const QuadratureRule gl = gauss_legendre(4);
    for (std::size_t p = 1; p < breakpoints_.size(); ++p) {
      const double a = breakpoints_[p - 1], b = breakpoints_[p];
      for (std::size_t k = 0; k < gl.size(); ++k) {
        rule.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k]);
        rule.weights.push_back(0.5 * (b - a) * gl.weights[k]);
      }
    }
  } else {
    rule = composite_gauss_legendre(points_per_panel, panels, -kPi, kPi);
  }
  aq.theta = rule.nodes;
  aq.weight.resize(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) aq.weight[k] = rule.weights[k] * rho_(rule.nodes[k]);
  return aq;
}

double ScatteringDensity::cosine_moment(int k) const {
  if (uniform_) return k == 0 ? 1.0 : 0.0;
  // Resolve cos(k theta) on top of the rho panels.
  const AngleQuadrature aq = quadrature(64, std::max(64, 8 * k), 16);
  return aq.integrate([k](double t) { return std::cos(k * t); });
}

}  // namespace kac
