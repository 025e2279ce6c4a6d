#include "kaclab/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kaclab/error.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/special.hpp"

namespace kac {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double parse_number(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("density spec '" + spec + "': '" + s + "' is not a number");
  }
  if (used != s.size()) throw ValidationError("density spec '" + spec + "': '" + s + "' is not a number");
  return x;
}

double component_log_pdf(const GaussianComponent& c, double v) {
  const double d = v - c.mean;
  return std::log(c.weight) - kLogSqrt2Pi - 0.5 * std::log(c.variance) - 0.5 * d * d / c.variance;
}

}  // namespace

Density1D Density1D::mixture(std::string name, std::vector<GaussianComponent> components) {
  require(!components.empty(), "mixture: no components");
  double total = 0.0;
  for (const auto& c : components) {
    require(c.weight > 0.0 && std::isfinite(c.weight), "mixture: weights must be positive");
    require(c.variance > 0.0 && std::isfinite(c.variance), "mixture: variances must be positive");
    total += c.weight;
  }
  require(std::abs(total - 1.0) < 1e-12, "mixture: weights must sum to 1");
  // Merge identical components so degenerate mixtures reduce exactly.
  std::vector<GaussianComponent> merged;
  for (const auto& c : components) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const GaussianComponent& m) {
      return m.mean == c.mean && m.variance == c.variance;
    });
    if (it == merged.end()) {
      merged.push_back(c);
    } else {
      it->weight += c.weight;
    }
  }
  if (merged.size() == 1) merged[0].weight = 1.0;
  Density1D d;
  d.name_ = std::move(name);
  d.components_ = std::move(merged);
  return d;
}

Density1D Density1D::gaussian(double variance) {
  require(variance > 0.0, "gaussian: variance must be positive");
  std::ostringstream os;
  os.precision(17);
  os << "gaussian:" << variance;
  return mixture(variance == 1.0 ? "gaussian" : os.str(), {{1.0, 0.0, variance}});
}

Density1D Density1D::fdelta(double delta) {
  require(delta > 0.0 && delta <= 0.5, "fdelta: delta must lie in (0, 1/2]");
  std::ostringstream os;
  os.precision(17);
  os << "fdelta:" << delta;
  return mixture(os.str(), {{delta, 0.0, 1.0 / (2.0 * delta)}, {1.0 - delta, 0.0, 1.0 / (2.0 * (1.0 - delta))}});
}

Density1D Density1D::bimodal(double shift) {
  require(shift >= 0.0 && shift < 1.0, "bimodal: shift must lie in [0, 1)");
  std::ostringstream os;
  os.precision(17);
  os << "bimodal:" << shift;
  const double var = 1.0 - shift * shift;
  return mixture(os.str(), {{0.5, shift, var}, {0.5, -shift, var}});
}

Density1D Density1D::hermite_perturbed(int n, double c) {
  require(n >= 1 && n <= 12, "hermite_perturbed: degree must lie in 1..12");
  // He_n(x) grows polynomially, so for c != 0 negativity shows up within |x| < 2n.
  for (int k = 0; k <= 40000; ++k) {
    const double x = -4.0 * n + 8.0 * n * k / 40000.0;
    if (1.0 + c * hermite_he(n, x) < 0.0) throw ValidationError("hermite_perturbed: density would be negative");
  }
  if (n % 2 == 1 && c != 0.0) throw ValidationError("hermite_perturbed: odd degree with c != 0 goes negative");
  Density1D d;
  std::ostringstream os;
  os.precision(17);
  os << "hermite:" << n << ":" << c;
  d.name_ = os.str();
  d.components_ = {{1.0, 0.0, 1.0}};
  d.hermite_n_ = n;
  d.hermite_c_ = c;
  if (c != 0.0) {
    // Quantile table from a fine CDF on [-L, L].
    const double L = 12.0;
    const int fine = 1 << 16;
    std::vector<double> cdf(fine + 1, 0.0);
    const double h = 2.0 * L / fine;
    for (int k = 1; k <= fine; ++k) {
      const double a = -L + h * (k - 1), b = -L + h * k;
      cdf[k] = cdf[k - 1] + 0.5 * h * (d.pdf(a) + d.pdf(b));
    }
    const double total = cdf[fine];
    auto q = std::make_shared<std::vector<double>>(fine + 1);
    for (int k = 0; k <= fine; ++k) {
      const double u = static_cast<double>(k) / fine;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u * total);
      const auto j = static_cast<int>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, fine));
      const double frac = (u * total - cdf[j - 1]) / std::max(cdf[j] - cdf[j - 1], 1e-300);
      (*q)[k] = -L + h * (j - 1 + std::clamp(frac, 0.0, 1.0));
    }
    d.quantiles_ = std::move(q);
  }
  return d;
}

Density1D Density1D::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw ValidationError("empty density spec");
  const std::string& kind = parts[0];
  if (kind == "gaussian" && parts.size() <= 2) {
    return gaussian(parts.size() == 2 ? parse_number(parts[1], spec) : 1.0);
  }
  if (kind == "fdelta" && parts.size() == 2) return fdelta(parse_number(parts[1], spec));
  if (kind == "bimodal" && parts.size() <= 2) return bimodal(parts.size() == 2 ? parse_number(parts[1], spec) : 0.8);
  if (kind == "hermite" && parts.size() == 3) {
    return hermite_perturbed(static_cast<int>(parse_number(parts[1], spec)), parse_number(parts[2], spec));
  }
  throw ValidationError("unknown density spec '" + spec +
                        "' (expected gaussian[:var], fdelta:<delta>, bimodal[:shift] or hermite:<n>:<c>)");
}

double Density1D::pdf(double v) const {
  if (hermite_n_ != 0) {
    return std::exp(-0.5 * v * v - kLogSqrt2Pi) * (1.0 + hermite_c_ * hermite_he(hermite_n_, v));
  }
  double s = 0.0;
  for (const auto& c : components_) s += std::exp(component_log_pdf(c, v));
  return s;
}

double Density1D::log_pdf(double v) const {
  if (hermite_n_ != 0) {
    const double g = 1.0 + hermite_c_ * hermite_he(hermite_n_, v);
    return -0.5 * v * v - kLogSqrt2Pi + (g > 0.0 ? std::log(g) : -INFINITY);
  }
  if (components_.size() == 1) return component_log_pdf(components_[0], v);
  double best = -INFINITY;
  double terms[8];
  const std::size_t m = std::min<std::size_t>(components_.size(), 8);
  if (components_.size() > 8) {
    double acc = -INFINITY;
    for (const auto& c : components_) acc = log_add(acc, component_log_pdf(c, v));
    return acc;
  }
  for (std::size_t k = 0; k < m; ++k) {
    terms[k] = component_log_pdf(components_[k], v);
    best = std::max(best, terms[k]);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) s += std::exp(terms[k] - best);
  return best + std::log(s);
}

std::complex<double> Density1D::characteristic(double xi) const {
  std::complex<double> s = 0.0;
  for (const auto& c : components_) {
    s += c.weight * std::exp(std::complex<double>(-0.5 * c.variance * xi * xi, xi * c.mean));
  }
  if (hermite_n_ != 0) {
    // int e^{i xi v} He_n(v) gamma(v) dv = (i xi)^n e^{-xi^2/2}
    s += hermite_c_ * std::pow(std::complex<double>(0.0, xi), hermite_n_) * std::exp(-0.5 * xi * xi);
  }
  return s;
}

double Density1D::moment(int k) const {
  require(k >= 0 && k <= 4, "moment: k must lie in 0..4");
  double s = 0.0;
  for (const auto& c : components_) {
    const double m = c.mean, v = c.variance;
    const double raw[5] = {1.0, m, m * m + v, m * m * m + 3.0 * m * v, m * m * m * m + 6.0 * m * m * v + 3.0 * v * v};
    s += c.weight * raw[k];
  }
  if (hermite_n_ != 0 && hermite_n_ <= k) {
    // E_gamma[v^k He_n] = k!/(k-n)! E_gamma[v^{k-n}]
    const int r = k - hermite_n_;
    const double gauss_moment = r == 0 ? 1.0 : r == 2 ? 1.0 : r == 4 ? 3.0 : 0.0;
    s += hermite_c_ * factorial(k) / factorial(r) * gauss_moment;
  }
  return s;
}

double Density1D::sup_bound() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight / std::sqrt(2.0 * std::numbers::pi * c.variance);
  if (hermite_n_ != 0) {
    double m = 0.0;
    for (int k = 0; k <= 20000; ++k) m = std::max(m, pdf(-12.0 + 24.0 * k / 20000.0));
    s = 1.01 * m;
  }
  return s;
}

double Density1D::sample(Rng& rng) const {
  if (quantiles_) {
    const auto& q = *quantiles_;
    const double u = rng.uniform() * static_cast<double>(q.size() - 1);
    const auto k = static_cast<std::size_t>(u);
    return q[k] + (u - static_cast<double>(k)) * (q[k + 1] - q[k]);
  }
  const GaussianComponent* pick = &components_.back();
  if (components_.size() > 1) {
    double u = rng.uniform();
    for (const auto& c : components_) {
      if (u < c.weight) {
        pick = &c;
        break;
      }
      u -= c.weight;
    }
  }
  return pick->mean + std::sqrt(pick->variance) * rng.normal();
}

bool Density1D::is_standard_gaussian() const {
  return hermite_c_ == 0.0 && components_.size() == 1 && components_[0].mean == 0.0 &&
         components_[0].variance == 1.0;
}

double sigma_stat(const Density1D& f) {
  double spread = 1.0;
  for (const auto& c : f.components()) spread = std::max(spread, std::abs(c.mean) + std::sqrt(c.variance));
  const double L = 40.0 * spread;
  const QuadratureRule rule = composite_gauss_legendre(16, 256, -L, L);
  const double s2 = rule.integrate([&](double v) {
    const double d = v * v - 1.0;
    return d * d * f.pdf(v);
  });
  return std::sqrt(s2);
}

}  // namespace kac
