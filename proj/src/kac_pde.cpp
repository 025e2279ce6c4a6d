#include "kaclab/kac_pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kaclab/error.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/special.hpp"

namespace kac::pde {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void validate(const GridSpec& s) {
  require(s.xi_max > 0.0 && s.m_xi >= 16, "GridSpec: need xi_max > 0 and m_xi >= 16");
  require(s.v_max > 0.0 && s.m_v >= 16, "GridSpec: need v_max > 0 and m_v >= 16");
  require(s.interp_points >= 2 && s.interp_points <= 8, "GridSpec: interp_points must lie in 2..8");
  require(s.theta_points >= 4, "GridSpec: theta_points must be >= 4");
}

// Trapezoid sum over the half line, using phi(-xi) = conj(phi(xi)).
double inverse_sum(const std::vector<cplx>& phi, double h, double x) {
  const cplx step = std::polar(1.0, -h * x);
  cplx z = step;
  double s = 0.5 * phi[0].real();
  const std::size_t m = phi.size();
  for (std::size_t k = 1; k < m; ++k) {
    const double term = z.real() * phi[k].real() - z.imag() * phi[k].imag();
    s += (k + 1 == m) ? 0.5 * term : term;
    z *= step;
  }
  return s * h / std::numbers::pi;
}

}  // namespace

CharacteristicGrid::CharacteristicGrid(double xi_max, int m) : phi(m), h_(xi_max / (m - 1)) {
  require(m >= 2 && xi_max > 0.0, "CharacteristicGrid: need m >= 2 and xi_max > 0");
}

CharacteristicGrid CharacteristicGrid::from_density(const Density1D& f, double xi_max, int m) {
  CharacteristicGrid g(xi_max, m);
  for (int k = 0; k < m; ++k) g.phi[k] = f.characteristic(g.xi(k));
  return g;
}

CharacteristicGrid CharacteristicGrid::from_samples(std::span<const double> v, std::span<const double> f,
                                                    double xi_max, int m) {
  require(v.size() == f.size() && v.size() >= 2, "from_samples: mismatched grid");
  CharacteristicGrid g(xi_max, m);
  const double hv = v[1] - v[0];
  for (int k = 0; k < m; ++k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double w = (j == 0 || j + 1 == v.size()) ? 0.5 : 1.0;
      s += w * f[j] * std::polar(1.0, g.xi(k) * v[j]);
    }
    g.phi[k] = s * hv;
  }
  return g;
}

cplx CharacteristicGrid::at(double x, int points) const {
  const int m = size();
  const double idx = x / h_;
  if (std::abs(idx) > (m - 1) * (1.0 + 1e-12)) throw DomainError("CharacteristicGrid::at: |xi| beyond xi_max");
  int base = static_cast<int>(std::floor(idx)) - (points / 2 - 1);
  base = std::clamp(base, -(m - 1), m - points);
  cplx s = 0.0;
  for (int j = 0; j < points; ++j) {
    double w = 1.0;
    for (int l = 0; l < points; ++l) {
      if (l != j) w *= (idx - (base + l)) / static_cast<double>(j - l);
    }
    s += w * node(base + j);
  }
  return s;
}

double inverse_at(const CharacteristicGrid& phi, double x) { return inverse_sum(phi.phi, phi.step(), x); }

double VelocityDensity::moment(int k) const {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double w = (j == 0 || j + 1 == v.size()) ? 0.5 : 1.0;
    s += w * f[j] * std::pow(v[j], k);
  }
  return s * step();
}

double VelocityDensity::at(double x) const { return inverse_at(phi, x); }

double VelocityDensity::mass(double a, double b) const {
  const QuadratureRule rule = gauss_legendre(8, a, b);
  return rule.integrate([&](double x) { return at(x); });
}

VelocityDensity to_velocity(const CharacteristicGrid& phi, const GridSpec& spec, double t, Exec exec) {
  VelocityDensity out;
  out.t = t;
  out.phi = phi;
  out.v.resize(spec.m_v);
  out.f.resize(spec.m_v);
  const double hv = 2.0 * spec.v_max / (spec.m_v - 1);
  for (int j = 0; j < spec.m_v; ++j) out.v[j] = -spec.v_max + hv * j;
  for_each_index_static(exec, out.v.size(), [&](std::size_t j) { out.f[j] = inverse_sum(phi.phi, phi.step(), out.v[j]); });
  for (std::size_t j = 0; j < out.f.size(); ++j) {
    const double x = out.f[j];
    if (!std::isfinite(x) || x < -1e-6) {
      std::ostringstream os;
      os.precision(17);
      os << "recovered density invalid at t = " << t << ", v = " << out.v[j] << ": f = " << x;
      throw NumericError(os.str());
    }
    if (x < 0.0) out.f[j] = 0.0;
  }
  return out;
}

FourierSolver::FourierSolver(const ScatteringDensity& rho, const GridSpec& spec) : spec_(spec) {
  validate(spec);
  h_ = spec.xi_max / (spec.m_xi - 1);
  const AngleQuadrature quad = rho.quadrature(spec.theta_points);
  weight_ = quad.weight;
  for (double w : weight_) weight_sum_ += w;
  const std::size_t q = quad.theta.size();
  cos_.resize(spec.m_xi * q);
  sin_.resize(spec.m_xi * q);
  for (int k = 0; k < spec.m_xi; ++k) {
    const double xi = h_ * k;
    for (std::size_t j = 0; j < q; ++j) {
      cos_[k * q + j] = stencil(xi * std::cos(quad.theta[j]));
      sin_[k * q + j] = stencil(xi * std::sin(quad.theta[j]));
    }
  }
}

FourierSolver::Stencil FourierSolver::stencil(double x) const {
  const int m = spec_.m_xi;
  const int p = spec_.interp_points;
  const double idx = std::clamp(x / h_, -(m - 1.0), m - 1.0);
  Stencil s;
  s.count = p;
  s.base = std::clamp(static_cast<int>(std::floor(idx)) - (p / 2 - 1), -(m - 1), m - p);
  for (int j = 0; j < p; ++j) {
    double w = 1.0;
    for (int l = 0; l < p; ++l) {
      if (l != j) w *= (idx - (s.base + l)) / static_cast<double>(j - l);
    }
    s.w[j] = w;
  }
  return s;
}

cplx FourierSolver::eval(const Stencil& s, std::span<const cplx> phi) const {
  double re = 0.0, im = 0.0;
  for (int j = 0; j < s.count; ++j) {
    const int k = s.base + j;
    if (k >= 0) {
      re += s.w[j] * phi[k].real();
      im += s.w[j] * phi[k].imag();
    } else {
      re += s.w[j] * phi[-k].real();
      im -= s.w[j] * phi[-k].imag();
    }
  }
  return {re, im};
}

void FourierSolver::rhs(std::span<const cplx> phi, std::span<cplx> out, Exec exec) const {
  require(phi.size() == static_cast<std::size_t>(spec_.m_xi) && out.size() == phi.size(), "rhs: grid size mismatch");
  const std::size_t q = weight_.size();
  for_each_index_static(exec, phi.size(), [&](std::size_t k) {
    cplx gain = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      gain += weight_[j] * eval(cos_[k * q + j], phi) * eval(sin_[k * q + j], phi);
    }
    out[k] = 2.0 * (gain - weight_sum_ * phi[k]);
  });
}

std::vector<cplx> rhs_fourier(const CharacteristicGrid& phi, const ScatteringDensity& rho, const GridSpec& spec,
                              Exec exec) {
  GridSpec s = spec;
  s.xi_max = phi.xi_max();
  s.m_xi = phi.size();
  const FourierSolver solver(rho, s);
  std::vector<cplx> out(phi.phi.size());
  solver.rhs(phi.phi, out, exec);
  return out;
}

Trajectory integrate(const CharacteristicGrid& phi0, const ScatteringDensity& rho, const GridSpec& spec,
                     const IntegrateOptions& opt) {
  require(opt.dt > 0.0, "integrate: dt must be positive");
  require(2.0 * opt.dt < 0.5, "integrate: dt too large for RK4 stability (need 2 dt < 0.5)");
  require(!opt.snapshot_times.empty(), "integrate: no snapshot times");
  require(std::is_sorted(opt.snapshot_times.begin(), opt.snapshot_times.end()) && opt.snapshot_times.front() >= 0.0,
          "integrate: snapshot times must be ascending and non-negative");
  require(phi0.size() == spec.m_xi && std::abs(phi0.xi_max() - spec.xi_max) < 1e-12 * spec.xi_max,
          "integrate: initial grid does not match GridSpec");

  const FourierSolver solver(rho, spec);
  const std::size_t m = phi0.phi.size();
  CharacteristicGrid cur = phi0;
  std::vector<cplx> k1(m), k2(m), k3(m), k4(m), tmp(m);
  Trajectory tr;
  double t = 0.0;

  auto rk4 = [&](double h) {
    auto& y = cur.phi;
    solver.rhs(y, k1, opt.exec);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    solver.rhs(tmp, k2, opt.exec);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    solver.rhs(tmp, k3, opt.exec);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    solver.rhs(tmp, k4, opt.exec);
    for (std::size_t i = 0; i < m; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  if (opt.track_entropy) {
    tr.step_times.push_back(0.0);
    tr.step_entropy.push_back(h_functional(to_velocity(cur, spec, 0.0, opt.exec)));
  }
  for (double target : opt.snapshot_times) {
    while (t < target - 1e-12) {
      const double h = std::min(opt.dt, target - t);
      rk4(h);
      t = (target - t <= h) ? target : t + h;
      if (opt.track_entropy) {
        tr.step_times.push_back(t);
        tr.step_entropy.push_back(h_functional(to_velocity(cur, spec, t, opt.exec)));
      }
    }
    tr.snapshots.push_back(to_velocity(cur, spec, target, opt.exec));
  }
  return tr;
}

Trajectory integrate(const Density1D& f0, const ScatteringDensity& rho, const GridSpec& spec,
                     const IntegrateOptions& opt) {
  require(f0.moment(4) < INFINITY, "integrate: initial density needs a finite fourth moment");
  return integrate(CharacteristicGrid::from_density(f0, spec.xi_max, spec.m_xi), rho, spec, opt);
}

double h_functional(const VelocityDensity& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.v.size(); ++j) {
    const double x = f.f[j];
    if (x <= 0.0) continue;
    const double w = (j == 0 || j + 1 == f.v.size()) ? 0.5 : 1.0;
    s += w * x * (std::log(x) + 0.5 * f.v[j] * f.v[j] + kLogSqrt2Pi);
  }
  return s * f.step();
}

double hermite_coefficient(const VelocityDensity& f, int n) {
  require(n >= 0 && n <= 12, "hermite_coefficient: n must lie in 0..12");
  double s = 0.0;
  for (std::size_t j = 0; j < f.v.size(); ++j) {
    const double w = (j == 0 || j + 1 == f.v.size()) ? 0.5 : 1.0;
    s += w * f.f[j] * hermite_he(n, f.v[j]);
  }
  return s * f.step();
}

double linear_mode_rate(const ScatteringDensity& rho, int n) {
  const AngleQuadrature quad = rho.quadrature(std::max(64, 4 * n));
  return 2.0 * quad.integrate([n](double th) {
    return 1.0 - std::pow(std::cos(th), n) - std::pow(std::sin(th), n);
  });
}

double collision_integral_direct(const Density1D& f, const ScatteringDensity& rho, double v, int w_panels,
                                 int theta_points) {
  double spread = 1.0;
  for (const auto& c : f.components()) spread = std::max(spread, std::abs(c.mean) + std::sqrt(c.variance));
  const double W = 12.0 * spread;
  const QuadratureRule wq = composite_gauss_legendre(8, w_panels, -W, W);
  const AngleQuadrature tq = rho.quadrature(theta_points);
  const double fv = f.pdf(v);
  double s = 0.0;
  for (std::size_t k = 0; k < tq.theta.size(); ++k) {
    const double c = std::cos(tq.theta[k]), sn = std::sin(tq.theta[k]);
    const double inner = wq.integrate([&](double w) { return f.pdf(v * c + w * sn) * f.pdf(-v * sn + w * c) - fv * f.pdf(w); });
    s += tq.weight[k] * inner;
  }
  return 2.0 * s;
}

Table snapshot_table(const Trajectory& tr, bool fourier) {
  Table t;
  if (fourier) {
    t.header = {"t", "xi", "re_phi", "im_phi"};
    for (const auto& s : tr.snapshots) {
      for (int k = 0; k < s.phi.size(); ++k) t.add_row({s.t, s.phi.xi(k), s.phi.phi[k].real(), s.phi.phi[k].imag()});
    }
  } else {
    t.header = {"t", "v", "f"};
    for (const auto& s : tr.snapshots) {
      for (std::size_t j = 0; j < s.v.size(); ++j) t.add_row({s.t, s.v[j], s.f[j]});
    }
  }
  return t;
}

}  // namespace kac::pde
