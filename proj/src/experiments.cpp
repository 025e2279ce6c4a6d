#include "kaclab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "kaclab/chaos.hpp"
#include "kaclab/density.hpp"
#include "kaclab/entropy.hpp"
#include "kaclab/error.hpp"
#include "kaclab/kac_pde.hpp"
#include "kaclab/kac_walk.hpp"
#include "kaclab/spectral.hpp"

#ifndef KACLAB_VERSION
#define KACLAB_VERSION "dev"
#endif

namespace kac::cli {
namespace {

std::atomic<bool> g_interrupt{false};

const std::vector<std::string> kEntropyColumns = {"N", "delta", "H", "H_stderr", "D", "D_stderr", "ratio",
                                                   "villani_bound"};

std::string fmt(double x) { return format_number(x); }

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) os << ',';
    if constexpr (std::is_floating_point_v<T>) {
      os << fmt(xs[k]);
    } else {
      os << xs[k];
    }
  }
  return os.str();
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ValidationError(what + ": '" + s + "' is not a number");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

// Shared state of one run.
struct Run {
  const ExperimentConfig& cfg;
  StreamKey key;
  ExperimentRecord rec;

  template <class T>
  void note(const std::string& k, const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      rec.manifest.emplace_back(k, fmt(v));
    } else if constexpr (std::is_convertible_v<T, std::string>) {
      rec.manifest.emplace_back(k, std::string(v));
    } else {
      rec.manifest.emplace_back(k, std::to_string(v));
    }
  }
  void check(bool ok, const std::string& what) {
    if (!ok) rec.failures.push_back(what);
  }
  bool stop() {
    if (interrupt_requested()) rec.interrupted = true;
    return rec.interrupted;
  }
};

std::vector<std::size_t> ns_or(const ExperimentConfig& c, std::vector<std::size_t> def) {
  return c.ns.empty() ? def : c.ns;
}
std::vector<double> times_or(const ExperimentConfig& c, std::vector<double> def) {
  return c.times.empty() ? def : c.times;
}
std::size_t or_default(std::size_t v, std::size_t def) { return v ? v : def; }
std::string density_or(const ExperimentConfig& c, const std::string& def) {
  return c.density.empty() ? def : c.density;
}

std::vector<double> range(double a, double b, double step) {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double x = a + step * k;
    if (x > b + 1e-9) break;
    out.push_back(x);
  }
  return out;
}

// --- individual experiments ---------------------------------------------

void gap_check(Run& run) {
  const auto ns = ns_or(run.cfg, {3, 4, 5, 6, 7, 8});
  const std::size_t points = or_default(run.cfg.samples, 100);
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  const AngleQuadrature quad = rho.quadrature(64);
  run.note("points", points);
  run.rec.table.header = {"N", "closed_form", "ratio_mean", "quadrature_residual", "points"};
  for (std::size_t n : ns) {
    if (run.stop()) break;
    require(n >= 2, "gap-check: N must be >= 2");
    const double closed = spectral::gap_value(n, rho).gap;
    const spectral::GapEigenfunction F(n);
    Rng rng(run.key, static_cast<std::uint32_t>(n));
    double sum = 0.0, worst = 0.0;
    for (std::size_t p = 0; p < points;) {
      const std::vector<double> v = chaos::sample_uniform_sphere(n, rng);
      const double f = F(v);
      if (std::abs(f) < 1e-3) continue;
      const double q = spectral::apply_Q(std::cref(F), v, quad);
      const double ratio = static_cast<double>(n) * (f - q) / f;
      sum += ratio;
      worst = std::max(worst, std::abs(ratio - closed) / closed);
      ++p;
    }
    run.rec.table.add_row({static_cast<std::int64_t>(n), closed, sum / static_cast<double>(points), worst,
                           static_cast<std::int64_t>(points)});
    run.check(worst < 1e-6, "gap-check: residual " + fmt(worst) + " at N = " + std::to_string(n));
  }
}

Ensemble1D eigen_initial_state(std::size_t n) {
  // Half the energy on one particle, the rest spread evenly with alternating signs.
  std::vector<double> v(n);
  const double half = 0.5 * static_cast<double>(n);
  v[0] = std::sqrt(half);
  const double share = std::sqrt(half / static_cast<double>(n - 1));
  for (std::size_t i = 1; i < n; ++i) v[i] = (i % 2 ? share : -share);
  return Ensemble1D::projected(std::move(v));
}

void emit_trace(Run& run, const Trace& tr) {
  run.rec.table.header = {"t", "mean", "stderr", "collisions_mean", "collisions_var"};
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    run.rec.table.add_row({tr.times[k], tr.mean[k], tr.stderr_[k], tr.collisions_mean[k], tr.collisions_var[k]});
  }
}

void eigen_decay(Run& run) {
  const std::size_t n = ns_or(run.cfg, {50}).front();
  require(n >= 3, "eigen-decay: N must be >= 3");
  const std::size_t replicas = or_default(run.cfg.replicas, 10000);
  const auto times = times_or(run.cfg, range(0.0, 4.0, 0.25));
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  const spectral::GapEigenfunction F(n);
  const Ensemble1D e0 = eigen_initial_state(n);
  const Trace tr = observable_trace(
      e0, [&F](const Ensemble1D& e) { return F(e.v); }, times, replicas, rho, run.key, run.cfg.exec);
  emit_trace(run, tr);
  const LinearFit fit = fit_exponential_decay(tr.times, tr.mean, tr.stderr_);
  const double target = spectral::gap_value(n, rho).gap;
  run.note("N", n);
  run.note("replicas", replicas);
  run.note("initial_F", F(e0.v));
  run.note("fitted_rate", fit.slope);
  run.note("fitted_rate_stderr", fit.slope_stderr);
  run.note("target_rate", target);
  run.check(std::abs(fit.slope - target) <= 0.03 * target, "eigen-decay: rate " + fmt(fit.slope) + " vs " + fmt(target));
}

void k_spectrum(Run& run) {
  const auto ns = ns_or(run.cfg, {5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20});
  constexpr int kMaxM = 6;
  run.rec.table.header = {"N", "m", "alpha_quadrature", "alpha_closed_form", "eigenpoly_residual"};
  for (std::size_t n : ns) {
    if (run.stop()) break;
    require(n >= 4, "k-spectrum: N must be >= 4");
    const auto polys = spectral::K_eigenpolynomials(n, 2 * kMaxM);
    const double root = std::sqrt(static_cast<double>(n));
    double prev = INFINITY;
    for (int m = 0; m <= kMaxM; ++m) {
      const double alpha = spectral::K_eigenvalue(m, n);
      const double closed = spectral::K_eigenvalue_closed_form(m, n);
      const auto& p = polys[2 * m];
      double residual = 0.0;
      for (int k = 0; k <= 40; ++k) {
        const double v = root * (-0.99 + 1.98 * k / 40.0);
        const double kp = spectral::K_apply(std::cref(p), v, n);
        residual = std::max(residual, std::abs(kp - alpha * p(v)));
      }
      run.rec.table.add_row({static_cast<std::int64_t>(n), static_cast<std::int64_t>(m), alpha, closed, residual});
      const double nn = static_cast<double>(n);
      if (m == 1) run.check(std::abs(alpha + 1.0 / (nn - 1.0)) <= 1e-8 && residual <= 1e-8, "k-spectrum: alpha_2 at N = " + std::to_string(n));
      if (m == 2) run.check(std::abs(alpha - 3.0 / (nn * nn - 1.0)) <= 1e-8 && residual <= 1e-8, "k-spectrum: alpha_4 at N = " + std::to_string(n));
      if (m >= 1) run.check(std::abs(alpha) < prev, "k-spectrum: |alpha| not decreasing at N = " + std::to_string(n));
      prev = std::abs(alpha);
    }
  }
}

void induction_check(Run& run) {
  const auto ns = ns_or(run.cfg, [] {
    std::vector<std::size_t> v;
    for (std::size_t n = 2; n <= 1000; ++n) v.push_back(n);
    return v;
  }());
  run.rec.table.header = {"N", "bound", "closed_form", "abs_diff", "exact_num", "exact_den"};
  for (std::size_t n : ns) {
    const double bound = spectral::induction_bound(n);
    const double closed = spectral::uniform_gap(n);
    const auto [num, den] = spectral::induction_bound_exact(n);
    const auto nn = static_cast<std::int64_t>(n);
    run.rec.table.add_row({nn, bound, closed, std::abs(bound - closed), num, den});
    run.check(std::abs(bound - closed) <= 1e-12, "induction-check: float mismatch at N = " + std::to_string(n));
    run.check(num * 2 * (nn - 1) == den * (nn + 2), "induction-check: rational mismatch at N = " + std::to_string(n));
  }
}

void chaos_marginal(Run& run) {
  const auto ns = ns_or(run.cfg, {20, 50, 100, 200});
  const Density1D f = Density1D::parse(density_or(run.cfg, "fdelta:0.25"));
  chaos::McmcOptions mc;
  mc.chains = or_default(run.cfg.chains, 32);
  mc.samples_per_chain = or_default(run.cfg.samples, 64);
  mc.exec = run.cfg.exec;
  mc.burn_in_sweeps = 50;
  run.note("density", f.name());
  run.note("chains", mc.chains);
  run.note("samples_per_chain", mc.samples_per_chain);
  run.rec.table.header = {"N", "l1_to_f", "product_gap", "acceptance", "tuples"};
  double prev = INFINITY;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (run.stop()) break;
    const std::size_t n = ns[k];
    const chaos::ConditionedProduct cp(f, n);
    const chaos::SampleSet s = chaos::sample_conditioned(cp, mc, run.key.sub(static_cast<std::uint32_t>(n)));
    const auto h1 = chaos::empirical_marginal(s, 1, 80, -6.0, 6.0);
    const double l1 = chaos::l1_to_density(h1.as_1d(), [&](double x) { return f.pdf(x); });
    const auto g1 = chaos::empirical_marginal(s, 1, 16, -4.0, 4.0);
    const auto g2 = chaos::empirical_marginal(s, 2, 16, -4.0, 4.0);
    const double gap = chaos::product_gap(g2, g1);
    const Estimate acc = mean_stderr(s.acceptance);
    run.rec.table.add_row({static_cast<std::int64_t>(n), l1, gap, acc.value, static_cast<std::int64_t>(h1.total)});
    if (n == 100) run.check(l1 < 0.05, "chaos-marginal: L1 " + fmt(l1) + " at N = 100");
    run.check(l1 < prev, "chaos-marginal: L1 not decreasing at N = " + std::to_string(n));
    prev = l1;
  }
}

void zn_limit(Run& run) {
  const auto ns = ns_or(run.cfg, {100, 500});
  const Density1D f = Density1D::parse(density_or(run.cfg, "fdelta:0.25"));
  const std::size_t samples = or_default(run.cfg.samples, 1000000);
  const double target = std::sqrt(2.0) / sigma_stat(f);
  run.note("density", f.name());
  run.note("samples", samples);
  run.note("target", target);
  run.rec.table.header = {"N", "logZ", "stderr", "Z", "Z_stderr", "target"};
  for (std::size_t n : ns) {
    if (run.stop()) break;
    const chaos::ZEstimate z = chaos::z_n_estimate(f, n, samples, run.key.sub(static_cast<std::uint32_t>(n)),
                                                   chaos::ZMethod::conditional, run.cfg.exec);
    run.rec.table.add_row({static_cast<std::int64_t>(n), z.log_z, z.log_z_stderr, z.z(), z.z_stderr(), target});
    run.check(std::abs(z.z() - target) <= 2.0 * z.z_stderr() || (z.exact && std::abs(z.z() - target) < 1e-12),
              "zn-limit: Z = " + fmt(z.z()) + " +- " + fmt(z.z_stderr()) + " vs " + fmt(target) + " at N = " + std::to_string(n));
    run.check(z.z_stderr() < 0.05 * z.z(), "zn-limit: stderr above 5% at N = " + std::to_string(n));
  }
}

void pde_vs_particles(Run& run) {
  const std::size_t n = ns_or(run.cfg, {10000}).front();
  const std::size_t replicas = or_default(run.cfg.replicas, 32);
  const auto times = times_or(run.cfg, {0.5, 1.0, 2.0});
  const Density1D f0 = Density1D::parse(density_or(run.cfg, "bimodal:0.8"));
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  constexpr std::size_t kBins = 64;
  constexpr double kLo = -4.0, kHi = 4.0;

  pde::IntegrateOptions opt;
  opt.dt = run.cfg.dt;
  opt.snapshot_times = times;
  opt.exec = run.cfg.exec;
  const pde::Trajectory tr = pde::integrate(f0, rho, pde::GridSpec{}, opt);

  const std::size_t nt = times.size();
  std::vector<double> snaps(replicas * nt * n);
  for_each_index(run.cfg.exec, replicas, [&](std::size_t r) {
    Rng rng(run.key, static_cast<std::uint32_t>(r));
    std::vector<double> v(n);
    for (double& x : v) x = f0.sample(rng);
    Ensemble1D e = Ensemble1D::projected(std::move(v));
    JumpClock clock;
    for (std::size_t k = 0; k < nt; ++k) {
      evolve(e, clock, times[k] - clock.t, rho, rng);
      std::copy(e.v.begin(), e.v.end(), snaps.begin() + static_cast<std::ptrdiff_t>((r * nt + k) * n));
    }
  });

  run.note("N", n);
  run.note("replicas", replicas);
  run.note("density", f0.name());
  run.note("dt", run.cfg.dt);
  run.rec.table.header = {"t", "l1", "particles", "bins"};
  for (std::size_t k = 0; k < nt; ++k) {
    Histogram h;
    h.lo = kLo;
    h.hi = kHi;
    h.counts.assign(kBins, 0.0);
    for (std::size_t r = 0; r < replicas; ++r) {
      for (std::size_t i = 0; i < n; ++i) h.add(snaps[(r * nt + k) * n + i]);
    }
    const auto& snap = tr.snapshots[k];
    const double inside = snap.mass(kLo, kHi);
    const double l1 = l1_distance(h, [&](double a, double b) { return snap.mass(a, b); }, std::max(0.0, 1.0 - inside));
    run.rec.table.add_row({times[k], l1, static_cast<std::int64_t>(h.total), static_cast<std::int64_t>(kBins)});
    run.check(l1 < 0.03, "pde-vs-particles: L1 " + fmt(l1) + " at t = " + fmt(times[k]));
  }
}

void hermite_decay(Run& run) {
  const auto times = times_or(run.cfg, range(0.0, 4.0, 0.25));
  const Density1D f0 = Density1D::parse(density_or(run.cfg, "hermite:4:" + fmt(0.1 / 24.0)));
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  pde::IntegrateOptions opt;
  opt.dt = run.cfg.dt;
  opt.snapshot_times = times;
  opt.exec = run.cfg.exec;
  const pde::Trajectory tr = pde::integrate(f0, rho, pde::GridSpec{}, opt);
  run.rec.table.header = {"t", "a0", "a2", "a4", "H"};
  std::vector<double> t, y;
  for (const auto& s : tr.snapshots) {
    const double a4 = pde::hermite_coefficient(s, 4);
    run.rec.table.add_row({s.t, pde::hermite_coefficient(s, 0), pde::hermite_coefficient(s, 2), a4, pde::h_functional(s)});
    if (a4 != 0.0) {
      t.push_back(s.t);
      y.push_back(std::log(std::abs(a4)));
    }
  }
  require(t.size() >= 2, "hermite-decay: need at least two snapshots with a4 != 0");
  const LinearFit fit = fit_line(t, y);
  const double target = pde::linear_mode_rate(rho, 4);
  run.note("density", f0.name());
  run.note("fitted_rate", -fit.slope);
  run.note("target_rate", target);
  run.check(std::abs(-fit.slope - target) <= 0.02 * target, "hermite-decay: rate " + fmt(-fit.slope) + " vs " + fmt(target));
}

void h_theorem(Run& run) {
  const double t_end = times_or(run.cfg, {2.0}).back();
  const std::vector<std::string> inits = run.cfg.density.empty()
                                             ? std::vector<std::string>{"bimodal:0.8", "fdelta:0.25", "hermite:4:0.05",
                                                                        "gaussian:0.5", "bimodal:0.5"}
                                             : split(run.cfg.density, ';');
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  run.rec.table.header = {"trajectory", "step", "t", "H"};
  double worst = -INFINITY;
  for (const auto& spec : inits) {
    if (run.stop()) break;
    const Density1D f0 = Density1D::parse(spec);
    pde::IntegrateOptions opt;
    opt.dt = run.cfg.dt;
    opt.snapshot_times = {t_end};
    opt.track_entropy = true;
    opt.exec = run.cfg.exec;
    const pde::Trajectory tr = pde::integrate(f0, rho, pde::GridSpec{}, opt);
    for (std::size_t k = 0; k < tr.step_times.size(); ++k) {
      run.rec.table.add_row({f0.name(), static_cast<std::int64_t>(k), tr.step_times[k], tr.step_entropy[k]});
      if (k > 0) worst = std::max(worst, tr.step_entropy[k] - tr.step_entropy[k - 1]);
    }
  }
  run.note("max_increase", worst);
  run.check(worst <= 1e-8, "h-theorem: entropy increased by " + fmt(worst) + " in one step");
}

entropy::StateOptions state_options(const ExperimentConfig& c) {
  entropy::StateOptions o;
  o.mcmc.chains = or_default(c.chains, 32);
  o.mcmc.samples_per_chain = or_default(c.samples, 256);
  o.mcmc.exec = c.exec;
  o.mcmc.burn_in_sweeps = 50;
  return o;
}

void note_state(Run& run, const entropy::StateOptions& o) {
  run.note("chains", o.mcmc.chains);
  run.note("samples_per_chain", o.mcmc.samples_per_chain);
  run.note("burn_in_sweeps", o.mcmc.burn_in_sweeps);
  run.note("z_samples", o.z_samples);
}

void villani_check(Run& run) {
  const auto ns = ns_or(run.cfg, {10, 50});
  const std::string fspec = density_or(run.cfg, "fdelta:0.25");
  const Density1D f = Density1D::parse(fspec);
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  entropy::StateOptions o = state_options(run.cfg);
  note_state(run, o);
  run.note("density", f.name());
  run.rec.table.header = kEntropyColumns;
  std::vector<entropy::EntropyReport> rows;
  for (std::size_t n : ns) {
    if (run.stop()) break;
    const double delta = fspec.rfind("fdelta:", 0) == 0 ? parse_double(fspec.substr(7), "delta") : NAN;
    rows.push_back(entropy::evaluate_state(chaos::ConditionedProduct(f, n), rho, o,
                                           run.key.sub(static_cast<std::uint32_t>(n)), delta));
    const auto& r = rows.back();
    run.note("ratio_stderr_N" + std::to_string(n), r.ratio.stderr_);
    run.check(!r.inconclusive && r.holds, "villani-check: bound fails at N = " + std::to_string(n));
  }
  run.rec.table = entropy::entropy_table(rows);
}

void fdelta_production(Run& run) {
  const std::size_t n = ns_or(run.cfg, {50}).front();
  const auto deltas = run.cfg.deltas.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.02} : run.cfg.deltas;
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  entropy::StateOptions o = state_options(run.cfg);
  note_state(run, o);
  std::vector<entropy::EntropyReport> rows;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (run.stop()) break;
    const double d = deltas[k];
    rows.push_back(entropy::evaluate_state(chaos::ConditionedProduct(Density1D::fdelta(d), n), rho, o,
                                           run.key.sub(static_cast<std::uint32_t>(k)), d));
    x.push_back(std::log(d * std::log(1.0 / d)));
    y.push_back(std::log(rows.back().d.value));
  }
  run.rec.table = entropy::entropy_table(rows);
  if (x.size() >= 2) {
    const LinearFit fit = fit_line(x, y);
    run.note("slope", fit.slope);
    run.note("slope_stderr", fit.slope_stderr);
    run.check(fit.slope >= 0.8 && fit.slope <= 1.2, "fdelta-production: slope " + fmt(fit.slope) + " outside [0.8, 1.2]");
  }
}

void einav(Run& run) {
  const auto ns = ns_or(run.cfg, {50, 100, 200, 400});
  const double beta = run.cfg.beta;
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  const entropy::StateOptions o = state_options(run.cfg);
  note_state(run, o);
  const entropy::EinavTrend trend = entropy::einav_trend(ns, beta, rho, o, run.key);
  run.rec.table.header = kEntropyColumns;
  run.rec.table.header.push_back("envelope");
  for (std::size_t k = 0; k < trend.rows.size(); ++k) {
    const auto& r = trend.rows[k];
    run.rec.table.add_row({static_cast<std::int64_t>(r.n), r.delta, r.h.value, r.h.stderr_, r.d.value, r.d.stderr_,
                           r.ratio.value, r.villani_bound, trend.envelope[k]});
  }
  const double target = 1.0 - 2.0 * beta;
  run.note("fitted_exponent", trend.exponent());
  run.note("fitted_exponent_stderr", trend.fit.slope_stderr);
  run.note("target_exponent", target);
  run.note("decreasing", trend.decreasing ? "true" : "false");
  run.check(trend.decreasing, "einav-trend: D/H not decreasing in N");
  run.check(std::abs(trend.exponent() - target) <= 0.15,
            "einav-trend: exponent " + fmt(trend.exponent()) + " outside " + fmt(target) + " +- 0.15");
  run.check(trend.villani_all, "einav-trend: Villani bound not confirmed for every N");
}

void gap3d_decay(Run& run) {
  const std::size_t n = ns_or(run.cfg, {20}).front();
  const std::size_t replicas = or_default(run.cfg.replicas, 40000);
  const auto times = times_or(run.cfg, range(0.0, 3.0, 0.25));
  const AngularKernel3D b = parse_kernel3d(run.cfg.kernel);
  const spectral::Gap3DReport gap = spectral::gap_3d(n, b);

  std::vector<Vec3> v(n);
  const double hot = std::sqrt(0.5 * static_cast<double>(n));
  v[0] = {hot, 0.0, 0.0};
  // Distinct velocities: tied pairs are resampled by the step, which would
  // speed up the first collisions.
  for (std::size_t i = 1; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = {-hot / static_cast<double>(n - 1), 0.6 * std::cos(a), 0.6 * std::sin(a)};
  }
  const Ensemble3D e0 = Ensemble3D::projected(std::move(v));
  auto phi = [](const Ensemble3D& e) {
    double s = 0.0;
    for (const auto& u : e.v) s += (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]) * u[0];
    return s;
  };

  // Conservation along a single long trajectory.
  double max_energy = 0.0, max_momentum = 0.0;
  {
    Ensemble3D e = e0;
    Rng rng(run.key.sub(7), 0);
    for (int step = 0; step < 100000; ++step) {
      const double e_before = e.energy();
      const Vec3 p_before = e.momentum();
      kac_step_3d(e, b, rng);
      const Vec3 p_after = e.momentum();
      max_energy = std::max(max_energy, std::abs(e.energy() - e_before) / e_before);
      for (int a = 0; a < 3; ++a) max_momentum = std::max(max_momentum, std::abs(p_after[a] - p_before[a]));
    }
  }

  const Trace tr = observable_trace(e0, phi, times, replicas, b, run.key, run.cfg.exec);
  emit_trace(run, tr);
  const LinearFit fit = fit_exponential_decay(tr.times, tr.mean, tr.stderr_);
  run.note("N", n);
  run.note("kernel", b.name());
  run.note("replicas", replicas);
  run.note("B1", gap.b1);
  run.note("B2", gap.b2);
  run.note("delta2", gap.delta2);
  run.note("case", gap.which == spectral::Gap3DCase::b2_dominant ? "b2_dominant"
                   : gap.which == spectral::Gap3DCase::min_rule  ? "min_rule"
                                                                  : "not_verified");
  run.note("eigenspace", gap.eigenspace);
  run.note("target_rate", gap.candidate_b2);
  run.note("fitted_rate", fit.slope);
  run.note("fitted_rate_stderr", fit.slope_stderr);
  run.note("max_step_energy_error", max_energy);
  run.note("max_step_momentum_error", max_momentum);
  run.check(max_energy <= 1e-12 && max_momentum <= 1e-12, "gap3d-decay: conservation violated");
  run.check(std::abs(fit.slope - gap.candidate_b2) <= 0.05 * gap.candidate_b2,
            "gap3d-decay: rate " + fmt(fit.slope) + " vs " + fmt(gap.candidate_b2));
}

void entropy_extensivity(Run& run) {
  const auto ns = ns_or(run.cfg, {200});
  const Density1D f = Density1D::parse(density_or(run.cfg, "fdelta:0.25"));
  const ScatteringDensity rho = parse_kernel(run.cfg.kernel);
  entropy::StateOptions o = state_options(run.cfg);
  if (!run.cfg.samples) o.mcmc.samples_per_chain = 2048;
  note_state(run, o);
  auto log_gamma = [](double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi); };
  const double target =
      entropy::relative_entropy_density([&](double x) { return f.log_pdf(x); }, log_gamma, -60.0, 60.0).value;
  run.note("density", f.name());
  run.note("target", target);
  run.rec.table.header = {"N", "H", "H_stderr", "H_per_particle", "target", "rel_error"};
  for (std::size_t n : ns) {
    if (run.stop()) break;
    const chaos::ConditionedProduct cp(f, n);
    const StreamKey key = run.key.sub(static_cast<std::uint32_t>(n));
    const chaos::ZEstimate z = chaos::z_n_estimate(f, n, o.z_samples, key.sub(1), chaos::ZMethod::conditional, o.mcmc.exec);
    const chaos::SampleSet s = chaos::sample_conditioned(cp, o.mcmc, key.sub(2));
    const Estimate h = entropy::entropy_sphere_conditioned(cp, s, z);
    const double nn = static_cast<double>(n);
    const double rel = std::abs(h.value / nn - target) / target;
    run.rec.table.add_row({static_cast<std::int64_t>(n), h.value, h.stderr_, h.value / nn, target, rel});
    run.check(rel <= 0.05, "entropy-extensivity: H/N off by " + fmt(rel) + " at N = " + std::to_string(n));
  }
}

using Runner = void (*)(Run&);

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = [] {
    std::vector<Entry> e = {
        {{"gap-check", 0, "N(I-Q_N)F / F at random sphere points vs the closed-form gap", {"N", "closed_form", "ratio_mean", "quadrature_residual", "points"}}, gap_check},
        {{"eigen-decay", 0, "replica mean of F(V_t) and its fitted exponential rate", {"t", "mean", "stderr", "collisions_mean", "collisions_var"}}, eigen_decay},
        {{"k-spectrum", 0, "K-operator eigenvalues by quadrature and closed form, eigenpolynomial residuals", {"N", "m", "alpha_quadrature", "alpha_closed_form", "eigenpoly_residual"}}, k_spectrum},
        {{"induction-check", 0, "telescoped induction bound vs (1/2)(N+2)/(N-1)", {"N", "bound", "closed_form", "abs_diff", "exact_num", "exact_den"}}, induction_check},
        {{"chaos-marginal", 0, "conditioned-product 1-marginal vs f, and 2-marginal factorization gap", {"N", "l1_to_f", "product_gap", "acceptance", "tuples"}}, chaos_marginal},
        {{"zn-limit", 0, "Z_N(f, sqrt N) estimates vs sqrt(2)/Sigma", {"N", "logZ", "stderr", "Z", "Z_stderr", "target"}}, zn_limit},
        {{"pde-vs-particles", 0, "particle 1-marginal vs the Fourier PDE solution (L1 over bins)", {"t", "l1", "particles", "bins"}}, pde_vs_particles},
        {{"hermite-decay", 0, "Hermite coefficients along the PDE flow; fitted a4 decay rate", {"t", "a0", "a2", "a4", "H"}}, hermite_decay},
        {{"h-theorem", 0, "relative entropy after every RK4 step for several initial densities", {"trajectory", "step", "t", "H"}}, h_theorem},
        {{"villani-check", 0, "entropy, production and D/H vs 2/(N-1) for conditioned products", kEntropyColumns}, villani_check},
        {{"fdelta-production", 0, "entropy production of conditioned f_delta states across delta", kEntropyColumns}, fdelta_production},
        {{"einav-trend", 0, "D/H for f_{delta_N} states against the envelope log N / N^{1-2 beta}", [] { auto c = kEntropyColumns; c.push_back("envelope"); return c; }()}, einav},
        {{"gap3d-decay", 0, "3D collisions: conservation and decay of sum |v|^2 v^1", {"t", "mean", "stderr", "collisions_mean", "collisions_var"}}, gap3d_decay},
        {{"entropy-extensivity", 0, "H(F_N | sigma)/N vs H(f | gamma)", {"N", "H", "H_stderr", "H_per_particle", "target", "rel_error"}}, entropy_extensivity},
    };
    for (std::size_t k = 0; k < e.size(); ++k) e[k].info.id = static_cast<std::uint32_t>(k + 1);
    return e;
  }();
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ExperimentInfo& experiment_info(const std::string& name) {
  for (const auto& e : experiments()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : experiments()) known += (known.empty() ? "" : ", ") + e.name;
  throw ValidationError("unknown experiment '" + name + "' (known: " + known + ")");
}

ExperimentRecord run_experiment(const ExperimentConfig& config) {
  const ExperimentInfo& info = experiment_info(config.experiment);
  if (!config.seed) throw ValidationError("a master seed is required (--seed)");
  require(config.dt > 0.0, "dt must be positive");
  const Entry* entry = nullptr;
  for (const auto& e : registry()) {
    if (e.info.name == info.name) entry = &e;
  }
  Run run{config, StreamKey{*config.seed, info.id}, {}};
  run.rec.name = config.name.empty() ? info.name : config.name;
  run.rec.table.header = info.columns;
  run.note("experiment", info.name);
  run.note("seed", std::to_string(*config.seed));
  run.note("version", std::string(KACLAB_VERSION));
  run.note("N", join(config.ns));
  run.note("replicas", config.replicas);
  run.note("times", join(config.times));
  run.note("kernel", config.kernel);
  run.note("density", config.density);
  run.note("deltas", join(config.deltas));
  run.note("beta", config.beta);
  run.note("samples", config.samples);
  run.note("chains", config.chains);
  run.note("dt", config.dt);
  run.note("exec", config.exec == Exec::parallel ? "parallel" : "serial");
  const auto start = std::chrono::steady_clock::now();
  entry->run(run);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.note("wall_time_s", wall);
  run.note("interrupted", run.rec.interrupted ? "true" : "false");
  run.note("failed_checks", run.rec.failures.size());
  return std::move(run.rec);
}

void emit(const ExperimentRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_csv(dir / (record.name + ".csv"), record.table);
  write_manifest(dir / (record.name + ".manifest.txt"), record.manifest);
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  auto to_size = [&](const std::string& x) {
    const double d = parse_double(x, "N list");
    if (d < 0 || d != std::floor(d)) throw ValidationError("N list: '" + x + "' is not a non-negative integer");
    return static_cast<std::size_t>(d);
  };
  for (const auto& part : split(s, ',')) {
    const auto dots = part.find("..");
    if (dots != std::string::npos) {
      const std::size_t a = to_size(part.substr(0, dots)), b = to_size(part.substr(dots + 2));
      if (b < a) throw ValidationError("N list: empty range '" + part + "'");
      for (std::size_t n = a; n <= b; ++n) out.push_back(n);
    } else {
      out.push_back(to_size(part));
    }
  }
  if (out.empty()) throw ValidationError("N list is empty");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  const auto colon = split(s, ':');
  if (colon.size() == 3) {
    const double a = parse_double(colon[0], "range"), b = parse_double(colon[1], "range"), h = parse_double(colon[2], "range");
    if (!(h > 0.0) || b < a) throw ValidationError("range '" + s + "' must be start:stop:step with step > 0");
    return range(a, b, h);
  }
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part, "list"));
  if (out.empty()) throw ValidationError("list is empty");
  return out;
}

ScatteringDensity parse_kernel(const std::string& spec) {
  if (spec.empty() || spec == "uniform") return ScatteringDensity::uniform();
  if (spec == "cos2") return ScatteringDensity::cos_squared();
  if (spec == "one-plus-cos") return ScatteringDensity::one_plus_cos();
  const auto parts = split(spec, ':');
  if (parts[0] == "bump" && parts.size() == 3) {
    return ScatteringDensity::bump(parse_double(parts[1], "bump center"), parse_double(parts[2], "bump width"));
  }
  if (parts[0] == "table" && parts.size() >= 2) {
    const std::filesystem::path path = spec.substr(6);
    const Table t = read_csv(path);
    if (t.header.size() != 2) throw ValidationError("kernel table " + path.string() + " must have two columns (theta, rho)");
    std::vector<double> th, val;
    for (const auto& row : t.rows) {
      auto num = [&](const Cell& c) -> double {
        if (const auto* d = std::get_if<double>(&c)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
        throw ValidationError("kernel table " + path.string() + ": non-numeric cell");
      };
      th.push_back(num(row[0]));
      val.push_back(num(row[1]));
    }
    return ScatteringDensity::from_table(std::move(th), std::move(val), true);
  }
  throw ValidationError("unknown kernel '" + spec +
                        "' (expected uniform, cos2, one-plus-cos, bump:<center>:<width> or table:<path>)");
}

AngularKernel3D parse_kernel3d(const std::string& spec) {
  if (spec.empty() || spec == "uniform") return AngularKernel3D::uniform();
  const auto parts = split(spec, ':');
  if (parts[0] == "linear" && parts.size() == 2) return AngularKernel3D::linear(parse_double(parts[1], "linear b"));
  if (parts[0] == "power" && parts.size() == 2) return AngularKernel3D::power(parse_double(parts[1], "power a"));
  throw ValidationError("unknown 3D kernel '" + spec + "' (expected uniform, linear:<b> or power:<a>)");
}

void request_interrupt() { g_interrupt.store(true); }
bool interrupt_requested() { return g_interrupt.load(); }

}  // namespace kac::cli
