#include "kaclab/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "kaclab/error.hpp"
#include "kaclab/kac_walk.hpp"
#include "kaclab/quadrature.hpp"

namespace kac::entropy {
namespace {

Estimate between_chains(std::span<const double> chain_means) {
  return mean_stderr(chain_means);
}

// (1 - e^{-x}) x with x = log F(v) - log F(Rv); zero at x = 0, positive otherwise.
double dirichlet_term(double x) { return -std::expm1(-x) * x; }

}  // namespace

RelativeEntropy relative_entropy_density(const std::function<double(double)>& log_f,
                                         const std::function<double(double)>& log_ref, double lo, double hi,
                                         int panels) {
  require(hi > lo, "relative_entropy_density: empty range");
  const QuadratureRule rule = composite_gauss_legendre(16, panels, lo, hi);
  RelativeEntropy out;
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double lf = log_f(rule.nodes[k]);
    if (std::isinf(lf) && lf < 0.0) continue;
    const double lr = log_ref(rule.nodes[k]);
    if (std::isinf(lr) && lr < 0.0) {
      out.infinite = true;
      continue;
    }
    s += rule.weights[k] * std::exp(lf) * (lf - lr);
  }
  out.value = out.infinite ? INFINITY : s;
  return out;
}

Estimate entropy_sphere_conditioned(const chaos::ConditionedProduct& cp, const chaos::SampleSet& samples,
                                    const chaos::ZEstimate& z) {
  require(samples.n == cp.size() && samples.count() > 0, "entropy_sphere_conditioned: sample set mismatch");
  require(samples.chains >= 2, "entropy_sphere_conditioned: need at least two chains for an error bar");
  std::vector<double> chain_means(samples.chains);
  for (std::size_t c = 0; c < samples.chains; ++c) {
    double acc = 0.0;
    for (std::size_t s = 0; s < samples.per_chain; ++s) {
      for (double x : samples.sample(c, s)) acc += cp.log_ratio(x);
    }
    chain_means[c] = acc / static_cast<double>(samples.per_chain);
  }
  const Estimate e = between_chains(chain_means);
  return {e.value - z.log_z, std::hypot(e.stderr_, z.log_z_stderr)};
}

Production entropy_production(const chaos::ConditionedProduct& cp, const ScatteringDensity& rho,
                              const chaos::SampleSet& samples, StreamKey key, std::size_t pairs, Exec exec) {
  require(samples.n == cp.size() && samples.chains >= 2, "entropy_production: sample set mismatch");
  const std::size_t n = samples.n;
  if (pairs == 0) pairs = n;
  std::vector<double> chain_means(samples.chains);
  std::vector<std::size_t> rejected(samples.chains, 0);
  for_each_index(exec, samples.chains, [&](std::size_t c) {
    Rng rng(key, static_cast<std::uint32_t>(c));
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t s = 0; s < samples.per_chain; ++s) {
      const auto v = samples.sample(c, s);
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto [i, j] = sample_pair(n, rng);
        const double th = rho.sample(rng);
        const double cs = std::cos(th), sn = std::sin(th);
        const double before = cp.log_f(v[i]) + cp.log_f(v[j]);
        if (before == -INFINITY) {
          ++rejected[c];
          continue;
        }
        const double after = cp.log_f(v[i] * cs - v[j] * sn) + cp.log_f(v[i] * sn + v[j] * cs);
        const double term = after == -INFINITY ? INFINITY : dirichlet_term(before - after);
        if (!(term >= 0.0)) throw NumericError("entropy_production: negative Dirichlet integrand");
        acc += term;
        ++used;
      }
    }
    chain_means[c] = used ? 0.5 * static_cast<double>(n) * acc / static_cast<double>(used) : 0.0;
  });
  Production out;
  out.d = between_chains(chain_means);
  for (auto r : rejected) out.rejected += r;
  return out;
}

Production entropy_production(const std::function<double(std::span<const double>)>& log_f,
                              const ScatteringDensity& rho, const chaos::SampleSet& samples, StreamKey key,
                              std::size_t pairs, Exec exec) {
  require(samples.chains >= 2, "entropy_production: need at least two chains");
  const std::size_t n = samples.n;
  if (pairs == 0) pairs = n;
  std::vector<double> chain_means(samples.chains);
  std::vector<std::size_t> rejected(samples.chains, 0);
  for_each_index(exec, samples.chains, [&](std::size_t c) {
    Rng rng(key, static_cast<std::uint32_t>(c));
    std::vector<double> w(n);
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t s = 0; s < samples.per_chain; ++s) {
      const auto v = samples.sample(c, s);
      const double before = log_f(v);
      if (before == -INFINITY) {
        rejected[c] += pairs;
        continue;
      }
      for (std::size_t p = 0; p < pairs; ++p) {
        std::copy(v.begin(), v.end(), w.begin());
        const auto [i, j] = sample_pair(n, rng);
        apply_rotation(w, i, j, rho.sample(rng));
        const double after = log_f(w);
        const double term = after == -INFINITY ? INFINITY : dirichlet_term(before - after);
        if (!(term >= 0.0)) throw NumericError("entropy_production: negative Dirichlet integrand");
        acc += term;
        ++used;
      }
    }
    chain_means[c] = used ? 0.5 * static_cast<double>(n) * acc / static_cast<double>(used) : 0.0;
  });
  Production out;
  out.d = between_chains(chain_means);
  for (auto r : rejected) out.rejected += r;
  return out;
}

EntropyReport villani_ratio_check(std::size_t n, Estimate h, Estimate d) {
  require(n >= 2, "villani_ratio_check: need N >= 2");
  EntropyReport r;
  r.n = n;
  r.h = h;
  r.d = d;
  r.villani_bound = 2.0 / (static_cast<double>(n) - 1.0);
  // Below 1e-12 the estimate is rounding noise in log Z.
  if (!(h.value > 2.0 * h.stderr_) || h.value <= 1e-12) {
    r.inconclusive = true;
    r.ratio = {NAN, NAN};
    return r;
  }
  const double ratio = d.value / h.value;
  const double rel = std::hypot(d.value != 0.0 ? d.stderr_ / d.value : 0.0, h.stderr_ / h.value);
  r.ratio = {ratio, std::abs(ratio) * rel};
  r.margin_sigma = r.ratio.stderr_ > 0.0 ? (ratio - r.villani_bound) / r.ratio.stderr_ : INFINITY;
  r.holds = ratio >= r.villani_bound - 3.0 * r.ratio.stderr_;
  return r;
}

EntropyReport evaluate_state(const chaos::ConditionedProduct& cp, const ScatteringDensity& rho,
                             const StateOptions& opt, StreamKey key, double delta) {
  const chaos::ZEstimate z = chaos::z_n_estimate(cp.base(), cp.size(), opt.z_samples, key.sub(1),
                                                 chaos::ZMethod::conditional, opt.mcmc.exec);
  const chaos::SampleSet samples = chaos::sample_conditioned(cp, opt.mcmc, key.sub(2));
  const Estimate h = entropy_sphere_conditioned(cp, samples, z);
  const Production d = entropy_production(cp, rho, samples, key.sub(3), opt.pairs_per_sample, opt.mcmc.exec);
  EntropyReport r = villani_ratio_check(cp.size(), h, d.d);
  r.delta = delta;
  return r;
}

EinavTrend einav_trend(std::span<const std::size_t> ns, double beta, const ScatteringDensity& rho,
                       const StateOptions& opt, StreamKey key) {
  require(ns.size() >= 2, "einav_trend: need at least two values of N");
  require(beta > 0.0 && beta < 1.0 / 6.0, "einav_trend: beta must lie in (0, 1/6)");
  EinavTrend out;
  out.beta = beta;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::size_t n = ns[k];
    const double delta = chaos::default_delta(n, beta);
    const chaos::ConditionedProduct cp(Density1D::fdelta(delta), n);
    out.rows.push_back(evaluate_state(cp, rho, opt, key.sub(static_cast<std::uint32_t>(100 + k)), delta));
    const double nn = static_cast<double>(n);
    out.envelope.push_back(std::log(nn) / std::pow(nn, 1.0 - 2.0 * beta));
    const auto& r = out.rows.back();
    if (!r.inconclusive && r.ratio.value > 0.0) {
      x.push_back(std::log(nn));
      y.push_back(std::log(r.ratio.value / std::log(nn)));
    }
  }
  out.decreasing = true;
  out.villani_all = true;
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    if (out.rows[k].inconclusive || !out.rows[k].holds) out.villani_all = false;
    if (k > 0 && !(out.rows[k].ratio.value < out.rows[k - 1].ratio.value)) out.decreasing = false;
  }
  if (x.size() >= 2) out.fit = fit_line(x, y);
  return out;
}

Table entropy_table(std::span<const EntropyReport> rows) {
  Table t;
  t.header = {"N", "delta", "H", "H_stderr", "D", "D_stderr", "ratio", "villani_bound"};
  for (const auto& r : rows) {
    t.add_row({static_cast<std::int64_t>(r.n), r.delta, r.h.value, r.h.stderr_, r.d.value, r.d.stderr_,
               r.ratio.value, r.villani_bound});
  }
  return t;
}

}  // namespace kac::entropy
