#include "kaclab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kaclab/error.hpp"
#include "kaclab/kac_walk.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/special.hpp"

namespace kac::chaos {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
// Monte Carlo loops are cut into this many blocks, each with its own stream,
// independent of the thread count.
constexpr std::size_t kBlocks = 256;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
};

// F(y) = f(sqrt y) + f(-sqrt y).
double fold(const Density1D& f, double y) {
  const double r = std::sqrt(std::max(y, 0.0));
  return f.pdf(r) + f.pdf(-r);
}

double pair_square_density(const Density1D& f, double s, const QuadratureRule& cheb) {
  if (s <= 0.0) return 0.0;
  return 0.25 * cheb.integrate([&](double t) { return fold(f, 0.5 * s * (1.0 + t)) * fold(f, 0.5 * s * (1.0 - t)); });
}

Moments conditional_moments(const Density1D& f, std::size_t n, double u, std::size_t samples, StreamKey key,
                            Exec exec) {
  require(n >= 3, "conditional estimator needs n >= 3");
  const QuadratureRule cheb = gauss_chebyshev(96);
  std::vector<Moments> blocks(kBlocks);
  for_each_index(exec, kBlocks, [&](std::size_t b) {
    Rng rng(key, static_cast<std::uint32_t>(b));
    const std::size_t begin = samples * b / kBlocks, end = samples * (b + 1) / kBlocks;
    Moments& m = blocks[b];
    for (std::size_t s = begin; s < end; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i + 2 < n; ++i) {
        const double x = f.sample(rng);
        sum += x * x;
      }
      const double g = pair_square_density(f, u - sum, cheb);
      m.sum += g;
      m.sum_sq += g * g;
      ++m.count;
    }
  });
  Moments total;
  for (const auto& m : blocks) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
    total.count += m.count;
  }
  return total;
}

Estimate to_estimate(const Moments& m) {
  const double nn = static_cast<double>(m.count);
  const double mean = m.sum / nn;
  const double var = m.count > 1 ? std::max(0.0, (m.sum_sq - nn * mean * mean) / (nn - 1.0)) : 0.0;
  return {mean, std::sqrt(var / nn)};
}

}  // namespace

std::vector<double> sample_uniform_sphere(std::size_t n, Rng& rng) {
  require(n >= 2, "sample_uniform_sphere: need N >= 2");
  std::vector<double> v(n);
  for (;;) {
    double s = 0.0;
    for (double& x : v) {
      x = rng.normal();
      s += x * x;
    }
    if (s > 0.0) {
      const double scale = std::sqrt(static_cast<double>(n) / s);
      for (double& x : v) x *= scale;
      return v;
    }
  }
}

double mehler_marginal_density(std::size_t n, std::span<const double> v) {
  const std::size_t k = v.size();
  require(k >= 1 && k + 2 <= n, "mehler_marginal_density: need 1 <= k <= N - 2");
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  double r2 = 0.0;
  for (double x : v) r2 += x * x;
  if (r2 >= nn) return 0.0;
  const double root = std::sqrt(nn);
  const double log_c = log_sphere_area(nn - 1.0 - kk, root) - log_sphere_area(nn - 1.0, root);
  return std::exp(log_c + 0.5 * (nn - kk - 2.0) * std::log1p(-r2 / nn));
}

double mehler_marginal_mass(std::size_t n, double a, double b) {
  const double root = std::sqrt(static_cast<double>(n));
  a = std::max(a, -root);
  b = std::min(b, root);
  if (b <= a) return 0.0;
  const QuadratureRule rule = composite_gauss_legendre(16, 4, a, b);
  return rule.integrate([&](double x) { return mehler_marginal_density(n, std::span<const double>(&x, 1)); });
}

ConditionedProduct::ConditionedProduct(Density1D f, std::size_t n) : f_(std::move(f)), n_(n) {
  require(n_ >= 2, "ConditionedProduct: need N >= 2");
  require(std::abs(f_.moment(1)) < 1e-8, "ConditionedProduct: base density must have mean 0");
  require(std::abs(f_.moment(2) - 1.0) < 1e-8, "ConditionedProduct: base density must have unit second moment");
  require(std::isfinite(f_.moment(4)), "ConditionedProduct: base density needs a finite fourth moment");
  require(std::isfinite(f_.sup_bound()), "ConditionedProduct: base density must be bounded");
}

double ConditionedProduct::log_ratio(double v) const { return f_.log_pdf(v) + 0.5 * v * v + kLogSqrt2Pi; }

SampleSet sample_conditioned(const ConditionedProduct& cp, const McmcOptions& opt, StreamKey key) {
  require(opt.chains >= 1 && opt.samples_per_chain >= 1, "sample_conditioned: need chains and samples");
  const std::size_t n = cp.size();
  require(opt.thin_sweeps >= 1, "sample_conditioned: thinning must be at least one sweep");
  const std::size_t burn = opt.burn_in_sweeps * n;
  const std::size_t thin = opt.thin_sweeps * n;
  const bool gaussian = cp.base().is_standard_gaussian();

  SampleSet out;
  out.n = n;
  out.chains = opt.chains;
  out.per_chain = opt.samples_per_chain;
  out.values.resize(out.count() * n);
  out.acceptance.resize(opt.chains);

  for_each_index(opt.exec, opt.chains, [&](std::size_t c) {
    Rng rng(key, static_cast<std::uint32_t>(c));
    std::vector<double> v(n), lf(n);
    auto project = [&] {
      double s = 0.0;
      for (double x : v) s += x * x;
      const double scale = std::sqrt(static_cast<double>(n) / s);
      for (std::size_t i = 0; i < n; ++i) {
        v[i] *= scale;
        lf[i] = cp.log_f(v[i]);
      }
    };
    for (double& x : v) x = cp.base().sample(rng);
    project();

    std::uint64_t accepted = 0, proposed = 0, since_projection = 0;
    auto step = [&] {
      const auto [i, j] = sample_pair(n, rng);
      const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
      const double cs = std::cos(th), sn = std::sin(th);
      const double vi = v[i] * cs - v[j] * sn;
      const double vj = v[i] * sn + v[j] * cs;
      ++proposed;
      bool accept = gaussian;
      double li = 0.0, lj = 0.0;
      if (!accept) {
        li = cp.log_f(vi);
        lj = cp.log_f(vj);
        const double log_ratio = li + lj - lf[i] - lf[j];
        accept = log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio);
      }
      if (accept) {
        v[i] = vi;
        v[j] = vj;
        if (!gaussian) {
          lf[i] = li;
          lf[j] = lj;
        }
        ++accepted;
      }
      if (++since_projection >= kReprojectEvery) {
        project();
        since_projection = 0;
      }
    };

    for (std::size_t k = 0; k < burn; ++k) step();
    for (std::size_t s = 0; s < opt.samples_per_chain; ++s) {
      if (s > 0) {
        for (std::size_t k = 0; k < thin; ++k) step();
      }
      std::copy(v.begin(), v.end(), out.values.begin() + static_cast<std::ptrdiff_t>((c * out.per_chain + s) * n));
    }
    out.acceptance[c] = static_cast<double>(accepted) / static_cast<double>(proposed);
  });
  return out;
}

double pair_square_density(const Density1D& f, double s, int nodes) {
  return pair_square_density(f, s, gauss_chebyshev(nodes));
}

double ZEstimate::z() const { return std::exp(log_z); }
double ZEstimate::z_stderr() const { return z() * log_z_stderr; }

ZEstimate z_n_estimate(const Density1D& f, std::size_t n, std::size_t samples, StreamKey key, ZMethod method,
                       Exec exec) {
  require(n >= 3, "z_n_estimate: need N >= 3");
  require(samples >= 2, "z_n_estimate: need at least 2 samples");
  ZEstimate z;
  z.samples = samples;
  if (f.is_standard_gaussian()) {
    z.exact = true;
    z.ess = static_cast<double>(samples);
    return z;
  }
  const double nn = static_cast<double>(n);
  if (method == ZMethod::conditional) {
    const Moments m = conditional_moments(f, n, nn, samples, key, exec);
    const Estimate p = to_estimate(m);
    if (!(p.value > 0.0)) throw NumericError("z_n_estimate: every conditional sample vanished");
    z.log_z = std::log(p.value) - log_chi2_pdf(nn, nn);
    z.log_z_stderr = p.stderr_ / p.value;
    z.ess = m.sum * m.sum / m.sum_sq;
  } else {
    // Streaming log-sum-exp: per block the running max and the sums of
    // exp(w - max) and exp(2 (w - max)).
    struct Lse {
      double max = -INFINITY, s1 = 0.0, s2 = 0.0;
      void add(double w) {
        if (w == -INFINITY) return;
        if (w > max) {
          const double r = std::exp(max - w);
          s1 *= r;
          s2 *= r * r;
          max = w;
        }
        const double e = std::exp(w - max);
        s1 += e;
        s2 += e * e;
      }
      void merge(const Lse& o) {
        if (o.max == -INFINITY) return;
        if (o.max > max) {
          const double r = std::exp(max - o.max);
          s1 = s1 * r + o.s1;
          s2 = s2 * r * r + o.s2;
          max = o.max;
        } else {
          const double r = std::exp(o.max - max);
          s1 += o.s1 * r;
          s2 += o.s2 * r * r;
        }
      }
    };
    std::vector<Lse> blocks(kBlocks);
    for_each_index(exec, kBlocks, [&](std::size_t b) {
      Rng rng(key, static_cast<std::uint32_t>(b));
      const std::size_t begin = samples * b / kBlocks, end = samples * (b + 1) / kBlocks;
      for (std::size_t s = begin; s < end; ++s) {
        const std::vector<double> v = sample_uniform_sphere(n, rng);
        double w = 0.0;
        for (double x : v) w += f.log_pdf(x) + 0.5 * x * x + kLogSqrt2Pi;
        blocks[b].add(w);
      }
    });
    Lse total;
    for (const auto& b : blocks) total.merge(b);
    if (total.max == -INFINITY) throw NumericError("z_n_estimate: every sphere sample has zero weight");
    const double m = static_cast<double>(samples);
    const double mean = total.s1 / m;  // relative to exp(max)
    const double var = std::max(0.0, (total.s2 / m - mean * mean) * m / (m - 1.0));
    z.log_z = total.max + std::log(mean);
    z.log_z_stderr = std::sqrt(var / m) / mean;
    z.ess = total.s1 * total.s1 / total.s2;
  }
  z.low_ess = z.ess < 100.0;
  return z;
}

Estimate sum_square_density(const Density1D& f, std::size_t n, double u, std::size_t samples, StreamKey key,
                            Exec exec) {
  require(n >= 1, "sum_square_density: need n >= 1");
  require(u > 0.0, "sum_square_density: need u > 0");
  if (n == 1) return {fold(f, u) / (2.0 * std::sqrt(u)), 0.0};
  if (n == 2) return {pair_square_density(f, u, 96), 0.0};
  return to_estimate(conditional_moments(f, n, u, samples, key, exec));
}

double default_delta(std::size_t n, double beta) {
  require(beta > 0.0 && beta < 1.0 / 6.0, "default_delta: beta must lie in (0, 1/6)");
  return std::pow(static_cast<double>(n), -1.0 / (1.0 + 2.5 * beta));
}

ProfileReport z_n_profile(const Density1D& f, std::size_t n, std::size_t j, double u, std::size_t samples,
                          StreamKey key, Exec exec) {
  if (!(u > 0.0)) throw ValidationError("z_n_profile: u must be positive");
  require(j + 3 <= n, "z_n_profile: need N - j >= 3");
  ProfileReport r;
  r.n_eff = n - j;
  r.u = u;
  const double m = static_cast<double>(r.n_eff);
  const double sigma = sigma_stat(f);
  r.density_mc = sum_square_density(f, r.n_eff, u, samples, key, exec);
  const double d = u - m;
  r.density_profile = std::exp(-d * d / (2.0 * m * sigma * sigma)) / std::sqrt(2.0 * std::numbers::pi * m * sigma * sigma);
  // p(u) = Z(f, sqrt u) |S^{m-1}(sqrt u)| / (2 sqrt u).
  const double log_factor = std::log(2.0) + 0.5 * std::log(u) - log_sphere_area(m - 1.0, std::sqrt(u));
  r.log_z_mc = std::log(r.density_mc.value) + log_factor;
  r.log_z_profile = std::log(r.density_profile) + log_factor;
  r.relative_deviation = (r.density_mc.value - r.density_profile) / r.density_profile;
  r.z_score = r.density_mc.stderr_ > 0.0 ? (r.density_mc.value - r.density_profile) / r.density_mc.stderr_ : 0.0;
  return r;
}

Histogram MarginalHistogram::as_1d() const {
  require(k == 1, "as_1d: histogram is not one-dimensional");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts = counts;
  h.total = total;
  return h;
}

MarginalHistogram empirical_marginal(std::span<const double> samples, std::size_t n, int k, std::size_t bins,
                                     double lo, double hi) {
  require(k >= 1 && k <= 3, "empirical_marginal: k must lie in 1..3");
  require(n >= static_cast<std::size_t>(k) && bins >= 1 && hi > lo, "empirical_marginal: bad shape");
  require(!samples.empty() && samples.size() % n == 0, "empirical_marginal: empty or ragged sample set");
  MarginalHistogram h;
  h.k = k;
  h.lo = lo;
  h.hi = hi;
  h.bins = bins;
  std::size_t cells = 1;
  for (int d = 0; d < k; ++d) cells *= bins;
  h.counts.assign(cells, 0.0);
  const double w = h.width();
  const std::size_t tuples = n / static_cast<std::size_t>(k);
  for (std::size_t s = 0; s < samples.size() / n; ++s) {
    const double* v = samples.data() + s * n;
    for (std::size_t t = 0; t < tuples; ++t) {
      std::size_t cell = 0;
      bool inside = true;
      for (int d = 0; d < k; ++d) {
        const double x = v[t * k + d];
        if (!(x >= lo && x < hi)) {
          inside = false;
          break;
        }
        cell = cell * bins + std::min(bins - 1, static_cast<std::size_t>((x - lo) / w));
      }
      if (inside) h.counts[cell] += 1.0;
      h.total += 1.0;
    }
  }
  return h;
}

double product_gap(const MarginalHistogram& two, const MarginalHistogram& one) {
  require(two.k == 2 && one.k == 1 && two.bins == one.bins, "product_gap: incompatible histograms");
  double s = 0.0;
  for (std::size_t a = 0; a < one.bins; ++a) {
    for (std::size_t b = 0; b < one.bins; ++b) s += std::abs(two.mass(a * one.bins + b) - one.mass(a) * one.mass(b));
  }
  return s;
}

double l1_to_density(const Histogram& h, const std::function<double(double)>& pdf, double tail_lo, double tail_hi) {
  auto mass = [&](double a, double b) {
    if (b <= a) return 0.0;
    return gauss_legendre(8, a, b).integrate(pdf);
  };
  double outside = 0.0;
  if (tail_lo < h.lo) outside += composite_gauss_legendre(16, 64, tail_lo, h.lo).integrate(pdf);
  if (tail_hi > h.hi) outside += composite_gauss_legendre(16, 64, h.hi, tail_hi).integrate(pdf);
  return l1_distance(h, mass, outside);
}

Table sample_table(const SampleSet& s, int k) {
  require(k >= 1 && static_cast<std::size_t>(k) <= s.n, "sample_table: k out of range");
  Table t;
  t.header = {"replica", "index"};
  for (int d = 1; d <= k; ++d) t.header.push_back("v_" + std::to_string(d));
  for (std::size_t c = 0; c < s.chains; ++c) {
    for (std::size_t i = 0; i < s.per_chain; ++i) {
      std::vector<Cell> row{static_cast<std::int64_t>(c), static_cast<std::int64_t>(i)};
      const auto v = s.sample(c, i);
      for (int d = 0; d < k; ++d) row.emplace_back(v[d]);
      t.add_row(std::move(row));
    }
  }
  return t;
}

}  // namespace kac::chaos
