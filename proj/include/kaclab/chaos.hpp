#ifndef KACLAB_CHAOS_HPP
#define KACLAB_CHAOS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kaclab/csv.hpp"
#include "kaclab/density.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/stats.hpp"

namespace kac::chaos {

/// Isotropic Gaussian vector rescaled to radius sqrt(N).
std::vector<double> sample_uniform_sphere(std::size_t n, Rng& rng);

/// Density of (v_1..v_k) under the uniform measure on S^{N-1}(sqrt N);
/// 0 outside the support. Requires k <= N - 2.
double mehler_marginal_density(std::size_t n, std::span<const double> v);
/// P(a <= v_1 <= b) under the same measure.
double mehler_marginal_mass(std::size_t n, double a, double b);

/// [f^{(x)N}] restricted to S^{N-1}(sqrt N). f must have mean 0, unit second
/// moment, finite fourth moment and a finite sup bound.
class ConditionedProduct {
 public:
  ConditionedProduct(Density1D f, std::size_t n);
  [[nodiscard]] const Density1D& base() const { return f_; }
  [[nodiscard]] std::size_t size() const { return n_; }
  /// log(f / gamma)(v).
  [[nodiscard]] double log_ratio(double v) const;
  [[nodiscard]] double log_f(double v) const { return f_.log_pdf(v); }

 private:
  Density1D f_;
  std::size_t n_;
};

struct McmcOptions {
  std::size_t chains = 32;
  std::size_t samples_per_chain = 256;
  /// Burn-in and thinning in sweeps of N proposals.
  std::size_t burn_in_sweeps = 10;
  std::size_t thin_sweeps = 1;
  Exec exec = Exec::parallel;
};

/// Retained MCMC states, chain-major.
struct SampleSet {
  std::size_t n = 0;
  std::size_t chains = 0;
  std::size_t per_chain = 0;
  std::vector<double> values;      // [((c * per_chain) + s) * n + i]
  std::vector<double> acceptance;  // per chain

  [[nodiscard]] std::size_t count() const { return chains * per_chain; }
  [[nodiscard]] std::span<const double> sample(std::size_t c, std::size_t s) const {
    return {values.data() + (c * per_chain + s) * n, n};
  }
};

/// Metropolis chains whose proposals are single Kac rotations (uniform pair,
/// uniform angle), accepted with probability min(1, f(v_i')f(v_j')/(f(v_i)f(v_j))).
/// Chains start from iid draws of f projected onto the sphere.
SampleSet sample_conditioned(const ConditionedProduct& cp, const McmcOptions& opt, StreamKey key);

/// Density of X^2 + Y^2 at s for X, Y iid from f, by Gauss-Chebyshev in the
/// split s(1 +- t)/2.
double pair_square_density(const Density1D& f, double s, int nodes = 96);

enum class ZMethod {
  /// Draw N - 2 coordinates from f and evaluate the exact density of the last
  /// two squared coordinates at the residual: Z = p_{sum X^2}(N) / chi2_N(N).
  conditional,
  /// Average of prod (f/gamma)(v_i) over uniform sphere points (log-sum-exp).
  sphere,
};

struct ZEstimate {
  double log_z = 0.0;
  double log_z_stderr = 0.0;
  std::size_t samples = 0;
  /// Effective sample size (sum w)^2 / sum w^2 of the averaged weights.
  double ess = 0.0;
  bool low_ess = false;
  /// Exact result (f is the standard Gaussian).
  bool exact = false;

  [[nodiscard]] double z() const;
  [[nodiscard]] double z_stderr() const;
};

/// log Z_N(f, sqrt N) with Z_N(f, r) = int prod (f/gamma)(v_i) dsigma_r.
ZEstimate z_n_estimate(const Density1D& f, std::size_t n, std::size_t samples, StreamKey key,
                       ZMethod method = ZMethod::conditional, Exec exec = Exec::parallel);

/// Density of sum_{i<=n} X_i^2 at u, X_i iid from f, by the conditional estimator.
Estimate sum_square_density(const Density1D& f, std::size_t n, double u, std::size_t samples, StreamKey key,
                            Exec exec = Exec::parallel);

/// delta_N = N^{-1/(1 + 2.5 beta)}, inside the window delta^{1+2 beta} N -> inf, delta^{1+3 beta} N -> 0.
double default_delta(std::size_t n, double beta);

struct ProfileReport {
  std::size_t n_eff = 0;  // N - j
  double u = 0.0;
  /// Density of sum X_i^2 at u (Monte Carlo) and the Gaussian profile
  /// exp(-(u - n)^2 / (2 n Sigma^2)) / sqrt(2 pi n Sigma^2).
  Estimate density_mc;
  double density_profile = 0.0;
  /// The same quantities as log Z_{N-j}(f, sqrt u) with Z = int prod f dsigma_{sqrt u}.
  double log_z_mc = 0.0;
  double log_z_profile = 0.0;
  double relative_deviation = 0.0;
  double z_score = 0.0;
};

ProfileReport z_n_profile(const Density1D& f, std::size_t n, std::size_t j, double u, std::size_t samples,
                          StreamKey key, Exec exec = Exec::parallel);

/// Equal-width histogram of a k-marginal on [lo, hi]^k. Each sample of
/// dimension n contributes its floor(n / k) disjoint k-tuples.
struct MarginalHistogram {
  int k = 1;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 0;
  std::vector<double> counts;  // row-major, bins^k cells
  double total = 0.0;

  [[nodiscard]] double width() const { return (hi - lo) / static_cast<double>(bins); }
  [[nodiscard]] double mass(std::size_t cell) const { return counts[cell] / total; }
  [[nodiscard]] Histogram as_1d() const;
};

MarginalHistogram empirical_marginal(std::span<const double> samples, std::size_t n, int k, std::size_t bins,
                                     double lo, double hi);
inline MarginalHistogram empirical_marginal(const SampleSet& s, int k, std::size_t bins, double lo, double hi) {
  return empirical_marginal(s.values, s.n, k, bins, lo, hi);
}

/// L1 distance of a 2-marginal histogram to the product of its own 1-marginal.
double product_gap(const MarginalHistogram& two, const MarginalHistogram& one);

/// L1 distance of a 1-marginal histogram to a density, via bin masses by
/// 8-point Gauss-Legendre plus the reference mass outside [lo, hi].
double l1_to_density(const Histogram& h, const std::function<double(double)>& pdf, double tail_lo = -40.0,
                     double tail_hi = 40.0);

/// (replica, index, v_1..v_k) rows.
Table sample_table(const SampleSet& s, int k);

}  // namespace kac::chaos

#endif
