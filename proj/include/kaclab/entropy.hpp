#ifndef KACLAB_ENTROPY_HPP
#define KACLAB_ENTROPY_HPP

#include <functional>
#include <span>
#include <vector>

#include "kaclab/chaos.hpp"
#include "kaclab/csv.hpp"
#include "kaclab/scattering.hpp"
#include "kaclab/stats.hpp"

namespace kac::entropy {

struct RelativeEntropy {
  double value = 0.0;
  /// f > 0 somewhere the reference vanishes.
  bool infinite = false;
};

/// int f log(f / ref) on [lo, hi] by composite Gauss-Legendre, given log f and
/// log ref so that far tails do not underflow. 0 log 0 = 0.
RelativeEntropy relative_entropy_density(const std::function<double(double)>& log_f,
                                         const std::function<double(double)>& log_ref, double lo, double hi,
                                         int panels = 512);

/// H(F_N | sigma) = E_F[sum_i log(f/gamma)(v_i)] - log Z_N. The standard error
/// combines the spread of chain means with the log Z error.
Estimate entropy_sphere_conditioned(const chaos::ConditionedProduct& cp, const chaos::SampleSet& samples,
                                    const chaos::ZEstimate& z);

struct Production {
  Estimate d;
  /// Sampled states with F = 0, skipped.
  std::size_t rejected = 0;
};

/// D = (N/2) E_F[(1 - F(Rv)/F(v)) (log F(v) - log F(Rv))] with R a Kac rotation
/// (uniform pair, theta from rho); `pairs` rotations per retained state.
Production entropy_production(const chaos::ConditionedProduct& cp, const ScatteringDensity& rho,
                              const chaos::SampleSet& samples, StreamKey key, std::size_t pairs = 0,
                              Exec exec = Exec::parallel);

/// The same estimator for an arbitrary log-density on the sphere (up to a constant).
Production entropy_production(const std::function<double(std::span<const double>)>& log_f,
                              const ScatteringDensity& rho, const chaos::SampleSet& samples, StreamKey key,
                              std::size_t pairs = 0, Exec exec = Exec::parallel);

struct EntropyReport {
  std::size_t n = 0;
  double delta = 0.0;
  Estimate h;
  Estimate d;
  Estimate ratio;
  double villani_bound = 0.0;
  /// ratio - bound, in units of the ratio's standard error.
  double margin_sigma = 0.0;
  bool inconclusive = false;
  bool holds = false;
};

/// D/H against 2/(N-1): holds when D/H >= 2/(N-1) - 3 sigma; inconclusive when
/// H is within 2 standard errors of zero.
EntropyReport villani_ratio_check(std::size_t n, Estimate h, Estimate d);

struct StateOptions {
  chaos::McmcOptions mcmc;
  std::size_t z_samples = 100000;
  std::size_t pairs_per_sample = 0;
};

/// Samples the conditioned product, estimates log Z, H and D, and checks Villani's bound.
EntropyReport evaluate_state(const chaos::ConditionedProduct& cp, const ScatteringDensity& rho,
                             const StateOptions& opt, StreamKey key, double delta = 0.0);

struct EinavTrend {
  double beta = 0.0;
  std::vector<EntropyReport> rows;
  std::vector<double> envelope;  // log N / N^{1 - 2 beta}
  bool decreasing = false;
  /// p in D/H ~ C log N / N^p, least squares on log(ratio / log N) against log N.
  LinearFit fit;
  [[nodiscard]] double exponent() const { return -fit.slope; }
  bool villani_all = false;
};

EinavTrend einav_trend(std::span<const std::size_t> ns, double beta, const ScatteringDensity& rho,
                       const StateOptions& opt, StreamKey key);

/// (N, delta, H, H_stderr, D, D_stderr, ratio, villani_bound).
Table entropy_table(std::span<const EntropyReport> rows);

}  // namespace kac::entropy

#endif
