#ifndef KACLAB_STATS_HPP
#define KACLAB_STATS_HPP

#include <functional>
#include <span>
#include <vector>

namespace kac {

/// A Monte Carlo estimate. Every reported stochastic quantity carries one.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

Estimate mean_stderr(std::span<const double> xs);

/// Sample variance with n - 1 denominator.
double sample_variance(std::span<const double> xs);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
};

/// Weighted least squares y = a + b x. Empty weights means unit weights.
LinearFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

/// Fit mean(t) = A exp(-rate t) by weighted least squares on log|mean|,
/// weights (mean / stderr)^2. Points with mean <= 0 or stderr == 0 are
/// dropped when any weights are finite.
LinearFit fit_exponential_decay(std::span<const double> t, std::span<const double> mean,
                                std::span<const double> stderr_);

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Equal-width histogram on [lo, hi]; `counts` are raw, `mass` normalized by
/// the total sample size (mass outside the range is not represented).
struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> counts;
  double total = 0.0;

  [[nodiscard]] std::size_t bins() const { return counts.size(); }
  [[nodiscard]] double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  [[nodiscard]] double mass(std::size_t b) const { return counts[b] / total; }
  [[nodiscard]] double density(std::size_t b) const { return mass(b) / width(); }
  [[nodiscard]] double edge(std::size_t b) const { return lo + width() * static_cast<double>(b); }

  void add(double x);
};

Histogram make_histogram(std::span<const double> xs, double lo, double hi, std::size_t bins);

/// sum_b |hist mass_b - reference mass_b| plus the reference mass outside
/// [lo, hi] and the sample mass outside [lo, hi]. `bin_mass(a, b)` returns the
/// reference probability of [a, b].
double l1_distance(const Histogram& h, const std::function<double(double, double)>& bin_mass,
                   double outside_reference_mass = 0.0);

}  // namespace kac

#endif
