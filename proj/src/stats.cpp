#include "kaclab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "kaclab/error.hpp"

namespace kac {

Estimate mean_stderr(std::span<const double> xs) {
  require(!xs.empty(), "mean_stderr: empty sample");
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  return {m, std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()))};
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line: need at least two points");
  require(w.empty() || w.size() == x.size(), "fit_line: weight size mismatch");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (w.empty()) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = x.size() > 2 ? std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  } else {
    // Weights are inverse variances.
    fit.slope_stderr = std::sqrt(1.0 / sxx);
  }
  return fit;
}

LinearFit fit_exponential_decay(std::span<const double> t, std::span<const double> mean,
                                std::span<const double> stderr_) {
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (mean[i] <= 0.0 || stderr_[i] <= 0.0) continue;
    xs.push_back(t[i]);
    ys.push_back(std::log(mean[i]));
    const double rel = stderr_[i] / mean[i];
    ws.push_back(1.0 / (rel * rel));
  }
  if (xs.size() < 2) {
    // Noise-free input: plain least squares on the logs.
    xs.clear();
    ys.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (mean[i] <= 0.0) continue;
      xs.push_back(t[i]);
      ys.push_back(std::log(mean[i]));
    }
    LinearFit f = fit_line(xs, ys);
    f.slope = -f.slope;
    return f;
  }
  LinearFit f = fit_line(xs, ys, ws);
  f.slope = -f.slope;
  return f;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double c = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - c, c - static_cast<double>(i) / n});
  }
  return d;
}

void Histogram::add(double x) {
  total += 1.0;
  if (!(x >= lo && x < hi)) return;
  auto b = static_cast<std::size_t>((x - lo) / width());
  if (b >= counts.size()) b = counts.size() - 1;
  counts[b] += 1.0;
}

Histogram make_histogram(std::span<const double> xs, double lo, double hi, std::size_t bins) {
  require(!xs.empty(), "make_histogram: empty sample set");
  require(hi > lo && bins > 0, "make_histogram: bad range");
  Histogram h{lo, hi, std::vector<double>(bins, 0.0), 0.0};
  for (double x : xs) h.add(x);
  return h;
}

double l1_distance(const Histogram& h, const std::function<double(double, double)>& bin_mass,
                   double outside_reference_mass) {
  double d = 0.0;
  double inside = 0.0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    d += std::abs(h.mass(b) - bin_mass(h.edge(b), h.edge(b) + h.width()));
    inside += h.counts[b];
  }
  const double sample_outside = (h.total - inside) / h.total;
  return d + std::abs(sample_outside - outside_reference_mass);
}

}  // namespace kac
