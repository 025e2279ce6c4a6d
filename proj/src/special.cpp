#include "kaclab/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace kac {

double log_sphere_area(double d, double r) {
  const double m = 0.5 * (d + 1.0);
  return std::log(2.0) + m * std::log(std::numbers::pi) - std::lgamma(m) + d * std::log(r);
}

double hermite_he(int n, double x) {
  if (n == 0) return 1.0;
  double h0 = 1.0;
  double h1 = x;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double log_chi2_pdf(double k, double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return (0.5 * k - 1.0) * std::log(x) - 0.5 * x - 0.5 * k * std::log(2.0) - std::lgamma(0.5 * k);
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace kac
