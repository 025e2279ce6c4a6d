#ifndef KACLAB_DENSITY_HPP
#define KACLAB_DENSITY_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "kaclab/rng.hpp"

namespace kac {

/// Weight w of N(mean, variance).
struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

/// A one-dimensional velocity density in closed form: a finite Gaussian
/// mixture, optionally multiplied by (1 + c He_n(v)) when it is the standard
/// Gaussian. Moments, characteristic function and an L^inf bound are exact.
class Density1D {
 public:
  static Density1D gaussian(double variance = 1.0);
  /// delta gamma_{1/(2 delta)} + (1 - delta) gamma_{1/(2(1 - delta))}, gamma_a of variance a.
  static Density1D fdelta(double delta);
  /// (1/2) N(a, 1 - a^2) + (1/2) N(-a, 1 - a^2): unit energy, two humps.
  static Density1D bimodal(double shift);
  static Density1D mixture(std::string name, std::vector<GaussianComponent> components);
  /// gamma(v) (1 + c He_n(v)); rejected if it goes negative.
  static Density1D hermite_perturbed(int n, double c);
  /// "gaussian", "gaussian:<var>", "fdelta:<delta>", "bimodal:<shift>", "hermite:<n>:<c>".
  static Density1D parse(const std::string& spec);

  [[nodiscard]] double pdf(double v) const;
  [[nodiscard]] double log_pdf(double v) const;
  [[nodiscard]] std::complex<double> characteristic(double xi) const;
  /// Raw moments E v^k for k <= 4.
  [[nodiscard]] double moment(int k) const;
  /// Upper bound on sup f.
  [[nodiscard]] double sup_bound() const;
  double sample(Rng& rng) const;

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::vector<GaussianComponent>& components() const { return components_; }
  [[nodiscard]] bool is_standard_gaussian() const;

 private:
  std::string name_;
  std::vector<GaussianComponent> components_;
  int hermite_n_ = 0;
  double hermite_c_ = 0.0;
  std::shared_ptr<const std::vector<double>> quantiles_;  // only for Hermite-perturbed densities
};

/// Sigma = sqrt(int (v^2 - 1)^2 f dv), by composite Gauss-Legendre on a range
/// covering 40 standard deviations of the widest component.
double sigma_stat(const Density1D& f);

}  // namespace kac

#endif
