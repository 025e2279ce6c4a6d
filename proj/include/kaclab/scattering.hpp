#ifndef KACLAB_SCATTERING_HPP
#define KACLAB_SCATTERING_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"

namespace kac {

/// Nodes and weights for integrals \f$\int_{-\pi}^{\pi} g(\theta)\rho(\theta)d\theta\f$;
/// the weights already include rho.
struct AngleQuadrature {
  std::vector<double> theta;
  std::vector<double> weight;

  template <class G>
  double integrate(G&& g) const {
    double s = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) s += weight[k] * g(theta[k]);
    return s;
  }
};

/// Collision-angle law rho on [-pi, pi]: even, non-negative, unit mass.
/// Validated at construction; sampling goes through a 4096-entry quantile
/// table with linear interpolation (exact draw when uniform).
class ScatteringDensity {
 public:
  static constexpr int kTableSize = 4096;

  static ScatteringDensity uniform();
  /// cos^2(theta) / pi.
  static ScatteringDensity cos_squared();
  /// (1 + cos theta) / (2 pi).
  static ScatteringDensity one_plus_cos();
  /// Two Gaussian bumps of standard deviation `width` at +-center, normalized numerically.
  static ScatteringDensity bump(double center, double width);
  /// Arbitrary rho; must already be normalized.
  static ScatteringDensity from_function(std::string name, std::function<double(double)> rho);
  /// Piecewise-linear rho through (theta_k, value_k) covering [-pi, pi].
  /// With `normalize`, values are rescaled to unit mass first.
  static ScatteringDensity from_table(std::vector<double> theta, std::vector<double> value,
                                      bool normalize = false);

  double operator()(double theta) const { return rho_(theta); }
  [[nodiscard]] bool is_uniform() const { return uniform_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  /// theta in [-pi, pi) distributed per rho.
  double sample(Rng& rng) const;

  /// Trapezoid with `points` nodes for uniform rho (exact for trigonometric
  /// polynomials of degree < points); otherwise `panels` x `points_per_panel`
  /// Gauss-Legendre.
  [[nodiscard]] AngleQuadrature quadrature(int points = 64, int panels = 64, int points_per_panel = 16) const;

  /// \f$\int \cos(k\theta)\rho(\theta)d\theta\f$.
  [[nodiscard]] double cosine_moment(int k) const;

 private:
  ScatteringDensity(std::string name, std::function<double(double)> rho, bool uniform,
                    std::vector<double> breakpoints = {});
  void validate_and_tabulate();

  std::string name_;
  std::function<double(double)> rho_;
  bool uniform_ = false;
  std::vector<double> breakpoints_;                  // panel edges for piecewise rho
  std::shared_ptr<const std::vector<double>> quantiles_;  // kTableSize + 1 entries
};

}  // namespace kac

#endif
