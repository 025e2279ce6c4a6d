#ifndef KACLAB_KERNEL3D_HPP
#define KACLAB_KERNEL3D_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kaclab/rng.hpp"

namespace kac {

/// Angular kernel B on [-1, 1] for three-dimensional collisions, normalized so
/// that (1/2) int B = 1. The cosine c = e.w of a post-collision direction has
/// density B(c)/2 and is drawn from a 1024-entry quantile table.
class AngularKernel3D {
 public:
  static constexpr int kTableSize = 1024;

  static AngularKernel3D uniform();
  /// B(x) = 1 + b x, |b| <= 1.
  static AngularKernel3D linear(double b);
  /// B(x) = (a + 1) ((1 + x) / 2)^a, a >= 0: forward-peaked for large a.
  static AngularKernel3D power(double a);
  static AngularKernel3D from_function(std::string name, std::function<double(double)> b);

  double operator()(double x) const { return b_(x); }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool is_uniform() const { return uniform_; }

  /// (1/2) int x B(x) dx.
  [[nodiscard]] double b1() const { return b1_; }
  /// (1/2) int x^2 B(x) dx.
  [[nodiscard]] double b2() const { return b2_; }
  /// (1/2) int P_l(x) B(x) dx: the eigenvalue of the averaging operator on
  /// degree-l spherical harmonics.
  [[nodiscard]] double legendre_moment(int l) const;

  /// Cosine c in [-1, 1] with density B(c)/2.
  double sample_cosine(Rng& rng) const;

 private:
  AngularKernel3D(std::string name, std::function<double(double)> b, bool uniform);

  std::string name_;
  std::function<double(double)> b_;
  bool uniform_ = false;
  double b1_ = 0.0;
  double b2_ = 0.0;
  std::shared_ptr<const std::vector<double>> quantiles_;
};

}  // namespace kac

#endif
