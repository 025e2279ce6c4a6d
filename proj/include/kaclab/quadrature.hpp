#ifndef KACLAB_QUADRATURE_HPP
#define KACLAB_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace kac {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
  }
};

/// n-point Gauss-Jacobi rule for \f$\int_{-1}^{1} f(x)(1-x)^\alpha(1+x)^\beta dx\f$,
/// alpha, beta > -1. Golub-Welsch eigenvalues polished by Newton steps on the
/// three-term recurrence; weights carry the exact zeroth moment (log-space).
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

QuadratureRule gauss_legendre(int n);

/// Gauss-Legendre mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// `panels` equal sub-intervals of [a, b], n Gauss-Legendre points each.
QuadratureRule composite_gauss_legendre(int n, int panels, double a, double b);

/// Gauss-Chebyshev (first kind): weight (1-x^2)^{-1/2}, weights pi/n.
QuadratureRule gauss_chebyshev(int n);

}  // namespace kac

#endif
