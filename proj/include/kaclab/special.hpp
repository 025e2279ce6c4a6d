#ifndef KACLAB_SPECIAL_HPP
#define KACLAB_SPECIAL_HPP

#include <cstdint>

namespace kac {

/// log |S^d(r)|: area of the d-dimensional sphere of radius r in R^{d+1}.
double log_sphere_area(double d, double r = 1.0);

/// Probabilists' Hermite polynomial He_n(x).
double hermite_he(int n, double x);

/// n! as a double (exact up to n = 22).
double factorial(int n);

/// log of the chi-square density with k degrees of freedom at x > 0.
double log_chi2_pdf(double k, double x);

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

}  // namespace kac

#endif
