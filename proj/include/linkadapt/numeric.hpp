#pragma once

#include <functional>

namespace linkadapt {

// Adaptive Simpson quadrature of f over [a, b] to the requested relative
// tolerance (with a small absolute floor for integrals near zero).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-8, double abs_tol = 1e-300);

// Exponential integral Ei(x) for x < 0. Series for |x| < 5, continued
// fraction otherwise, both run to 1e-12 termination.
double exp_integral_ei(double x);

// sinc(x) = sin(pi x) / (pi x), sinc(0) = 1.
double sinc(double x);

// Integral of sinc^2 over [a, b]. Unit-length adaptive Simpson panels keep
// the oscillation resolved; beyond |u| = 1e4 the cos(2 pi u) term integrates
// to O(1/u^3) and the remaining 1/(2 pi^2 u^2) mean is taken in closed form.
double sinc_sq_integral(double a, double b, double rel_tol = 1e-8);

} // namespace linkadapt
