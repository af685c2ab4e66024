#pragma once

namespace invdiv {

// Gamma(x) for x > 0. Throws DomainError for x <= 0 and std::overflow_error
// when the result is not representable.
double gamma_fn(double x);
// log Gamma(x) for x > 0.
double log_gamma(double x);

// Modified Bessel function of the second kind K_nu(x), x > 0, any real nu.
// Evaluated from K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du by the
// trapezoidal rule, which converges geometrically for this integrand; the
// step shrinks with 1/sqrt(x) so the peak at u = 0 stays resolved.
// Throws DomainError for x <= 0 and std::overflow_error if K_nu(x) exceeds
// the double range.
double bessel_k(double nu, double x);
// e^x K_nu(x); finite for all x > 0 where bessel_k underflows.
double bessel_k_scaled(double nu, double x);
// log K_nu(x).
double log_bessel_k(double nu, double x);

}  // namespace invdiv
