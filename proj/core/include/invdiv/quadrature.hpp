#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace invdiv {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  // Bisections allowed per adaptive run before BudgetExhausted is thrown.
  std::size_t max_subdivisions = 4000;
};

using Integrand = std::function<double(double)>;
using Integrand2 = std::function<double(double, double)>;
using IntegrandN = std::function<double(std::span<const double>)>;

// Globally adaptive 10/21-point Gauss-Kronrod quadrature on [a, b]. Endpoints
// are never evaluated, so integrable endpoint singularities are allowed.
// Throws BudgetExhausted when the tolerance cannot be met, including when the
// integrand returns a non-finite value.
QuadratureResult integrate_interval(const Integrand& h, double a, double b,
                                    const QuadratureOptions& opts = {});

// int_0^inf h(t) dt. The head [0, 1] is integrated in v with t = v^2, which
// removes t^(-1/2) singularities. The tail [1, inf) goes through the
// compactification u = t/(1+t) followed by u = 1 - w^2, i.e. t + 1 = 1/w^2,
// which turns algebraic tails t^p into w^(-2p-3) and leaves p < -1 integrable
// with no endpoint blow-up for p <= -3/2.
QuadratureResult integrate_halfline(const Integrand& h, double tol);
QuadratureResult integrate_halfline(const Integrand& h, const QuadratureOptions& opts);

// int_0^T h(t) dt with the same head treatment.
QuadratureResult integrate_truncated(const Integrand& h, double upper,
                                     const QuadratureOptions& opts);

// int_0^inf int_0^inf h(t, s) dt ds by iterated half-line quadrature; the
// inner integral runs at a tenth of the outer tolerance.
QuadratureResult integrate_plane_quadrant(const Integrand2& h, double tol);

// Iterated quadrature over the positive orthant [0, inf)^dims (dims <= 4).
QuadratureResult integrate_orthant(std::size_t dims, const IntegrandN& h, double tol);

// int_0^inf h(x) dx for integrands whose mass sits around a scale `center`:
// split at center, with x = center (1 + s) above and x = center / (1 + s)
// below, both integrated in s over [0, inf). Handles blow-up of h at 0 and
// slow decay at infinity symmetrically.
QuadratureResult integrate_positive_axis(const Integrand& h, double center,
                                         const QuadratureOptions& opts);

}  // namespace invdiv
