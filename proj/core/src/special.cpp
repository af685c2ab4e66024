#include "invdiv/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "invdiv/errors.hpp"

namespace invdiv {
namespace {

double log_cosh(double z) {
  const double a = std::fabs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// log( e^x K_nu(x) ).
double log_bessel_k_scaled_impl(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_k: x must be positive and finite, got " + std::to_string(x));
  }
  if (!std::isfinite(nu)) throw DomainError("bessel_k: nu must be finite");
  nu = std::fabs(nu);

  // Peak width in u is ~1/sqrt(x) for large x.
  const double h = std::min(0.1, 1.0 / (4.0 * std::sqrt(x)));
  const auto log_term = [&](double u) {
    // cosh u - 1 = 2 sinh^2(u/2), exact near u = 0.
    const double s = std::sinh(0.5 * u);
    return -x * 2.0 * s * s + log_cosh(nu * u);
  };

  // The log-integrand is unimodal in u: rises while nu*tanh(nu u) exceeds
  // x sinh u, then falls double-exponentially.
  constexpr double kCut = 60.0;  // e^-60 relative to the peak
  double peak = log_term(0.0);
  std::size_t last = 0;
  for (std::size_t k = 1;; ++k) {
    const double a = log_term(static_cast<double>(k) * h);
    peak = std::max(peak, a);
    if (a < peak - kCut) {
      last = k;
      break;
    }
    if (k > 2000000) throw std::runtime_error("bessel_k: trapezoid did not terminate");
  }
  double sum = 0.5 * std::exp(log_term(0.0) - peak);
  for (std::size_t k = 1; k <= last; ++k) {
    sum += std::exp(log_term(static_cast<double>(k) * h) - peak);
  }
  return peak + std::log(h * sum);
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("gamma_fn: x must be positive and finite, got " + std::to_string(x));
  }
  const double v = std::tgamma(x);
  if (!std::isfinite(v)) throw std::overflow_error("gamma_fn: overflow at x = " + std::to_string(x));
  return v;
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: x must be positive and finite, got " + std::to_string(x));
  }
  return std::lgamma(x);
}

double log_bessel_k(double nu, double x) { return log_bessel_k_scaled_impl(nu, x) - x; }

double bessel_k_scaled(double nu, double x) {
  const double l = log_bessel_k_scaled_impl(nu, x);
  if (l > 709.0) throw std::overflow_error("bessel_k_scaled: overflow");
  return std::exp(l);
}

double bessel_k(double nu, double x) {
  const double l = log_bessel_k(nu, x);
  if (l > 709.0) {
    throw std::overflow_error("bessel_k: K_" + std::to_string(nu) + "(" + std::to_string(x) +
                              ") overflows");
  }
  return std::exp(l);
}

}  // namespace invdiv
