#include "invdiv/divergence.hpp"

#include <cmath>
#include <string>

#include "invdiv/errors.hpp"

namespace invdiv {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite, got " +
                      std::to_string(v));
  }
}

}  // namespace

double inverse_div(double x, double theta, double lambda) {
  require_positive(x, "x");
  require_positive(theta, "theta");
  require_positive(lambda, "lambda");
  const double diff = x - theta;
  return lambda * diff * diff / (theta * theta * x);
}

double multivariate_inverse_div(std::span<const double> x,
                                std::span<const double> theta,
                                std::span<const double> lambda) {
  if (x.empty()) throw DimensionError("multivariate_inverse_div: empty input");
  if (x.size() != theta.size() || x.size() != lambda.size()) {
    throw DimensionError("multivariate_inverse_div: x, theta, lambda lengths differ");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    total += inverse_div(x[j], theta[j], lambda[j]);
  }
  return total;
}

double squared_div(double x, double theta, double sigma2) {
  require_positive(sigma2, "sigma2");
  if (!std::isfinite(x) || !std::isfinite(theta)) {
    throw DomainError("squared_div: non-finite argument");
  }
  const double diff = x - theta;
  return diff * diff / sigma2;
}

double itakura_saito_div(double x, double theta, double k) {
  require_positive(x, "x");
  require_positive(theta, "theta");
  require_positive(k, "k");
  const double r = x / theta;
  // r - 1 - log r loses everything near r = 1; expand through log1p.
  const double u = r - 1.0;
  return k * (u - std::log1p(u));
}

}  // namespace invdiv
