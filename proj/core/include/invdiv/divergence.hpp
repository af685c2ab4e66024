#pragma once

#include <span>

namespace invdiv {

// Bregman divergence generated by phi(x) = lambda / x:
//
//   d(x, theta) = lambda (x - theta)^2 / (theta^2 x),   x, theta, lambda > 0.
//
// Throws DomainError if any argument is non-positive or non-finite.
double inverse_div(double x, double theta, double lambda);

// Sum over dimensions of inverse_div(x_j, theta_j, lambda_j).
// Throws DimensionError on length mismatch or empty input.
double multivariate_inverse_div(std::span<const double> x,
                                std::span<const double> theta,
                                std::span<const double> lambda);

// (x - theta)^2 / sigma2.
double squared_div(double x, double theta, double sigma2);

// Itakura-Saito divergence k (x/theta - log(x/theta) - 1).
double itakura_saito_div(double x, double theta, double k);

}  // namespace invdiv
