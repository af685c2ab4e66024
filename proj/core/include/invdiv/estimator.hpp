#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "invdiv/functions.hpp"

namespace invdiv {

enum class DivergenceKind { inverse, multivariate_inverse, squared, itakura_saito };

std::string to_string(DivergenceKind k);
DivergenceKind parse_divergence(const std::string& text);

// Data and loss for the M-estimator of theta minimizing
//
//   L(theta) = (1/n) sum_i f(d(x_i, theta)).
//
// `data` is row-major n x dim. `lambda` is the known scale of the
// divergence: lambda for inverse, one lambda per dimension (or a single
// shared one) for multivariate_inverse, sigma^2 for squared and k for
// itakura_saito.
class EstimationProblem {
public:
  EstimationProblem(std::vector<double> data, std::size_t dim, DivergenceKind divergence,
                    std::vector<double> lambda, FFunction f);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  DivergenceKind divergence() const noexcept { return divergence_; }
  const std::vector<double>& lambda() const noexcept { return lambda_; }
  const FFunction& f() const noexcept { return f_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  // d(x_i, theta).
  double divergence_at(std::size_t i, std::span<const double> theta) const;
  // Throws DomainError if theta is outside the parameter domain.
  void check_theta(std::span<const double> theta) const;

private:
  std::vector<double> data_;
  std::size_t n_;
  std::size_t dim_;
  DivergenceKind divergence_;
  std::vector<double> lambda_;
  FFunction f_;
};

// (1/n) sum_i f'(d(x_i, theta)) (x_i - theta).
std::vector<double> estimating_residual(const EstimationProblem& p, std::span<const double> theta);
// sum_i f'(d_i) (x_i - theta) / sum_i f'(d_i); same zeros as above.
std::vector<double> normalized_residual(const EstimationProblem& p, std::span<const double> theta);
// L(theta).
double loss_value(const EstimationProblem& p, std::span<const double> theta);

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 500;
  // Extra starts at k componentwise data quantiles; the lowest-loss solution
  // wins. 0 runs from the median only.
  int multistart = 0;
  bool trace = false;
};

struct WeightSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct EstimateResult {
  std::vector<double> theta_hat;
  int iterations = 0;
  // max-norm of the normalized residual at theta_hat.
  double residual_norm = 0.0;
  bool converged = false;
  double loss = 0.0;
  std::vector<WeightSummary> weight_trace;
  std::string note;
};

// Weighted-mean fixed point theta <- sum w_i x_i / sum w_i with
// w_i = f'(d(x_i, theta)), started at the componentwise median. A step that
// increases the loss is halved (up to 30 times). Converged when the
// normalized residual is at most tol in max-norm; running out of iterations
// returns converged = false rather than throwing.
EstimateResult solve(const EstimationProblem& p, const SolverOptions& opts = {});
EstimateResult solve_from(const EstimationProblem& p, std::vector<double> start,
                          const SolverOptions& opts = {});

// Componentwise median of the data.
std::vector<double> componentwise_median(const EstimationProblem& p);

// Pairwise (cascade) summation; result independent of how callers split work.
double pairwise_sum(std::span<const double> v);

}  // namespace invdiv
