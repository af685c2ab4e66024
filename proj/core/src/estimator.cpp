#include "invdiv/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invdiv/divergence.hpp"
#include "invdiv/errors.hpp"

namespace invdiv {
namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool positive_domain(DivergenceKind k) { return k != DivergenceKind::squared; }

struct Sums {
  std::vector<double> weighted;  // sum_i w_i (x_ij - theta_j)
  std::vector<double> mean;      // sum_i w_i x_ij / sum_i w_i
  double weight = 0.0;
  WeightSummary summary;
};

Sums weighted_sums(const EstimationProblem& p, std::span<const double> theta) {
  const std::size_t n = p.n(), d = p.dim();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = p.f().deriv(p.divergence_at(i, theta));
  Sums s;
  s.weight = pairwise_sum(w);
  s.weighted.resize(d);
  s.mean.resize(d);
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) terms[i] = w[i] * (p.row(i)[j] - theta[j]);
    s.weighted[j] = pairwise_sum(terms);
    for (std::size_t i = 0; i < n; ++i) terms[i] = w[i] * p.row(i)[j];
    s.mean[j] = pairwise_sum(terms) / s.weight;
  }
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  s.summary = {*lo, *hi, s.weight / static_cast<double>(n)};
  return s;
}

std::vector<double> quantile_start(const EstimationProblem& p, double q) {
  std::vector<double> out(p.dim());
  std::vector<double> col(p.n());
  for (std::size_t j = 0; j < p.dim(); ++j) {
    for (std::size_t i = 0; i < p.n(); ++i) col[i] = p.row(i)[j];
    std::sort(col.begin(), col.end());
    const double pos = q * static_cast<double>(p.n() - 1);
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    out[j] = k + 1 < p.n() ? col[k] + frac * (col[k + 1] - col[k]) : col[k];
  }
  return out;
}

}  // namespace

std::string to_string(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::inverse: return "inverse";
    case DivergenceKind::multivariate_inverse: return "multivariate_inverse";
    case DivergenceKind::squared: return "squared";
    case DivergenceKind::itakura_saito: return "itakura_saito";
  }
  return "?";
}

DivergenceKind parse_divergence(const std::string& text) {
  if (text == "inverse") return DivergenceKind::inverse;
  if (text == "multivariate_inverse" || text == "minverse") return DivergenceKind::multivariate_inverse;
  if (text == "squared") return DivergenceKind::squared;
  if (text == "itakura_saito" || text == "is") return DivergenceKind::itakura_saito;
  throw ParseError("unknown divergence '" + text + "'");
}

EstimationProblem::EstimationProblem(std::vector<double> data, std::size_t dim,
                                     DivergenceKind divergence, std::vector<double> lambda,
                                     FFunction f)
    : data_(std::move(data)), dim_(dim), divergence_(divergence), lambda_(std::move(lambda)),
      f_(std::move(f)) {
  if (dim_ == 0) throw DimensionError("EstimationProblem: dim must be >= 1");
  if (data_.empty()) throw DomainError("EstimationProblem: need at least one data point");
  if (data_.size() % dim_ != 0) throw DimensionError("EstimationProblem: data size not a multiple of dim");
  n_ = data_.size() / dim_;
  if (divergence_ != DivergenceKind::multivariate_inverse && dim_ != 1) {
    throw DimensionError("EstimationProblem: " + to_string(divergence_) + " is scalar; dim must be 1");
  }
  if (lambda_.size() == 1 && dim_ > 1) lambda_.assign(dim_, lambda_[0]);
  const std::size_t want = divergence_ == DivergenceKind::multivariate_inverse ? dim_ : 1;
  if (lambda_.size() != want) throw DimensionError("EstimationProblem: lambda has wrong length");
  for (double l : lambda_) {
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("EstimationProblem: lambda must be > 0");
  }
  for (double x : data_) {
    if (!std::isfinite(x) || (positive_domain(divergence_) && !(x > 0.0))) {
      throw DomainError("EstimationProblem: data outside the divergence domain");
    }
  }
}

void EstimationProblem::check_theta(std::span<const double> theta) const {
  if (theta.size() != dim_) throw DimensionError("theta has wrong dimension");
  for (double t : theta) {
    if (!std::isfinite(t) || (positive_domain(divergence_) && !(t > 0.0))) {
      throw DomainError("theta outside the parameter domain");
    }
  }
}

double EstimationProblem::divergence_at(std::size_t i, std::span<const double> theta) const {
  const auto x = row(i);
  switch (divergence_) {
    case DivergenceKind::inverse: return inverse_div(x[0], theta[0], lambda_[0]);
    case DivergenceKind::multivariate_inverse:
      return multivariate_inverse_div(x, theta, lambda_);
    case DivergenceKind::squared: return squared_div(x[0], theta[0], lambda_[0]);
    case DivergenceKind::itakura_saito: return itakura_saito_div(x[0], theta[0], lambda_[0]);
  }
  return 0.0;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> estimating_residual(const EstimationProblem& p, std::span<const double> theta) {
  p.check_theta(theta);
  Sums s = weighted_sums(p, theta);
  for (double& v : s.weighted) v /= static_cast<double>(p.n());
  return s.weighted;
}

std::vector<double> normalized_residual(const EstimationProblem& p, std::span<const double> theta) {
  p.check_theta(theta);
  Sums s = weighted_sums(p, theta);
  if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
    throw DomainError("normalized_residual: weights sum to zero or overflow");
  }
  for (double& v : s.weighted) v /= s.weight;
  return s.weighted;
}

double loss_value(const EstimationProblem& p, std::span<const double> theta) {
  p.check_theta(theta);
  std::vector<double> terms(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) terms[i] = p.f()(p.divergence_at(i, theta));
  return pairwise_sum(terms) / static_cast<double>(p.n());
}

std::vector<double> componentwise_median(const EstimationProblem& p) {
  return quantile_start(p, 0.5);
}

EstimateResult solve_from(const EstimationProblem& p, std::vector<double> theta,
                          const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("solver tolerance must be > 0");
  if (opts.max_iter < 0) throw DomainError("solver max_iter must be >= 0");
  p.check_theta(theta);
  EstimateResult out;

  auto residual = [&](std::span<const double> th, Sums* keep) {
    Sums s = weighted_sums(p, th);
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) {
      throw DomainError("solver: weights sum to zero or overflow");
    }
    for (double& v : s.weighted) v /= s.weight;
    const double norm = max_abs(s.weighted);
    if (keep) *keep = std::move(s);
    return norm;
  };

  Sums current;
  double norm = residual(theta, &current);
  double loss = loss_value(p, theta);
  std::vector<double> candidate(theta.size());
  while (norm > opts.tol && out.iterations < opts.max_iter) {
    ++out.iterations;
    if (opts.trace) out.weight_trace.push_back(current.summary);
    // Full step to the weighted mean; a step that raises the loss is halved.
    // The residual norm is not a usable guard: it can grow along the path to
    // the minimum. Rounding slack lets the last steps through when the loss
    // is flat to machine precision.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(loss) + 1e-300);
    double step = 1.0;
    double next_loss = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halving = 0; halving <= 30 && !accepted; ++halving, step *= 0.5) {
      bool ok = true;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        candidate[j] = step == 1.0 ? current.mean[j]
                                   : theta[j] + step * (current.mean[j] - theta[j]);
        if (positive_domain(p.divergence()) && !(candidate[j] > 0.0)) ok = false;
      }
      if (!ok) continue;
      next_loss = loss_value(p, candidate);
      accepted = next_loss <= loss + slack;
    }
    if (!accepted) {
      out.note = "no descent step";
      break;
    }
    theta = candidate;
    loss = next_loss;
    norm = residual(theta, &current);
  }
  out.theta_hat = std::move(theta);
  out.residual_norm = norm;
  out.converged = norm <= opts.tol;
  out.loss = loss;
  if (!out.converged && out.note.empty()) out.note = "iteration cap reached";
  return out;
}

EstimateResult solve(const EstimationProblem& p, const SolverOptions& opts) {
  EstimateResult best = solve_from(p, componentwise_median(p), opts);
  for (int k = 0; k < opts.multistart; ++k) {
    const double q = (k + 0.5) / opts.multistart;
    EstimateResult r = solve_from(p, quantile_start(p, q), opts);
    const bool better = (r.converged && !best.converged) ||
                        (r.converged == best.converged && r.loss < best.loss);
    if (better) best = std::move(r);
  }
  return best;
}

}  // namespace invdiv
