#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "invdiv/errors.hpp"
#include "invdiv/estimator.hpp"
#include "invdiv/model_spec.hpp"

using namespace invdiv;

namespace {

EstimationProblem scalar(std::vector<double> x, DivergenceKind k, double lambda, const char* f) {
  return EstimationProblem(std::move(x), 1, k, {lambda}, parse_f(f));
}

// Grid argmin of the loss over [lo, hi] with the given step, then a local
// refinement grid of step/1000 around the winner.
double grid_argmin(const EstimationProblem& p, double lo, double hi, double step) {
  auto loss = [&](double t) { return loss_value(p, std::span<const double>(&t, 1)); };
  double best = lo, best_loss = loss(lo);
  for (double t = lo; t <= hi; t += step)
    if (const double l = loss(t); l < best_loss) best_loss = l, best = t;
  const double fine = step / 1000.0;
  const double a = std::max(lo, best - step), b = std::min(hi, best + step);
  for (double t = a; t <= b; t += fine)
    if (const double l = loss(t); l < best_loss) best_loss = l, best = t;
  return best;
}

}  // namespace

TEST(Estimator, IdentityGivesTheMeanInOneStep) {
  std::mt19937_64 gen(1);
  std::lognormal_distribution<double> ln(0.0, 1.0);
  std::vector<double> x(1000);
  for (auto& v : x) v = ln(gen);
  const auto p = scalar(x, DivergenceKind::inverse, 2.0, "identity");
  const EstimateResult r = solve(p);
  long double acc = 0.0L;
  for (double v : x) acc += v;
  const double mean = static_cast<double>(acc / x.size());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_NEAR(r.theta_hat[0], mean, 4 * std::numeric_limits<double>::epsilon() * mean);
  EXPECT_EQ(r.theta_hat[0], pairwise_sum(x) / static_cast<double>(x.size()));
}

TEST(Estimator, ResidualForms) {
  const auto p = scalar({1.0, 2.0, 4.0}, DivergenceKind::inverse, 1.0, "identity");
  const double theta = 1.5;
  const auto r = estimating_residual(p, std::span<const double>(&theta, 1));
  EXPECT_NEAR(r[0], 7.0 / 3.0 - 1.5, 1e-15);
  const auto nr = normalized_residual(p, std::span<const double>(&theta, 1));
  EXPECT_NEAR(nr[0], 7.0 / 3.0 - 1.5, 1e-15);

  const auto q = scalar({1.0, 2.0, 4.0, 30.0}, DivergenceKind::inverse, 1.0, "log1p:1");
  for (double t : {0.5, 1.5, 3.0, 10.0}) {
    const auto a = estimating_residual(q, std::span<const double>(&t, 1));
    const auto b = normalized_residual(q, std::span<const double>(&t, 1));
    EXPECT_EQ(a[0] > 0, b[0] > 0);
  }
  const auto one = scalar({3.0}, DivergenceKind::inverse, 1.0, "log1p:1");
  const double at = 3.0;
  EXPECT_EQ(estimating_residual(one, std::span<const double>(&at, 1))[0], 0.0);
  EXPECT_EQ(solve(one).theta_hat[0], 3.0);
}

TEST(Estimator, LossValues) {
  const auto p = scalar({2.0, 2.0, 2.0}, DivergenceKind::inverse, 1.0, "log1p:1");
  const double t = 2.0;
  EXPECT_EQ(loss_value(p, std::span<const double>(&t, 1)), 0.0);
  const auto q = scalar({1.0, 3.0}, DivergenceKind::squared, 2.0, "identity");
  const double u = 1.0;
  EXPECT_DOUBLE_EQ(loss_value(q, std::span<const double>(&u, 1)), (0.0 + 4.0) / 2.0 / 2.0);
}

TEST(Estimator, RobustOnGrossOutlier) {
  // Under the inverse divergence a point far below theta is the distant one.
  const std::vector<double> x{2.0, 3.0, 4.0, 0.01};
  const auto p = scalar(x, DivergenceKind::inverse, 1.0, "log1p:1");
  const EstimateResult r = solve(p);
  ASSERT_TRUE(r.converged) << r.note;
  const double clean = 3.0, mean = 2.2525;
  EXPECT_LT(std::abs(r.theta_hat[0] - clean), std::abs(mean - clean));
  EXPECT_NEAR(r.theta_hat[0], grid_argmin(p, 0.01, 4.0, 1e-4), 2e-6);
  const double start = componentwise_median(p)[0];
  EXPECT_LE(r.loss, loss_value(p, std::span<const double>(&start, 1)));
}

TEST(Estimator, ResidualGrowingAlongThePathStillConverges) {
  // From the median the residual norm rises on the way to the minimum near 35.
  const auto p = scalar({1.0, 2.0, 3.0, 100.0}, DivergenceKind::inverse, 1.0, "log1p:1");
  const EstimateResult r = solve(p);
  ASSERT_TRUE(r.converged) << r.note;
  EXPECT_NEAR(r.theta_hat[0], grid_argmin(p, 1.0, 100.0, 1e-3), 2e-6);
}

TEST(Estimator, AgreesWithGridOracleOnRandomSmallData) {
  std::mt19937_64 gen(2024);
  const ModelSampler igt(ModelSpec::parse("igt(theta=2,lambda=3,g=gauss)"));
  struct Pair {
    DivergenceKind k;
    double lambda;
    const char* f;
  };
  const std::vector<Pair> pairs = {{DivergenceKind::inverse, 3.0, "log1p:1"},
                                   {DivergenceKind::inverse, 3.0, "power:0.5"},
                                   {DivergenceKind::itakura_saito, 2.0, "log1p:1"},
                                   {DivergenceKind::squared, 1.0, "power:0.5"}};
  for (int rep = 0; rep < 20; ++rep) {
    RngStream rng(77, static_cast<std::uint64_t>(rep));
    const std::size_t n = 5 + static_cast<std::size_t>(rep) * 2;
    std::vector<double> x(n);
    for (auto& v : x) v = igt.draw(rng);
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    for (const auto& pr : pairs) {
      const auto p = scalar(x, pr.k, pr.lambda, pr.f);
      SolverOptions opts;
      opts.multistart = 8;
      const EstimateResult r = solve(p, opts);
      ASSERT_TRUE(r.converged) << rep << " " << pr.f;
      const double oracle = grid_argmin(p, lo, hi, 1e-4);
      EXPECT_NEAR(r.theta_hat[0], oracle, 2e-4) << "rep " << rep << " f=" << pr.f;
      const auto res = estimating_residual(p, r.theta_hat);
      EXPECT_LE(std::abs(res[0]), 10 * opts.tol * (1.0 + hi));
    }
  }
}

TEST(Estimator, ScaleEquivariance) {
  const std::vector<double> x{0.4, 1.1, 2.0, 2.5, 9.0};
  const auto p = scalar(x, DivergenceKind::inverse, 1.5, "log1p:1");
  const double base = solve(p).theta_hat[0];
  for (double c : {0.1, 3.0, 50.0}) {
    std::vector<double> y = x;
    for (auto& v : y) v *= c;
    const auto q = scalar(y, DivergenceKind::inverse, 1.5 * c, "log1p:1");
    EXPECT_NEAR(solve(q).theta_hat[0], c * base, 1e-8 * c * base);
  }
}

TEST(Estimator, MultivariateSharesTheWeight) {
  const std::vector<double> data{1.0, 2.0, 1.5, 2.5, 0.8, 1.7, 9.0, 30.0};
  const EstimationProblem p(data, 2, DivergenceKind::multivariate_inverse, {1.0, 2.0},
                            parse_f("log1p:1"));
  const EstimateResult r = solve(p);
  ASSERT_TRUE(r.converged);
  // Fixed point: theta_j = sum w_i x_ij / sum w_i with one weight per row.
  std::vector<double> w;
  for (std::size_t i = 0; i < p.n(); ++i) w.push_back(p.f().deriv(p.divergence_at(i, r.theta_hat)));
  const double sw = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t j = 0; j < 2; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) s += w[i] * p.row(i)[j];
    EXPECT_NEAR(r.theta_hat[j], s / sw, 1e-9);
  }
  // A single shared lambda broadcasts.
  const EstimationProblem q(data, 2, DivergenceKind::multivariate_inverse, {1.0}, parse_f("identity"));
  EXPECT_NEAR(solve(q).theta_hat[1], (2.0 + 2.5 + 1.7 + 30.0) / 4.0, 1e-12);
}

TEST(Estimator, TraceAndNonConvergence) {
  const auto p = scalar({1.0, 2.0, 3.0, 100.0}, DivergenceKind::inverse, 1.0, "log1p:1");
  SolverOptions opts;
  opts.trace = true;
  const EstimateResult r = solve(p, opts);
  EXPECT_EQ(r.weight_trace.size(), static_cast<std::size_t>(r.iterations));
  for (const auto& w : r.weight_trace) {
    EXPECT_GT(w.min, 0.0);
    EXPECT_LE(w.min, w.mean);
    EXPECT_LE(w.mean, w.max);
  }
  opts.max_iter = 1;
  opts.tol = 1e-15;
  const EstimateResult capped = solve(p, opts);
  EXPECT_FALSE(capped.converged);
  EXPECT_FALSE(capped.note.empty());
}

TEST(Estimator, Validation) {
  EXPECT_THROW(scalar({}, DivergenceKind::inverse, 1.0, "identity"), DomainError);
  EXPECT_THROW(scalar({1.0, -1.0}, DivergenceKind::inverse, 1.0, "identity"), DomainError);
  EXPECT_THROW(scalar({1.0}, DivergenceKind::inverse, 0.0, "identity"), DomainError);
  EXPECT_THROW(EstimationProblem({1.0, 2.0}, 2, DivergenceKind::inverse, {1.0}, parse_f("identity")),
               DimensionError);
  EXPECT_THROW(EstimationProblem({1.0, 2.0, 3.0}, 2, DivergenceKind::multivariate_inverse, {1.0},
                                 parse_f("identity")),
               DimensionError);
  const auto p = scalar({1.0, 2.0}, DivergenceKind::inverse, 1.0, "identity");
  const double bad = -1.0;
  EXPECT_THROW(loss_value(p, std::span<const double>(&bad, 1)), DomainError);
  EXPECT_EQ(parse_divergence("minverse"), DivergenceKind::multivariate_inverse);
  EXPECT_EQ(parse_divergence("is"), DivergenceKind::itakura_saito);
  EXPECT_THROW(parse_divergence("kl"), ParseError);
}
