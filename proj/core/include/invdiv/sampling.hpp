#pragma once

#include <memory>
#include <span>
#include <vector>

#include "invdiv/distributions.hpp"
#include "invdiv/inverse_cdf.hpp"
#include "invdiv/rng.hpp"

namespace invdiv {

// The two preimages of a divergence level t under x -> d(x, theta):
//
//   x_low, x_high = (theta / 2 lambda) ((theta t + 2 lambda) -/+ sqrt(theta t (theta t + 4 lambda)))
//
// with x_low x_high = theta^2.
struct RootPair {
  double x_low;
  double x_high;
  double t;
  double theta;
  double lambda;
};

// x_high is formed first (no cancellation) and x_low = theta^2 / x_high.
RootPair solve_root_pair(double t, double theta, double lambda);

// h(x) = sqrt(x) / (x + theta); equal on both roots of a level t.
double root_h(double x, double theta);
// (sqrt(lambda) / theta) / sqrt(t + 4 lambda / theta), the common value above.
double root_h_level(double t, double theta, double lambda);

// Draws from the radial law t^(alpha-1) g(t) / M(alpha) on (0, inf).
// gauss is exact (chi-square with 2 alpha degrees of freedom, the square of
// a normal for alpha = 1/2); everything else goes through a numeric inverse
// CDF. Throws AssumptionViolated if M(alpha) diverges.
class RadialSampler {
public:
  RadialSampler(GeneratingFunction g, double alpha);

  double operator()(RngStream& rng) const;
  double alpha() const noexcept { return alpha_; }
  bool exact() const noexcept { return !table_; }

private:
  GeneratingFunction g_;
  double alpha_;
  std::shared_ptr<const InverseCdfTable> table_;
};

// IGT draws by the root-pair transform. Draw T from the radial law
// t^(-1/2) g(t) and pick one of its two preimages. Through
// |dt/dx| = lambda |x^2 - theta^2| / (theta^2 x^2), the density of X on
// either branch maps to a t-density proportional to
// g(t) sqrt(x) / (|x - theta| (x + theta)), and on a root pair the two
// values stand in the ratio theta : x_low. Hence
//
//   P(x_low | T = t) = theta / (theta + x_low),
//   P(x_high | T = t) = x_low / (theta + x_low).
//
// For g = gauss this is the Michael-Schucany-Haas inverse Gaussian sampler.
class IgtSampler {
public:
  explicit IgtSampler(const IgtModel& m);

  double operator()(RngStream& rng) const;

private:
  double theta_;
  double lambda_;
  RadialSampler radial_;
};

// MIGT draws: R from the radial law with alpha = d/2, split along a
// symmetric Dirichlet(1/2, ..., 1/2) into per-dimension levels t_j, then one
// root pair and branch pick per dimension.
class MigtSampler {
public:
  explicit MigtSampler(const MigtModel& m);

  std::size_t dim() const noexcept { return theta_.size(); }
  void operator()(RngStream& rng, std::span<double> out) const;
  std::vector<double> operator()(RngStream& rng) const;

private:
  std::vector<double> theta_;
  std::vector<double> lambda_;
  RadialSampler radial_;
};

// Ratio-of-uniforms sampler for the GIG law. The rectangle is built either
// around the mode or around the origin, whichever has the smaller area;
// nu < 0 is drawn as the reciprocal of the nu > 0 law. Throws DomainError
// when the rectangle cannot be formed in floating point.
class GigSampler {
public:
  explicit GigSampler(const GigModel& m);

  double operator()(RngStream& rng) const;
  // Expected acceptance probability of one proposal.
  double acceptance_rate() const noexcept { return acceptance_; }

private:
  double log_kernel(double y) const;

  double alpha_;
  double eta_;
  double lambda_;  // |nu|
  bool reciprocal_;
  double shift_;
  double log_peak_;
  double v_minus_;
  double v_plus_;
  double acceptance_;
};

// GIGT draws: the IGT path for nu = -1/2, the GIG sampler for g = gauss,
// numeric inverse CDF on x otherwise.
class GigtSampler {
public:
  explicit GigtSampler(const GigtModel& m);

  double operator()(RngStream& rng) const;

private:
  std::shared_ptr<const IgtSampler> igt_;
  std::shared_ptr<const GigSampler> gig_;
  std::shared_ptr<const InverseCdfTable> table_;
};

// Two-component mixture draws: Bernoulli(w), then the component.
class MixtureSampler {
public:
  explicit MixtureSampler(const GigtMixtureModel& m);
  explicit MixtureSampler(const GigMixtureModel& m);
  // Arbitrary weight, for edge cases; components as for the GIGT mixture.
  MixtureSampler(const GigtMixtureModel& m, double weight);

  double weight() const noexcept { return w_; }
  double operator()(RngStream& rng) const;
  // Draw and report the component (0 for nu = 0, 1 for nu = -1).
  double operator()(RngStream& rng, int& component) const;

private:
  double w_;
  std::shared_ptr<const GigtSampler> q0_;
  std::shared_ptr<const GigtSampler> q1_;
  std::shared_ptr<const GigSampler> p0_;
  std::shared_ptr<const GigSampler> p1_;
};

double sample_gaussian(const GaussianModel& m, RngStream& rng);
double sample_gamma(const GammaModel& m, RngStream& rng);

}  // namespace invdiv
