#pragma once

#include <span>
#include <string>
#include <vector>

#include "invdiv/boundedness.hpp"
#include "invdiv/functions.hpp"

namespace invdiv {

// Outcome of the existence check run when a model is constructed. A
// Divergent normalizer refuses construction (AssumptionViolated); an
// Inconclusive one constructs the model with `flagged` set.
struct AssumptionStatus {
  Boundedness verdict = Boundedness::finite;
  bool closed_form = false;
  std::string note;

  bool flagged() const noexcept { return verdict == Boundedness::inconclusive; }
};

// M(alpha) = int_0^inf t^(alpha-1) g(t) dt, the normalizer of the radial law
// t^(alpha-1) g(t) / M(alpha). Closed form when g carries one, else probed.
BoundednessVerdict radial_moment(const GeneratingFunction& g, double alpha);

// Inverse Gaussian type law on (0, inf):
//
//   p(x) = (1 / C_IGT) sqrt(lambda / x^3) g(d(x, theta)),
//   C_IGT = int_0^inf t^(-1/2) g(t) dt.
//
// E[X] = theta for every admissible g.
class IgtModel {
public:
  IgtModel(double theta, double lambda, GeneratingFunction g);

  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  const GeneratingFunction& g() const noexcept { return g_; }
  double normalizer() const noexcept { return c_igt_; }
  const AssumptionStatus& assumption() const noexcept { return status_; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  // theta; see igt_mean_quadrature for the numerical check.
  double mean() const noexcept { return theta_; }

  IgtModel with_theta(double theta) const;

private:
  IgtModel(double theta, double lambda, GeneratingFunction g, double c, AssumptionStatus status);

  double theta_;
  double lambda_;
  GeneratingFunction g_;
  double c_igt_;
  AssumptionStatus status_;
};

double igt_pdf(const IgtModel& m, double x);
double igt_mean(const IgtModel& m);
// int_0^inf x p(x) dx by quadrature.
double igt_mean_quadrature(const IgtModel& m);

// Generalized IGT law q(x) = x^(nu-1) g(d(x, theta)) / C_GIGT(theta, lambda, nu).
// The normalizer is always computed by quadrature.
class GigtModel {
public:
  GigtModel(double theta, double lambda, double nu, GeneratingFunction g);

  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  double nu() const noexcept { return nu_; }
  const GeneratingFunction& g() const noexcept { return g_; }
  double normalizer() const noexcept { return c_gigt_; }
  const AssumptionStatus& assumption() const noexcept { return status_; }

  double pdf(double x) const;
  double log_pdf(double x) const;

private:
  double theta_;
  double lambda_;
  double nu_;
  GeneratingFunction g_;
  double c_gigt_;
  AssumptionStatus status_;
};

double gigt_pdf(const GigtModel& m, double x);

// Probe of C_GIGT(theta, lambda, nu) = int_0^inf x^(nu-1) g(d(x, theta)) dx.
// The integral is folded at theta (x -> theta^2/x leaves d unchanged) into
// two half-line integrals in s with x = theta (1 + s):
//   theta^nu int (1+s)^(nu-1) g(d_s) ds  +  theta^nu int (1+s)^(-nu-1) g(d_s) ds,
// d_s = lambda s^2 / (theta (1 + s)).
BoundednessVerdict gigt_normalizer(double theta, double lambda, double nu,
                                   const GeneratingFunction& g);

// w q(x | nu = 0) + (1 - w) q(x | nu = -1) with
// w = C_GIGT(0) / (C_GIGT(0) + theta C_GIGT(-1)). w depends on theta and is
// recomputed by with_theta.
class GigtMixtureModel {
public:
  GigtMixtureModel(double theta, double lambda, GeneratingFunction g);

  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  const GeneratingFunction& g() const noexcept { return g_; }
  double weight() const noexcept { return w_; }
  const GigtModel& component0() const noexcept { return q0_; }
  const GigtModel& component1() const noexcept { return q1_; }
  bool flagged() const noexcept { return q0_.assumption().flagged() || q1_.assumption().flagged(); }

  double pdf(double x) const;
  double log_pdf(double x) const;
  GigtMixtureModel with_theta(double theta) const;

private:
  double theta_;
  double lambda_;
  GeneratingFunction g_;
  GigtModel q0_;
  GigtModel q1_;
  double w_;
};

double gigt_mixture_pdf(const GigtMixtureModel& m, double x);

// Generalized inverse Gaussian
//   p(x) = eta^(-nu) x^(nu-1) / (2 K_nu(alpha)) exp(-(alpha/2)(x/eta + eta/x)).
class GigModel {
public:
  GigModel(double alpha, double eta, double nu);

  double alpha() const noexcept { return alpha_; }
  double eta() const noexcept { return eta_; }
  double nu() const noexcept { return nu_; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  double mode() const;
  double mean() const;

private:
  double alpha_;
  double eta_;
  double nu_;
  double log_norm_;
};

double gig_pdf(const GigModel& m, double x);

// GIG mixture w GIG(alpha, theta, 0) + (1 - w) GIG(alpha, theta, -1),
// alpha = lambda / theta, w = K_0(alpha) / (K_0(alpha) + K_1(alpha)).
class GigMixtureModel {
public:
  GigMixtureModel(double theta, double lambda);

  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  double weight() const noexcept { return w_; }
  const GigModel& component0() const noexcept { return p0_; }
  const GigModel& component1() const noexcept { return p1_; }

  double pdf(double x) const;
  double log_pdf(double x) const;

private:
  double theta_;
  double lambda_;
  GigModel p0_;
  GigModel p1_;
  double w_;
};

double gig_mixture_weight(double alpha);

// Multivariate IGT on (0, inf)^d built on the summed inverse divergence:
//
//   p(x) = (1 / C_MIGT) prod_j sqrt(lambda_j / x_j^3) g(sum_j d(x_j, theta_j)),
//   C_MIGT = pi^(d/2) / Gamma(d/2) int_0^inf g(t) t^((d-2)/2) dt.
class MigtModel {
public:
  MigtModel(std::vector<double> theta, std::vector<double> lambda, GeneratingFunction g);

  std::size_t dim() const noexcept { return theta_.size(); }
  const std::vector<double>& theta() const noexcept { return theta_; }
  const std::vector<double>& lambda() const noexcept { return lambda_; }
  const GeneratingFunction& g() const noexcept { return g_; }
  double normalizer() const noexcept { return c_migt_; }
  const AssumptionStatus& assumption() const noexcept { return status_; }

  double pdf(std::span<const double> x) const;
  double log_pdf(std::span<const double> x) const;

private:
  std::vector<double> theta_;
  std::vector<double> lambda_;
  GeneratingFunction g_;
  double c_migt_;
  AssumptionStatus status_;
};

double migt_pdf(const MigtModel& m, std::span<const double> x);

// Baselines parameterized by their mean theta.
struct GaussianModel {
  double mean;
  double variance;

  GaussianModel(double mean, double variance);
  double pdf(double x) const;
  double log_pdf(double x) const;
};

// (k/theta)^k x^(k-1) exp(-k x / theta) / Gamma(k); mean theta.
struct GammaModel {
  double shape;
  double mean;

  GammaModel(double shape, double mean);
  double pdf(double x) const;
  double log_pdf(double x) const;
};

enum class BaselineFamily { gaussian, gamma };
double baseline_pdf(BaselineFamily family, double theta, double param, double x);

}  // namespace invdiv
