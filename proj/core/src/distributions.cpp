#include "invdiv/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "invdiv/divergence.hpp"
#include "invdiv/errors.hpp"
#include "invdiv/special.hpp"

namespace invdiv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// Turns a probe into (value, status). Divergent refuses; Inconclusive falls
// back to plain quadrature and flags the model.
std::pair<double, AssumptionStatus> settle(const BoundednessVerdict& v, const Integrand& h,
                                           const std::string& what) {
  AssumptionStatus status;
  status.verdict = v.status;
  status.note = v.diagnostics.note;
  if (v.divergent()) throw AssumptionViolated(what + " diverges (" + v.diagnostics.note + ")");
  if (v.finite()) return {*v.value, status};
  try {
    const double value = integrate_halfline(h, 1e-10).value;
    status.note = what + " inconclusive; normalized by plain quadrature: " + status.note;
    return {value, status};
  } catch (const BudgetExhausted&) {
    throw AssumptionViolated(what + " could not be established (" + v.diagnostics.note + ")");
  }
}

// log(w e^a + (1 - w) e^b).
double log_mix(double w, double a, double b) {
  const double la = w > 0.0 ? std::log(w) + a : -kInf;
  const double lb = w < 1.0 ? std::log1p(-w) + b : -kInf;
  const double hi = std::max(la, lb);
  if (hi == -kInf) return -kInf;
  return hi + std::log1p(std::exp(std::min(la, lb) - hi));
}

Integrand radial_integrand(const GeneratingFunction& g, double alpha) {
  return [g, alpha](double t) {
    const double lg = g.log_eval(t);
    if (lg == -kInf) return 0.0;
    return std::exp((alpha - 1.0) * std::log(t) + lg);
  };
}

// The two folded pieces of C_GIGT in the variable s, without the theta^nu factor.
std::pair<Integrand, Integrand> gigt_pieces(double theta, double lambda, double nu,
                                            const GeneratingFunction& g) {
  auto level = [theta, lambda](double s) { return lambda * s * s / (theta * (1.0 + s)); };
  Integrand upper = [=](double s) {
    const double lg = g.log_eval(level(s));
    if (lg == -kInf) return 0.0;
    return std::exp((nu - 1.0) * std::log1p(s) + lg);
  };
  Integrand lower = [=](double s) {
    const double lg = g.log_eval(level(s));
    if (lg == -kInf) return 0.0;
    return std::exp((-nu - 1.0) * std::log1p(s) + lg);
  };
  return {upper, lower};
}

}  // namespace

BoundednessVerdict radial_moment(const GeneratingFunction& g, double alpha) {
  require_positive(alpha, "alpha");
  if (const auto closed = g.radial_moment(alpha)) {
    BoundednessVerdict v;
    v.status = Boundedness::finite;
    v.value = *closed;
    v.diagnostics.note = "closed form";
    return v;
  }
  return probe_boundedness(radial_integrand(g, alpha));
}

// ---------------------------------------------------------------------------
// IGT

IgtModel::IgtModel(double theta, double lambda, GeneratingFunction g)
    : theta_(theta), lambda_(lambda), g_(std::move(g)), c_igt_(0.0) {
  require_positive(theta_, "theta");
  require_positive(lambda_, "lambda");
  const BoundednessVerdict v = radial_moment(g_, 0.5);
  auto [value, status] = settle(v, radial_integrand(g_, 0.5), "C_IGT for g=" + g_.name());
  status.closed_form = g_.c_igt().has_value();
  c_igt_ = value;
  status_ = status;
}

IgtModel::IgtModel(double theta, double lambda, GeneratingFunction g, double c,
                   AssumptionStatus status)
    : theta_(theta), lambda_(lambda), g_(std::move(g)), c_igt_(c), status_(std::move(status)) {}

IgtModel IgtModel::with_theta(double theta) const {
  require_positive(theta, "theta");
  return IgtModel(theta, lambda_, g_, c_igt_, status_);
}

double IgtModel::log_pdf(double x) const {
  const double t = inverse_div(x, theta_, lambda_);
  const double lg = g_.log_eval(t);
  if (lg == -kInf) return -kInf;
  return 0.5 * std::log(lambda_) - 1.5 * std::log(x) + lg - std::log(c_igt_);
}

double IgtModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double igt_pdf(const IgtModel& m, double x) { return m.pdf(x); }
double igt_mean(const IgtModel& m) { return m.mean(); }

double igt_mean_quadrature(const IgtModel& m) {
  QuadratureOptions opts;
  opts.rel_tol = 1e-11;
  return integrate_positive_axis([&](double x) { return x * m.pdf(x); }, m.theta(), opts).value;
}

// ---------------------------------------------------------------------------
// GIGT

BoundednessVerdict gigt_normalizer(double theta, double lambda, double nu,
                                   const GeneratingFunction& g) {
  require_positive(theta, "theta");
  require_positive(lambda, "lambda");
  auto [upper, lower] = gigt_pieces(theta, lambda, nu, g);
  BoundednessVerdict v = combine_sum({probe_boundedness(upper), probe_boundedness(lower)});
  if (v.finite()) {
    const double scale = std::pow(theta, nu);  // x^(nu-1) dx = theta^nu (1+s)^(+-nu-1) ds
    *v.value *= scale;
    v.abs_error *= scale;
  }
  return v;
}

GigtModel::GigtModel(double theta, double lambda, double nu, GeneratingFunction g)
    : theta_(theta), lambda_(lambda), nu_(nu), g_(std::move(g)), c_gigt_(0.0) {
  if (!std::isfinite(nu_)) throw DomainError("nu must be finite");
  const BoundednessVerdict v = gigt_normalizer(theta_, lambda_, nu_, g_);
  auto [upper, lower] = gigt_pieces(theta_, lambda_, nu_, g_);
  const double scale = std::pow(theta_, nu_);
  auto [value, status] =
      settle(v, [&](double s) { return scale * (upper(s) + lower(s)); },
             "C_GIGT(nu=" + std::to_string(nu_) + ") for g=" + g_.name());
  c_gigt_ = value;
  status_ = status;
}

double GigtModel::log_pdf(double x) const {
  const double t = inverse_div(x, theta_, lambda_);
  const double lg = g_.log_eval(t);
  if (lg == -kInf) return -kInf;
  return (nu_ - 1.0) * std::log(x) + lg - std::log(c_gigt_);
}

double GigtModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double gigt_pdf(const GigtModel& m, double x) { return m.pdf(x); }

GigtMixtureModel::GigtMixtureModel(double theta, double lambda, GeneratingFunction g)
    : theta_(theta), lambda_(lambda), g_(std::move(g)), q0_(theta, lambda, 0.0, g_),
      q1_(theta, lambda, -1.0, g_) {
  w_ = q0_.normalizer() / (q0_.normalizer() + theta_ * q1_.normalizer());
}

double GigtMixtureModel::pdf(double x) const {
  return w_ * q0_.pdf(x) + (1.0 - w_) * q1_.pdf(x);
}

double GigtMixtureModel::log_pdf(double x) const {
  return log_mix(w_, q0_.log_pdf(x), q1_.log_pdf(x));
}

GigtMixtureModel GigtMixtureModel::with_theta(double theta) const {
  return GigtMixtureModel(theta, lambda_, g_);
}

double gigt_mixture_pdf(const GigtMixtureModel& m, double x) { return m.pdf(x); }

// ---------------------------------------------------------------------------
// GIG

GigModel::GigModel(double alpha, double eta, double nu) : alpha_(alpha), eta_(eta), nu_(nu) {
  require_positive(alpha_, "alpha");
  require_positive(eta_, "eta");
  if (!std::isfinite(nu_)) throw DomainError("nu must be finite");
  // log of 1 / (eta^nu 2 K_nu(alpha)) with K in scaled form; the e^alpha
  // factor is folded into log_pdf.
  log_norm_ = -nu_ * std::log(eta_) - std::numbers::ln2 - std::log(bessel_k_scaled(nu_, alpha_));
}

double GigModel::log_pdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gig_pdf: x must be positive");
  return log_norm_ + (nu_ - 1.0) * std::log(x) - 0.5 * alpha_ * (x / eta_ + eta_ / x) + alpha_;
}

double GigModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double GigModel::mode() const {
  const double a = nu_ - 1.0;
  return eta_ * (a + std::sqrt(a * a + alpha_ * alpha_)) / alpha_;
}

double GigModel::mean() const {
  return eta_ * bessel_k_scaled(nu_ + 1.0, alpha_) / bessel_k_scaled(nu_, alpha_);
}

double gig_pdf(const GigModel& m, double x) { return m.pdf(x); }

double gig_mixture_weight(double alpha) {
  const double k0 = bessel_k_scaled(0.0, alpha);
  const double k1 = bessel_k_scaled(1.0, alpha);  // K_{-1} = K_1
  return k0 / (k0 + k1);
}

GigMixtureModel::GigMixtureModel(double theta, double lambda)
    : theta_(theta), lambda_(lambda), p0_(lambda / theta, theta, 0.0),
      p1_(lambda / theta, theta, -1.0), w_(gig_mixture_weight(lambda / theta)) {
  require_positive(theta, "theta");
  require_positive(lambda, "lambda");
}

double GigMixtureModel::pdf(double x) const {
  return w_ * p0_.pdf(x) + (1.0 - w_) * p1_.pdf(x);
}

double GigMixtureModel::log_pdf(double x) const {
  return log_mix(w_, p0_.log_pdf(x), p1_.log_pdf(x));
}

// ---------------------------------------------------------------------------
// MIGT

MigtModel::MigtModel(std::vector<double> theta, std::vector<double> lambda, GeneratingFunction g)
    : theta_(std::move(theta)), lambda_(std::move(lambda)), g_(std::move(g)), c_migt_(0.0) {
  if (theta_.empty()) throw DimensionError("MIGT: dimension must be >= 1");
  if (theta_.size() != lambda_.size()) throw DimensionError("MIGT: theta and lambda lengths differ");
  for (std::size_t j = 0; j < theta_.size(); ++j) {
    require_positive(theta_[j], "theta_j");
    require_positive(lambda_[j], "lambda_j");
  }
  const double half_d = 0.5 * static_cast<double>(theta_.size());
  const BoundednessVerdict v = radial_moment(g_, half_d);
  auto [moment, status] = settle(v, radial_integrand(g_, half_d), "C_MIGT for g=" + g_.name());
  status.closed_form = g_.radial_moment(half_d).has_value();
  c_migt_ = std::exp(half_d * std::log(std::numbers::pi) - log_gamma(half_d)) * moment;
  status_ = status;
}

double MigtModel::log_pdf(std::span<const double> x) const {
  if (x.size() != theta_.size()) throw DimensionError("migt_pdf: dimension mismatch");
  const double t = multivariate_inverse_div(x, theta_, lambda_);
  const double lg = g_.log_eval(t);
  if (lg == -kInf) return -kInf;
  double log_prefactor = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    log_prefactor += 0.5 * std::log(lambda_[j]) - 1.5 * std::log(x[j]);
  }
  return log_prefactor + lg - std::log(c_migt_);
}

double MigtModel::pdf(std::span<const double> x) const { return std::exp(log_pdf(x)); }

double migt_pdf(const MigtModel& m, std::span<const double> x) { return m.pdf(x); }

// ---------------------------------------------------------------------------
// Baselines

GaussianModel::GaussianModel(double mean_, double variance_) : mean(mean_), variance(variance_) {
  if (!std::isfinite(mean)) throw DomainError("gaussian: mean must be finite");
  require_positive(variance, "variance");
}

double GaussianModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double GaussianModel::log_pdf(double x) const {
  const double z = x - mean;
  return -0.5 * z * z / variance - 0.5 * std::log(2.0 * std::numbers::pi * variance);
}

GammaModel::GammaModel(double shape_, double mean_) : shape(shape_), mean(mean_) {
  require_positive(shape, "shape");
  require_positive(mean, "mean");
}

double GammaModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double GammaModel::log_pdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma pdf: x must be positive");
  const double rate = shape / mean;
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - log_gamma(shape);
}

double baseline_pdf(BaselineFamily family, double theta, double param, double x) {
  switch (family) {
    case BaselineFamily::gaussian: return GaussianModel(theta, param).pdf(x);
    case BaselineFamily::gamma: return GammaModel(param, theta).pdf(x);
  }
  return 0.0;
}

}  // namespace invdiv
