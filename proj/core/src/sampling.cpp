#include "invdiv/sampling.hpp"

#include <cmath>
#include <limits>

#include "invdiv/errors.hpp"
#include "invdiv/special.hpp"

namespace invdiv {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// Branch pick shared by the IGT and MIGT samplers.
double pick_branch(double t, double theta, double lambda, RngStream& rng) {
  const RootPair r = solve_root_pair(t, theta, lambda);
  return rng.uniform() * (theta + r.x_low) < theta ? r.x_low : r.x_high;
}

// Root of a strictly decreasing function on (lo, hi) by bisection, with hi
// grown until the sign changes. Used for the ratio-of-uniforms bounds.
template <class F>
double decreasing_root(F&& fn, double lo, double hi) {
  int grow = 0;
  while (fn(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 2000 || !std::isfinite(hi)) return std::numeric_limits<double>::quiet_NaN();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fn(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RootPair solve_root_pair(double t, double theta, double lambda) {
  require_positive(theta, "theta");
  require_positive(lambda, "lambda");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("level t must be >= 0 and finite");
  const double a = theta * t;
  const double x_high = theta / (2.0 * lambda) * (a + 2.0 * lambda + std::sqrt(a * (a + 4.0 * lambda)));
  return RootPair{theta * (theta / x_high), x_high, t, theta, lambda};
}

double root_h(double x, double theta) { return std::sqrt(x) / (x + theta); }

double root_h_level(double t, double theta, double lambda) {
  return std::sqrt(lambda) / theta / std::sqrt(t + 4.0 * lambda / theta);
}

RadialSampler::RadialSampler(GeneratingFunction g, double alpha) : g_(std::move(g)), alpha_(alpha) {
  require_positive(alpha, "alpha");
  if (g_.is_gauss_kernel()) return;
  const BoundednessVerdict moment = radial_moment(g_, alpha);
  if (moment.divergent()) {
    throw AssumptionViolated("radial law of " + g_.name() + " is not normalizable (" +
                             moment.diagnostics.note + ")");
  }
  table_ = std::make_shared<const InverseCdfTable>(
      [g = g_, alpha](double t) {
        const double lg = g.log_eval(t);
        if (lg == -std::numeric_limits<double>::infinity()) return 0.0;
        return std::exp((alpha - 1.0) * std::log(t) + lg);
      },
      1.0);
}

double RadialSampler::operator()(RngStream& rng) const {
  if (table_) return table_->quantile(rng.uniform());
  if (alpha_ == 0.5) {
    const double z = rng.normal();
    return z * z;
  }
  return 2.0 * rng.gamma(alpha_);
}

IgtSampler::IgtSampler(const IgtModel& m)
    : theta_(m.theta()), lambda_(m.lambda()), radial_(m.g(), 0.5) {}

double IgtSampler::operator()(RngStream& rng) const {
  return pick_branch(radial_(rng), theta_, lambda_, rng);
}

MigtSampler::MigtSampler(const MigtModel& m)
    : theta_(m.theta()), lambda_(m.lambda()), radial_(m.g(), 0.5 * static_cast<double>(m.dim())) {}

void MigtSampler::operator()(RngStream& rng, std::span<double> out) const {
  const std::size_t d = dim();
  if (out.size() != d) throw DimensionError("MigtSampler: output has wrong length");
  const double r = radial_(rng);
  if (d == 1) {
    out[0] = pick_branch(r, theta_[0], lambda_[0], rng);
    return;
  }
  // Dirichlet(1/2, ..., 1/2) from normalized Gamma(1/2) variates.
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = rng.gamma(0.5);
    total += out[j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = pick_branch(r * (out[j] / total), theta_[j], lambda_[j], rng);
  }
}

std::vector<double> MigtSampler::operator()(RngStream& rng) const {
  std::vector<double> out(dim());
  (*this)(rng, out);
  return out;
}

// Standardized kernel y^(lambda-1) exp(-(alpha/2)(y + 1/y)), lambda = |nu|.
double GigSampler::log_kernel(double y) const {
  return (lambda_ - 1.0) * std::log(y) - 0.5 * alpha_ * (y + 1.0 / y);
}

GigSampler::GigSampler(const GigModel& m)
    : alpha_(m.alpha()), eta_(m.eta()), lambda_(std::abs(m.nu())), reciprocal_(m.nu() < 0.0) {
  const double a = alpha_;
  const double l = lambda_;
  const double mode = ((l - 1.0) + std::sqrt((l - 1.0) * (l - 1.0) + a * a)) / a;
  log_peak_ = log_kernel(mode);

  // d/dy log((y - s) sqrt(kernel(y))) on either side of the shift s.
  auto bounds = [&](double s, double& vm, double& vp) {
    auto slope = [&](double y) {
      return 1.0 / (y - s) + 0.5 * ((l - 1.0) / y - 0.5 * a * (1.0 - 1.0 / (y * y)));
    };
    const double yp = decreasing_root(slope, std::max(s, 1e-300), std::max(2.0 * s, 1.0));
    vp = (yp - s) * std::exp(0.5 * (log_kernel(yp) - log_peak_));
    vm = 0.0;
    if (s > 0.0) {
      // On (0, s) the slope runs from +inf to -inf; bisect directly.
      double lo = 0.0;
      double hi = s;
      for (int i = 0; i < 200 && hi - lo > 1e-15 * s; ++i) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
      }
      const double ym = 0.5 * (lo + hi);
      vm = (ym - s) * std::exp(0.5 * (log_kernel(ym) - log_peak_));
    }
  };

  double vm0 = 0.0, vp0 = 0.0, vm1 = 0.0, vp1 = 0.0;
  bounds(0.0, vm0, vp0);
  bounds(mode, vm1, vp1);
  const bool ok0 = std::isfinite(vp0) && vp0 > 0.0;
  const bool ok1 = std::isfinite(vp1) && std::isfinite(vm1) && vp1 - vm1 > 0.0;
  if (!ok0 && !ok1) throw DomainError("GigSampler: cannot build the ratio-of-uniforms rectangle");
  if (ok1 && (!ok0 || vp1 - vm1 < vp0 - vm0)) {
    shift_ = mode;
    v_minus_ = vm1;
    v_plus_ = vp1;
  } else {
    shift_ = 0.0;
    v_minus_ = vm0;
    v_plus_ = vp0;
  }
  // Region area is half the kernel mass 2 K_lambda(alpha) / peak.
  acceptance_ = std::exp(std::log(bessel_k_scaled(l, a)) - a - log_peak_) / (v_plus_ - v_minus_);
  if (!(acceptance_ > 0.0) || !std::isfinite(acceptance_)) {
    throw DomainError("GigSampler: degenerate envelope");
  }
}

double GigSampler::operator()(RngStream& rng) const {
  for (;;) {
    const double u = rng.uniform();
    const double v = v_minus_ + rng.uniform() * (v_plus_ - v_minus_);
    const double y = v / u + shift_;
    if (!(y > 0.0)) continue;
    if (2.0 * std::log(u) <= log_kernel(y) - log_peak_) {
      return eta_ * (reciprocal_ ? 1.0 / y : y);
    }
  }
}

GigtSampler::GigtSampler(const GigtModel& m) {
  if (m.nu() == -0.5) {
    igt_ = std::make_shared<const IgtSampler>(IgtModel(m.theta(), m.lambda(), m.g()));
  } else if (m.g().is_gauss_kernel()) {
    // x^(nu-1) exp(-lambda (x-theta)^2 / (2 theta^2 x)) is GIG(lambda/theta, theta, nu).
    gig_ = std::make_shared<const GigSampler>(GigModel(m.lambda() / m.theta(), m.theta(), m.nu()));
  } else {
    GigtModel model = m;
    table_ = std::make_shared<const InverseCdfTable>([model](double x) { return model.pdf(x); },
                                                     m.theta());
  }
}

double GigtSampler::operator()(RngStream& rng) const {
  if (igt_) return (*igt_)(rng);
  if (gig_) return (*gig_)(rng);
  return table_->quantile(rng.uniform());
}

MixtureSampler::MixtureSampler(const GigtMixtureModel& m) : MixtureSampler(m, m.weight()) {}

MixtureSampler::MixtureSampler(const GigtMixtureModel& m, double weight) : w_(weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
  q0_ = std::make_shared<const GigtSampler>(m.component0());
  q1_ = std::make_shared<const GigtSampler>(m.component1());
}

MixtureSampler::MixtureSampler(const GigMixtureModel& m) : w_(m.weight()) {
  p0_ = std::make_shared<const GigSampler>(m.component0());
  p1_ = std::make_shared<const GigSampler>(m.component1());
}

double MixtureSampler::operator()(RngStream& rng) const {
  int component = 0;
  return (*this)(rng, component);
}

double MixtureSampler::operator()(RngStream& rng, int& component) const {
  component = rng.uniform() < w_ ? 0 : 1;
  if (p0_) return component == 0 ? (*p0_)(rng) : (*p1_)(rng);
  return component == 0 ? (*q0_)(rng) : (*q1_)(rng);
}

double sample_gaussian(const GaussianModel& m, RngStream& rng) {
  return m.mean + std::sqrt(m.variance) * rng.normal();
}

double sample_gamma(const GammaModel& m, RngStream& rng) {
  return m.mean / m.shape * rng.gamma(m.shape);
}

}  // namespace invdiv
