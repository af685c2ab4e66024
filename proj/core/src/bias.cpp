#include "invdiv/bias.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "invdiv/conditions.hpp"
#include "invdiv/divergence.hpp"
#include "invdiv/errors.hpp"
#include "invdiv/special.hpp"
#include "parallel.hpp"

namespace invdiv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// f'(d) p from log p, so that an overflowing f' against an underflowing
// density still gives the right product.
double weighted_density(const FFunction& f, double d, double log_p) {
  if (log_p == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(f.log_deriv(d) + log_p);
}

// Scale that makes the half-axis variable s comparable to the divergence
// level: far from theta, d grows like lambda x / theta^2 and like lambda / x.
double axis_scale(double theta, double lambda) { return std::max(1.0, theta / lambda); }

std::pair<DivergenceKind, std::vector<double>> natural_divergence(const ModelSpec& m) {
  return std::visit(
      Overloaded{
          [](const IgtModel& x) { return std::pair{DivergenceKind::inverse, std::vector{x.lambda()}}; },
          [](const GigtModel& x) { return std::pair{DivergenceKind::inverse, std::vector{x.lambda()}}; },
          [](const GigtMixtureModel& x) {
            return std::pair{DivergenceKind::inverse, std::vector{x.lambda()}};
          },
          [](const GigModel& x) {
            return std::pair{DivergenceKind::inverse, std::vector{x.alpha() * x.eta()}};
          },
          [](const GigMixtureModel& x) {
            return std::pair{DivergenceKind::inverse, std::vector{x.lambda()}};
          },
          [](const MigtModel& x) { return std::pair{DivergenceKind::multivariate_inverse, x.lambda()}; },
          [](const GaussianModel& x) {
            return std::pair{DivergenceKind::squared, std::vector{x.variance}};
          },
          [](const GammaModel& x) {
            return std::pair{DivergenceKind::itakura_saito, std::vector{x.shape}};
          },
      },
      m.model());
}

double score_divergence(DivergenceKind kind, const std::vector<double>& lambda,
                        std::span<const double> x, std::span<const double> theta) {
  switch (kind) {
    case DivergenceKind::inverse: return inverse_div(x[0], theta[0], lambda[0]);
    case DivergenceKind::multivariate_inverse: return multivariate_inverse_div(x, theta, lambda);
    case DivergenceKind::squared: return squared_div(x[0], theta[0], lambda[0]);
    case DivergenceKind::itakura_saito: return itakura_saito_div(x[0], theta[0], lambda[0]);
  }
  return 0.0;
}

BiasReport blank_report(const BiasQuery& q, BiasMethod method) {
  BiasReport r;
  r.model = q.model.spelling();
  r.f = q.f.name();
  r.divergence = to_string(q.divergence);
  r.method = method;
  return r;
}

void append_note(std::string& note, const std::string& more) {
  if (!note.empty()) note += "; ";
  note += more;
}

// ---- MIGT orthant split -------------------------------------------------
//
// Coordinate j runs over its upper half x_j = theta_j (1 + c_j s_j) when
// bit j of `mask` is set and over its lower half x_j = theta_j / (1 + c_j s_j)
// otherwise, s_j in [0, inf).
struct OrthantSplit {
  const MigtModel& model;
  const FFunction& f;
  std::array<double, 3> c{};

  OrthantSplit(const MigtModel& m, const FFunction& ff) : model(m), f(ff) {
    for (std::size_t j = 0; j < m.dim(); ++j) c[j] = axis_scale(m.theta()[j], m.lambda()[j]);
  }

  // f'(D) p(x) |dx/ds| at s; the offsets |x_j - theta_j| go to `gap`.
  double weight(std::span<const double> s, unsigned mask, std::array<double, 3>& gap) const {
    const std::size_t d = model.dim();
    std::array<double, 3> x{};
    double jac = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double th = model.theta()[j];
      const double cs = c[j] * s[j];
      if (mask & (1u << j)) {
        x[j] = th * (1.0 + cs);
        jac *= th * c[j];
        gap[j] = th * cs;
      } else {
        const double q = 1.0 / (1.0 + cs);
        x[j] = th * q;
        jac *= th * c[j] * q * q;
        gap[j] = th * cs * q;
      }
    }
    const std::span<const double> xs(x.data(), d);
    const double level = multivariate_inverse_div(xs, model.theta(), model.lambda());
    return weighted_density(f, level, model.log_pdf(xs)) * jac;
  }

  // int over the piece of w(s) * (component < 0 ? 1 : gap[component]).
  QuadratureResult integrate(unsigned mask, int component, double tol) const {
    return integrate_orthant(
        model.dim(),
        [&](std::span<const double> s) {
          std::array<double, 3> gap{};
          const double w = weight(s, mask, gap);
          return component < 0 ? w : w * gap[static_cast<std::size_t>(component)];
        },
        tol);
  }
};

BiasReport migt_bias_quadrature(const BiasQuery& q, const MigtModel& m) {
  BiasReport r = blank_report(q, BiasMethod::quadrature);
  const std::size_t d = m.dim();
  if (d > 3) {
    r.note = "quadrature limited to d <= 3";
    return r;
  }
  const bool matched = q.divergence == DivergenceKind::multivariate_inverse && q.lambda == m.lambda();
  if (!matched) {
    r.note = "MIGT quadrature scores with the model's own divergence only";
    return r;
  }
  const double tol = d <= 2 ? 1e-10 : 1e-6;
  OrthantSplit split(m, q.f);
  r.bias.assign(d, 0.0);
  r.abs_error.assign(d, 0.0);
  double norm = 0.0, norm_err = 0.0;
  try {
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      const QuadratureResult e = split.integrate(mask, -1, tol);
      norm += e.value;
      norm_err += e.abs_error_estimate;
      for (std::size_t k = 0; k < d; ++k) {
        const QuadratureResult part = split.integrate(mask, static_cast<int>(k), tol);
        r.bias[k] += (mask & (1u << k)) ? part.value : -part.value;
        r.abs_error[k] += part.abs_error_estimate;
      }
    }
  } catch (const BudgetExhausted& e) {
    r.bias.clear();
    r.abs_error.clear();
    r.note = std::string("quadrature did not converge: ") + e.what();
    return r;
  }
  r.normalizer = norm;
  const double threshold = (d <= 2 ? 1e-8 : 1e-5) * (1.0 + norm);
  bool vanish = true;
  for (double b : r.bias) vanish = vanish && std::abs(b) <= threshold;
  r.verdict = vanish ? BiasVerdict::vanishes : BiasVerdict::nonzero;
  return r;
}

// ---- scalar models ------------------------------------------------------

struct ScalarHalves {
  Integrand upper_gap;  // f'(d) (x - theta) p(x) dx/ds on x > theta
  Integrand lower_gap;  // f'(d) (theta - x) p(x) |dx/ds| on x < theta
  Integrand upper;      // f'(d) p(x) dx/ds
  Integrand lower;
};

ScalarHalves scalar_halves(const BiasQuery& q) {
  const double theta = q.model.location()[0];
  const auto& spec = q.model;
  const FFunction& f = q.f;
  const DivergenceKind kind = q.divergence;
  const std::vector<double> lambda = q.lambda;
  auto score = [=, &spec, &f](double x, double jac, double gap) {
    const std::array<double, 1> xs{x}, th{theta};
    const double level = score_divergence(kind, lambda, xs, th);
    return weighted_density(f, level, spec.log_pdf(x)) * jac * gap;
  };
  ScalarHalves h;
  if (spec.family() == ModelSpec::Family::gaussian) {
    const double c = std::sqrt(std::get<GaussianModel>(spec.model()).variance);
    h.upper_gap = [=](double s) { return score(theta + c * s, c, c * s); };
    h.lower_gap = [=](double s) { return score(theta - c * s, c, c * s); };
    h.upper = [=](double s) { return score(theta + c * s, c, 1.0); };
    h.lower = [=](double s) { return score(theta - c * s, c, 1.0); };
    return h;
  }
  const double c = kind == DivergenceKind::inverse ? axis_scale(theta, lambda[0]) : 1.0;
  h.upper_gap = [=](double s) { return score(theta * (1.0 + c * s), theta * c, theta * c * s); };
  h.lower_gap = [=](double s) {
    const double v = 1.0 / (1.0 + c * s);
    return score(theta * v, theta * c * v * v, theta * c * s * v);
  };
  h.upper = [=](double s) { return score(theta * (1.0 + c * s), theta * c, 1.0); };
  h.lower = [=](double s) {
    const double v = 1.0 / (1.0 + c * s);
    return score(theta * v, theta * c * v * v, 1.0);
  };
  return h;
}

std::string describe(const char* what, const BoundednessVerdict& v) {
  return std::string(what) + " " + to_string(v.status) + " (" + v.diagnostics.note + ")";
}

}  // namespace

std::string to_string(BiasMethod m) {
  return m == BiasMethod::quadrature ? "quadrature" : "monte_carlo";
}

std::string to_string(BiasVerdict v) {
  switch (v) {
    case BiasVerdict::vanishes: return "vanishes";
    case BiasVerdict::nonzero: return "nonzero";
    case BiasVerdict::undetermined: return "undetermined";
  }
  return "?";
}

BiasQuery::BiasQuery(ModelSpec model_, FFunction f_)
    : model(std::move(model_)), f(std::move(f_)), divergence(DivergenceKind::inverse) {
  auto [kind, lam] = natural_divergence(model);
  divergence = kind;
  lambda = std::move(lam);
}

BiasQuery::BiasQuery(ModelSpec model_, FFunction f_, DivergenceKind divergence_,
                     std::vector<double> lambda_)
    : model(std::move(model_)), f(std::move(f_)), divergence(divergence_), lambda(std::move(lambda_)) {
  const std::size_t want = divergence == DivergenceKind::multivariate_inverse ? model.dim() : 1;
  if (lambda.size() == 1 && want > 1) lambda.assign(want, lambda[0]);
  if (lambda.size() != want) throw DimensionError("BiasQuery: lambda has wrong length");
  if (divergence != DivergenceKind::multivariate_inverse && model.dim() != 1) {
    throw DimensionError("BiasQuery: scalar divergence on a vector model");
  }
  for (double l : lambda) {
    if (!(l > 0.0)) throw DomainError("BiasQuery: lambda must be > 0");
  }
  if (model.family() == ModelSpec::Family::gaussian && divergence != DivergenceKind::squared) {
    throw DomainError("BiasQuery: the Gaussian baseline can only be scored with the squared divergence");
  }
}

BiasReport bias_quadrature(const BiasQuery& q) {
  if (const auto* m = std::get_if<MigtModel>(&q.model.model())) return migt_bias_quadrature(q, *m);

  BiasReport r = blank_report(q, BiasMethod::quadrature);
  const ScalarHalves h = scalar_halves(q);
  const BoundednessVerdict up = probe_boundedness(h.upper_gap);
  const BoundednessVerdict lo = probe_boundedness(h.lower_gap);
  const BoundednessVerdict nu = probe_boundedness(h.upper);
  const BoundednessVerdict nl = probe_boundedness(h.lower);
  if (nu.finite() && nl.finite()) {
    r.normalizer = *nu.value + *nl.value;
  } else {
    append_note(r.note, "E[f'] not shown finite: " + describe("upper", nu) + ", " + describe("lower", nl));
  }
  if (!up.finite() || !lo.finite()) {
    append_note(r.note, describe("positive part", up) + ", " + describe("negative part", lo));
    return r;
  }
  r.bias = {*up.value - *lo.value};
  r.abs_error = {up.abs_error + lo.abs_error};
  if (!r.normalizer) return r;
  const bool vanish = std::abs(r.bias[0]) <= 1e-8 * (1.0 + *r.normalizer);
  r.verdict = vanish ? BiasVerdict::vanishes : BiasVerdict::nonzero;
  return r;
}

BiasReport bias_monte_carlo(const BiasQuery& q, const MonteCarloOptions& opts, RngStream& rng) {
  if (opts.n == 0) throw DomainError("bias_monte_carlo: n must be >= 1");
  if (opts.blocks == 0) throw DomainError("bias_monte_carlo: blocks must be >= 1");
  BiasReport r = blank_report(q, BiasMethod::monte_carlo);
  r.samples = opts.n;
  const std::size_t d = q.model.dim();
  const std::vector<double> theta = q.model.location();
  const ModelSampler sampler(q.model);
  const std::uint64_t block_seed = rng.next_u64();
  const std::size_t blocks = std::min(opts.blocks, opts.n);

  struct Block {
    std::vector<double> sum, sum_sq, max_sq;
    double weight_sum = 0.0;
    bool finite = true;
  };
  std::vector<Block> out(blocks);
  detail::parallel_for(blocks, opts.threads, [&](std::size_t b) {
    const std::size_t count = opts.n / blocks + (b < opts.n % blocks ? 1 : 0);
    RngStream stream(block_seed, b);
    Block& blk = out[b];
    blk.sum.assign(d, 0.0);
    blk.sum_sq.assign(d, 0.0);
    blk.max_sq.assign(d, 0.0);
    std::vector<double> x(d), terms(count), w(count);
    std::vector<std::vector<double>> cols(d, std::vector<double>(count));
    for (std::size_t i = 0; i < count; ++i) {
      sampler.draw(stream, x);
      const double wi = q.f.deriv(score_divergence(q.divergence, q.lambda, x, theta));
      w[i] = wi;
      for (std::size_t j = 0; j < d; ++j) cols[j][i] = wi * (x[j] - theta[j]);
    }
    blk.weight_sum = pairwise_sum(w);
    for (std::size_t j = 0; j < d; ++j) {
      blk.sum[j] = pairwise_sum(cols[j]);
      for (std::size_t i = 0; i < count; ++i) {
        const double sq = cols[j][i] * cols[j][i];
        terms[i] = sq;
        blk.max_sq[j] = std::max(blk.max_sq[j], sq);
      }
      blk.sum_sq[j] = pairwise_sum(terms);
      blk.finite = blk.finite && std::isfinite(blk.sum[j]) && std::isfinite(blk.sum_sq[j]);
    }
    blk.finite = blk.finite && std::isfinite(blk.weight_sum);
  });

  const double n = static_cast<double>(opts.n);
  std::vector<double> parts(blocks);
  bool finite = true;
  for (const Block& blk : out) finite = finite && blk.finite;
  for (std::size_t b = 0; b < blocks; ++b) parts[b] = out[b].weight_sum;
  r.normalizer = pairwise_sum(parts) / n;
  r.bias.resize(d);
  std::vector<double> se(d);
  bool vanish = true, heavy = false;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t b = 0; b < blocks; ++b) parts[b] = out[b].sum[j];
    const double mean = pairwise_sum(parts) / n;
    for (std::size_t b = 0; b < blocks; ++b) parts[b] = out[b].sum_sq[j];
    const double sum_sq = pairwise_sum(parts);
    double max_sq = 0.0;
    for (const Block& blk : out) max_sq = std::max(max_sq, blk.max_sq[j]);
    // The delete-one jackknife variance of a sample mean is s^2 / n.
    const double var = opts.n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    r.bias[j] = mean;
    se[j] = std::sqrt(var / n);
    vanish = vanish && std::abs(mean) <= 4.0 * se[j];
    if (opts.n >= 1000 && sum_sq > 0.0 && max_sq > 0.05 * sum_sq) heavy = true;
  }
  r.standard_error = se;
  if (!finite) {
    r.note = "non-finite terms in the sample";
    r.verdict = BiasVerdict::undetermined;
  } else if (heavy) {
    r.note = "nonconvergent second moment: a single draw dominates the sum of squares";
    r.verdict = BiasVerdict::undetermined;
  } else {
    r.verdict = vanish ? BiasVerdict::vanishes : BiasVerdict::nonzero;
  }
  return r;
}

LemmaReport verify_lemma(Lemma which, int m, std::vector<double> alphas,
                         const std::function<double(double)>& u, std::size_t samples,
                         std::uint64_t seed) {
  if (m < 1) throw DomainError("verify_lemma: m must be >= 1");
  if (which == Lemma::lemma2 && alphas.empty()) alphas.assign(static_cast<std::size_t>(m), 0.5);
  if (alphas.size() != static_cast<std::size_t>(m)) throw DimensionError("verify_lemma: need m alphas");
  for (double a : alphas) {
    if (!(a > 0.0)) throw DomainError("verify_lemma: alphas must be > 0");
    if (which == Lemma::lemma2 && a != 0.5) throw DomainError("verify_lemma: lemma2 fixes alpha = 1/2");
  }
  LemmaReport r;
  double total = 0.0, log_prefactor = 0.0;
  for (double a : alphas) {
    total += a;
    log_prefactor += log_gamma(a);
  }
  log_prefactor -= log_gamma(total);
  const QuadratureResult rhs =
      integrate_halfline([&](double t) { return u(t) * std::pow(t, total - 1.0); }, 1e-12);
  const double pre = std::exp(log_prefactor);
  r.rhs = pre * rhs.value;
  r.rhs_error = pre * rhs.abs_error_estimate;

  if (m <= 3) {
    const QuadratureResult lhs = integrate_orthant(
        static_cast<std::size_t>(m),
        [&](std::span<const double> t) {
          double sum = 0.0, w = 1.0;
          for (std::size_t j = 0; j < t.size(); ++j) {
            sum += t[j];
            w *= std::pow(t[j], alphas[j] - 1.0);
          }
          return w == 0.0 ? 0.0 : u(sum) * w;
        },
        1e-10);
    r.lhs = lhs.value;
    r.lhs_error = lhs.abs_error_estimate;
    r.lhs_method = "iterated quadrature";
  } else {
    // Independent per-coordinate proposals: an even mixture of beta-prime
    // laws BP(alpha_j, 2) for the bulk and BP(alpha_j, kappa) for the tail,
    // where BP(a, b) has density t^(a-1) (1+t)^(-a-b) / B(a, b) and is drawn
    // as Gamma(a) / Gamma(b). The weight u(sum t) / prod q_j(t_j) has finite
    // variance when u(t) = O(t^-p) with p > sum alpha + m kappa / 2.
    constexpr double kappa = 0.1;
    constexpr double bulk = 2.0;
    RngStream rng(seed, 0);
    auto log_gamma_variate = [&](double shape) {
      if (shape >= 1.0) return std::log(rng.gamma(shape));
      return std::log(rng.gamma(shape + 1.0)) + std::log(rng.uniform()) / shape;
    };
    auto log_beta = [](double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); };
    std::vector<double> terms(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      double sum = 0.0, log_w = 0.0;
      for (double a : alphas) {
        const double b = rng.bernoulli(0.5) ? bulk : kappa;
        const double t = std::exp(log_gamma_variate(a) - log_gamma_variate(b));
        sum += t;
        // log q(t) = (a-1) log t + log(1/2 (1+t)^(-a-bulk)/B(a,bulk) + 1/2 (1+t)^(-a-kappa)/B(a,kappa))
        const double l1 = -(a + bulk) * std::log1p(t) - log_beta(a, bulk);
        const double l2 = -(a + kappa) * std::log1p(t) - log_beta(a, kappa);
        const double hi = std::max(l1, l2);
        const double log_q = (a - 1.0) * std::log(t) + std::log(0.5) + hi +
                             std::log(std::exp(l1 - hi) + std::exp(l2 - hi));
        log_w += (a - 1.0) * std::log(t) - log_q;
      }
      const double uv = std::isfinite(sum) ? u(sum) : 0.0;
      terms[i] = uv == 0.0 ? 0.0 : uv * std::exp(log_w);
    }
    const double n = static_cast<double>(samples);
    const double mean = pairwise_sum(terms) / n;
    for (double& t : terms) t = (t - mean) * (t - mean);
    r.lhs = mean;
    r.lhs_error = std::sqrt(pairwise_sum(terms) / (n * (n - 1.0)));
    r.lhs_method = "importance sampling";
  }
  r.rel_diff = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
  return r;
}

AppendixBReport verify_appendix_b_reduction(const MigtModel& m, const FFunction& f, std::size_t k) {
  const std::size_t d = m.dim();
  if (d < 2 || d > 3) throw DomainError("verify_appendix_b_reduction: needs 2 <= d <= 3");
  if (k >= d) throw DomainError("verify_appendix_b_reduction: coordinate index out of range");
  AppendixBReport r;
  const double tol = d == 2 ? 1e-10 : 1e-5;
  OrthantSplit split(m, f);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    const QuadratureResult part = split.integrate(mask, static_cast<int>(k), tol);
    ((mask & (1u << k)) ? r.positive_part : r.negative_part) += part.value;
    r.direct_error += part.abs_error_estimate;
  }
  r.signed_expectation = r.positive_part - r.negative_part;

  const double theta = m.theta()[k];
  const double a = 4.0 * m.lambda()[k] / theta;
  const double p = 0.5 * (static_cast<double>(d) - 3.0);
  const GeneratingFunction& g = m.g();
  const QuadratureResult planar = integrate_plane_quadrant(
      [&](double t, double s) {
        const double w = weighted_generator(g, f, t + s);
        return w == 0.0 ? 0.0 : w * std::pow(t, p) / std::sqrt(s + a);
      },
      1e-10);
  const double half = 0.5 * (static_cast<double>(d) - 1.0);
  const double pre = theta / m.normalizer() * std::pow(std::numbers::pi, half) / gamma_fn(half);
  r.reduced = pre * planar.value;
  r.reduced_error = pre * planar.abs_error_estimate;
  r.rel_diff = std::abs(r.positive_part - r.reduced) / r.reduced;
  r.abs_identity_rel_diff =
      std::abs(r.positive_part + r.negative_part - 2.0 * r.reduced) / (2.0 * r.reduced);
  return r;
}

AbsIdentityReport verify_igt_abs_identity(const IgtModel& m, const FFunction& f) {
  const BiasQuery q(ModelSpec(m), f);
  const ScalarHalves h = scalar_halves(q);
  const BoundednessVerdict up = probe_boundedness(h.upper_gap);
  const BoundednessVerdict lo = probe_boundedness(h.lower_gap);
  if (!up.finite() || !lo.finite()) {
    throw DomainError("verify_igt_abs_identity: E|f'(d)(X - theta)| is not finite");
  }
  AbsIdentityReport r;
  r.direct = *up.value + *lo.value;
  const double a = 4.0 * m.lambda() / m.theta();
  const GeneratingFunction& g = m.g();
  const double integral =
      integrate_halfline([&](double t) { return weighted_generator(g, f, t) / std::sqrt(t + a); },
                         1e-12)
          .value;
  r.closed = 2.0 * m.theta() / m.normalizer() * integral;
  r.rel_diff = std::abs(r.direct - r.closed) / r.closed;
  return r;
}

MeanBoundReport verify_mean_bound(const GeneratingFunction& g, int d) {
  if (d < 2) throw DomainError("verify_mean_bound: d must be >= 2");
  MeanBoundReport r;
  const double half = 0.5 * d;
  const BoundednessVerdict moment = radial_moment(g, half);
  if (!moment.finite()) {
    r.vacuous = true;
    r.holds = moment.divergent();
    r.c = std::numeric_limits<double>::infinity();
    return r;
  }
  const double mval = *moment.value;
  r.c = std::pow(std::numbers::pi, half) / gamma_fn(half) * mval;
  r.b_reduced = std::sqrt(std::numbers::pi) * gamma_fn(0.5 * (d - 1)) / gamma_fn(half) * mval;
  const double p = 0.5 * (d - 3);
  auto planar = [&](double shift) {
    return integrate_plane_quadrant(
               [&](double t, double s) {
                 const double gv = g(t + s);
                 return gv == 0.0 ? 0.0 : gv * std::pow(t, p) / std::sqrt(s + shift);
               },
               1e-10)
        .value;
  };
  r.a = planar(1.0);
  r.b_planar = planar(0.0);
  r.tolerance = 1e-6 * r.c;
  r.holds = r.a < r.b_planar + r.tolerance && std::abs(r.b_planar - r.b_reduced) <= r.tolerance &&
            r.b_reduced <= r.c + r.tolerance;
  return r;
}

}  // namespace invdiv
