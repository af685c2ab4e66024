#include "invdiv/boundedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "invdiv/errors.hpp"

namespace invdiv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double integrate_or_flag(const Integrand& h, double lo, double hi, const QuadratureOptions& opts) {
  try {
    if (lo == 0.0) return integrate_truncated(h, hi, opts).value;
    return integrate_interval(
               [&](double y) {
                 const double t = std::exp(y);
                 return h(t) * t;
               },
               std::log(lo), std::log(hi), opts)
        .value;
  } catch (const BudgetExhausted& e) {
    return std::isinf(e.partial_value()) ? kInf : kNaN;
  }
}

// Slope of log|h| vs log t on a log grid over [t0, t1]. +inf if h overflows,
// -inf if h vanishes from some point on, NaN for an irregular tail.
double fit_tail_exponent(const Integrand& h, double t0, double t1) {
  constexpr int kPoints = 11;
  std::vector<double> xs, ys;
  bool saw_zero = false;
  for (int i = 0; i < kPoints; ++i) {
    const double lt = std::log(t0) + (std::log(t1) - std::log(t0)) * i / (kPoints - 1);
    const double v = std::fabs(h(std::exp(lt)));
    if (std::isnan(v)) return kNaN;
    if (std::isinf(v)) return kInf;
    if (v == 0.0) {
      saw_zero = true;
      continue;
    }
    if (saw_zero) return kNaN;  // zero followed by a nonzero value
    xs.push_back(lt);
    ys.push_back(std::log(v));
  }
  if (saw_zero) return -kInf;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::string to_string(Boundedness b) {
  switch (b) {
    case Boundedness::finite: return "Finite";
    case Boundedness::divergent: return "Divergent";
    case Boundedness::inconclusive: return "Inconclusive";
  }
  return "?";
}

BoundednessVerdict probe_boundedness(const Integrand& h, const ProbeOptions& opts) {
  BoundednessVerdict out;
  auto& diag = out.diagnostics;
  diag.truncations = opts.truncations;
  if (opts.truncations.size() < 3) throw DomainError("probe_boundedness: need >= 3 truncations");

  QuadratureOptions qopts;
  qopts.rel_tol = 1e-10;
  qopts.abs_tol = 1e-300;

  double running = 0.0;
  double lo = 0.0;
  bool partials_finite = true;
  for (double t : opts.truncations) {
    // Later pieces only need to be accurate relative to what has
    // accumulated; far-tail pieces are often many orders smaller.
    if (std::isfinite(running)) qopts.abs_tol = std::max(1e-300, 1e-14 * std::fabs(running));
    const double piece = integrate_or_flag(h, lo, t, qopts);
    running += piece;
    diag.partial_integrals.push_back(running);
    if (!std::isfinite(running)) partials_finite = false;
    lo = t;
  }

  const std::size_t n = diag.partial_integrals.size();
  const double last_t = opts.truncations.back();
  const double prev_t = opts.truncations[n - 2];
  diag.tail_exponent = fit_tail_exponent(h, prev_t, last_t);

  const double d_last = diag.partial_integrals[n - 1] - diag.partial_integrals[n - 2];
  const double d_prev = diag.partial_integrals[n - 2] - diag.partial_integrals[n - 3];
  if (!partials_finite) {
    diag.increment_ratio = kNaN;
  } else if (d_prev == 0.0) {
    diag.increment_ratio = d_last == 0.0 ? 0.0 : kInf;
  } else {
    diag.increment_ratio = std::fabs(d_last) / std::fabs(d_prev);
  }

  const double p = diag.tail_exponent;
  const double shrink = std::pow(10.0, -opts.margin);
  const double i_max = diag.partial_integrals.back();

  if (std::isnan(p)) {
    diag.note = "irregular tail: cannot fit an exponent";
    return out;
  }

  if (p < -1.0 - opts.margin) {
    const bool settled = partials_finite &&
                         (std::fabs(d_last) <= opts.cauchy_tol * (1.0 + std::fabs(i_max)) ||
                          diag.increment_ratio <= shrink);
    if (!settled) {
      diag.note = "tail exponent is integrable but partial integrals have not settled";
      return out;
    }
    try {
      QuadratureOptions full;
      full.rel_tol = opts.rel_tol;
      full.abs_tol = 1e-300;
      const QuadratureResult r = integrate_halfline(h, full);
      out.status = Boundedness::finite;
      out.value = r.value;
      out.abs_error = r.abs_error_estimate;
      diag.note = "tail exponent below -1 by the margin; partial integrals settled";
    } catch (const BudgetExhausted& e) {
      diag.note = std::string("full integral failed: ") + e.what();
    }
    return out;
  }

  if (p >= -1.0 - opts.fit_slack) {
    if (!partials_finite || diag.increment_ratio >= shrink) {
      out.status = Boundedness::divergent;
      diag.note = partials_finite ? "tail exponent >= -1; partial integrals keep growing"
                                  : "partial integral overflowed";
    } else {
      diag.note = "tail exponent >= -1 but partial integrals shrink";
    }
    return out;
  }

  diag.note = "tail exponent within the margin around -1";
  return out;
}

BoundednessVerdict combine_sum(const std::vector<BoundednessVerdict>& parts) {
  BoundednessVerdict out;
  if (parts.empty()) throw DomainError("combine_sum: no parts");
  bool all_finite = true;
  double value = 0.0, err = 0.0;
  for (const auto& part : parts) {
    if (part.divergent()) {
      out = part;
      out.diagnostics.note = "a component diverges: " + part.diagnostics.note;
      return out;
    }
    if (!part.finite()) {
      all_finite = false;
    } else {
      value += *part.value;
      err += part.abs_error;
    }
  }
  if (all_finite) {
    out = parts.front();
    out.value = value;
    out.abs_error = err;
    out.diagnostics.note = "all components finite";
  } else {
    for (const auto& part : parts) {
      if (!part.finite()) {
        out = part;
        break;
      }
    }
  }
  return out;
}

}  // namespace invdiv
