#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invdiv/quadrature.hpp"

namespace invdiv {

enum class Boundedness { finite, divergent, inconclusive };

std::string to_string(Boundedness b);

struct BoundednessDiagnostics {
  std::vector<double> truncations;
  // I(T) = int_0^T h; +inf or NaN where the piece could not be integrated.
  std::vector<double> partial_integrals;
  // Least-squares slope of log|h(t)| against log t over the last decade.
  double tail_exponent = 0.0;
  // |I(T_n) - I(T_{n-1})| / |I(T_{n-1}) - I(T_{n-2})|.
  double increment_ratio = 0.0;
  std::string note;
};

// Numerical judgment of int_0^inf h(t) dt < inf. Boundedness of an improper
// integral is not decidable from samples, so the result is three-valued and
// Inconclusive is a regular outcome.
struct BoundednessVerdict {
  Boundedness status = Boundedness::inconclusive;
  std::optional<double> value;  // present iff status == finite
  double abs_error = 0.0;
  BoundednessDiagnostics diagnostics;

  bool finite() const noexcept { return status == Boundedness::finite; }
  bool divergent() const noexcept { return status == Boundedness::divergent; }
};

struct ProbeOptions {
  // Clearance in log-log slope below -1 required for a Finite verdict.
  double margin = 0.15;
  // Slack below -1 still read as a harmonic (divergent) tail; absorbs the
  // fit error of a pure t^-1 tail.
  double fit_slack = 0.02;
  // Absolute increment over the last decade accepted as converged, relative
  // to 1 + |I(T_max)|.
  double cauchy_tol = 1e-8;
  // Relative tolerance of the full integral reported with a Finite verdict.
  double rel_tol = 1e-11;
  std::vector<double> truncations = {1e1, 1e2, 1e3, 1e4, 1e5};
};

// Probes int_0^inf h(t) dt for an integrand that is nonnegative and
// eventually monotone in the tail, with at most an integrable singularity at
// t = 0.
//
//   Finite       p < -1 - margin and the partial integrals settle (last
//                increment below cauchy_tol, or increments shrinking by at
//                least 10^-margin per decade); value from integrate_halfline.
//   Divergent    p >= -1 - fit_slack and the increments do not shrink by
//                10^-margin per decade, or a partial integral overflows.
//   Inconclusive everything else.
BoundednessVerdict probe_boundedness(const Integrand& h, const ProbeOptions& opts = {});

// Verdict for a sum of nonnegative integrals: Divergent if any part
// diverges, Finite (values added) if all are finite, else Inconclusive.
BoundednessVerdict combine_sum(const std::vector<BoundednessVerdict>& parts);

}  // namespace invdiv
