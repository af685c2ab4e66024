#include "invdiv/conditions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "invdiv/distributions.hpp"
#include "invdiv/errors.hpp"
#include "invdiv/special.hpp"
#include "parallel.hpp"

namespace invdiv {
namespace {

BoundednessVerdict scaled(BoundednessVerdict v, double factor) {
  if (v.value) *v.value *= factor;
  v.abs_error *= factor;
  return v;
}

}  // namespace

std::string to_string(const ConditionFamily& f) {
  switch (f.kind) {
    case ConditionFamily::Kind::igt: return "igt";
    case ConditionFamily::Kind::gigt_mixture: return "gigt_mix";
    case ConditionFamily::Kind::migt: return "migt:" + std::to_string(f.dim);
  }
  return "?";
}

ConditionFamily parse_family(const std::string& text) {
  if (text == "igt") return ConditionFamily::igt();
  if (text == "gigt_mix" || text == "gigt_mixture") return ConditionFamily::gigt_mixture();
  std::string rest;
  if (text.rfind("migt:", 0) == 0) rest = text.substr(5);
  else if (text.rfind("migt", 0) == 0) rest = text.substr(4);
  else throw ParseError("unknown family '" + text + "'");
  if (rest.empty()) throw ParseError("family migt needs a dimension, e.g. migt:3");
  std::size_t used = 0;
  int d = 0;
  try {
    d = std::stoi(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != rest.size() || d < 1) throw ParseError("bad migt dimension in '" + text + "'");
  return ConditionFamily::migt(d);
}

BoundednessVerdict check_assumption(const ConditionFamily& family, const GeneratingFunction& g) {
  switch (family.kind) {
    case ConditionFamily::Kind::igt:
      return radial_moment(g, 0.5);
    case ConditionFamily::Kind::gigt_mixture:
      return combine_sum({gigt_normalizer(1.0, 1.0, 0.0, g), gigt_normalizer(1.0, 1.0, -1.0, g)});
    case ConditionFamily::Kind::migt: {
      if (family.dim < 1) throw DomainError("migt dimension must be >= 1");
      const double half = 0.5 * family.dim;
      const double factor = std::pow(std::numbers::pi, half) / gamma_fn(half);
      return scaled(radial_moment(g, half), factor);
    }
  }
  throw DomainError("check_assumption: unknown family");
}

BoundednessVerdict check_theorem1(const GeneratingFunction& g, const FFunction& f, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("check_theorem1: shift a must be > 0");
  return probe_boundedness(
      [&](double t) { return weighted_generator(g, f, t) / std::sqrt(t + a); });
}

BoundednessVerdict check_corollary2(const GeneratingFunction& g, const FFunction& f) {
  return probe_boundedness([&](double t) { return weighted_generator(g, f, t); });
}

double theorem2_kernel(int d, double u) {
  if (d < 2) throw DomainError("theorem2_kernel: d must be >= 2");
  if (!(u >= 0.0)) throw DomainError("theorem2_kernel: u must be >= 0");
  if (u == 0.0) return 0.0;
  if (d == 2) return 2.0 * std::asin(std::sqrt(u / (u + 1.0)));
  if (d == 3) return 2.0 * u / (std::sqrt(u + 1.0) + 1.0);  // 2 (sqrt(u+1) - 1)
  // t = u v: u^((d-1)/2) int_0^1 v^((d-3)/2) (u (1 - v) + 1)^(-1/2) dv.
  const double p = 0.5 * (d - 3);
  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  const double inner = integrate_interval(
                           [&](double v) { return std::pow(v, p) / std::sqrt(u * (1.0 - v) + 1.0); },
                           0.0, 1.0, opts)
                           .value;
  return std::pow(u, 0.5 * (d - 1)) * inner;
}

Theorem2Check check_theorem2_detailed(const GeneratingFunction& g, const FFunction& f, int d,
                                      bool cross_check) {
  if (d < 2) {
    throw DomainError("check_theorem2 needs d >= 2; use check_theorem1 for one dimension");
  }
  Theorem2Check out;
  out.verdict = probe_boundedness(
      [&](double u) { return weighted_generator(g, f, u) * theorem2_kernel(d, u); });
  if (!cross_check || !out.verdict.finite()) return out;

  const double p = 0.5 * (d - 3);
  const double tol = 1e-8;
  try {
    const QuadratureResult planar = integrate_plane_quadrant(
        [&](double t, double s) {
          const double w = weighted_generator(g, f, t + s);
          if (w == 0.0) return 0.0;
          return w * std::pow(t, p) / std::sqrt(s + 1.0);
        },
        tol);
    out.planar_value = planar.value;
    out.planar_error = planar.abs_error_estimate;
    const double reduced = *out.verdict.value;
    const double allowed = 10.0 * (planar.abs_error_estimate + out.verdict.abs_error) +
                           1e-6 * std::abs(reduced);
    out.consistent = std::abs(planar.value - reduced) <= allowed;
    out.note = out.consistent ? "planar and reduced forms agree"
                              : "planar and reduced forms disagree";
  } catch (const BudgetExhausted& e) {
    out.consistent = false;
    out.note = std::string("planar cross-check ran out of budget: ") + e.what();
  }
  return out;
}

BoundednessVerdict check_theorem2(const GeneratingFunction& g, const FFunction& f, int d) {
  return check_theorem2_detailed(g, f, d, false).verdict;
}

BoundednessVerdict check_condition(const ConditionFamily& family, const GeneratingFunction& g,
                                   const FFunction& f) {
  switch (family.kind) {
    case ConditionFamily::Kind::igt: return check_theorem1(g, f);
    case ConditionFamily::Kind::gigt_mixture: return check_corollary2(g, f);
    case ConditionFamily::Kind::migt:
      return family.dim == 1 ? check_theorem1(g, f) : check_theorem2(g, f, family.dim);
  }
  throw DomainError("check_condition: unknown family");
}

std::vector<ConditionFamily> default_condition_families() {
  return {ConditionFamily::igt(), ConditionFamily::gigt_mixture(), ConditionFamily::migt(2)};
}

std::vector<ConditionCell> condition_matrix(const std::vector<GeneratingFunction>& g_list,
                                            const std::vector<FFunction>& f_list,
                                            const std::vector<ConditionFamily>& families,
                                            unsigned threads) {
  if (g_list.empty()) throw DomainError("condition_matrix: empty g list");
  if (f_list.empty()) throw DomainError("condition_matrix: empty f list");
  if (families.empty()) throw DomainError("condition_matrix: empty family list");
  const std::size_t ng = g_list.size(), nf = f_list.size();
  std::vector<ConditionCell> cells(families.size() * ng * nf);
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const auto& fam = families[i / (ng * nf)];
    const auto& g = g_list[(i / nf) % ng];
    const auto& f = f_list[i % nf];
    ConditionCell& cell = cells[i];
    cell.family = fam;
    cell.g = g.name();
    cell.f = f.name();
    cell.assumption = check_assumption(fam, g);
    cell.condition = check_condition(fam, g, f);
  });
  return cells;
}

}  // namespace invdiv
