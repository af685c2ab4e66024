#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invdiv/boundedness.hpp"
#include "invdiv/functions.hpp"

namespace invdiv {

// Model family a condition refers to; dim only matters for migt.
struct ConditionFamily {
  enum class Kind { igt, gigt_mixture, migt };
  Kind kind = Kind::igt;
  int dim = 1;

  static ConditionFamily igt() { return {Kind::igt, 1}; }
  static ConditionFamily gigt_mixture() { return {Kind::gigt_mixture, 1}; }
  static ConditionFamily migt(int d) { return {Kind::migt, d}; }
};

std::string to_string(const ConditionFamily& f);
// "igt", "gigt_mix", "migt:3" (also "gigt_mixture", "migt3").
ConditionFamily parse_family(const std::string& text);

// Existence of the normalizer:
//   igt       int t^(-1/2) g(t) dt                         (value C_IGT)
//   gigt_mix  C_GIGT(1, 1, 0) + C_GIGT(1, 1, -1)           (value is the sum)
//   migt:d    pi^(d/2) / Gamma(d/2) int t^((d-2)/2) g(t) dt (value C_MIGT)
// Finiteness of C_GIGT does not depend on (theta, lambda), so (1, 1) stands
// in for every parameter value.
BoundednessVerdict check_assumption(const ConditionFamily& family, const GeneratingFunction& g);

// int_0^inf g(t) f'(t) (t + a)^(-1/2) dt; a = 1 is the unbiasedness
// condition for the IGT family. Finiteness does not depend on a > 0.
BoundednessVerdict check_theorem1(const GeneratingFunction& g, const FFunction& f, double a = 1.0);

// int_0^inf g(t) f'(t) dt, the condition for the GIGT mixture.
BoundednessVerdict check_corollary2(const GeneratingFunction& g, const FFunction& f);

// H_d(u) = int_0^u t^((d-3)/2) (u - t + 1)^(-1/2) dt:
//   H_2(u) = 2 asin(sqrt(u / (u + 1))),  H_3(u) = 2 (sqrt(u + 1) - 1),
// numeric for d >= 4.
double theorem2_kernel(int d, double u);

struct Theorem2Check {
  // Verdict from the 1-D form int g(u) f'(u) H_d(u) du.
  BoundednessVerdict verdict;
  // The planar integral int int g(t+s) f'(t+s) t^((d-3)/2) (s+1)^(-1/2) dt ds,
  // computed when the verdict is Finite and a cross-check was requested.
  std::optional<double> planar_value;
  double planar_error = 0.0;
  bool consistent = true;
  std::string note;
};

// Condition for the d-dimensional MIGT family, d >= 2. Throws DomainError
// for d < 2; the one-dimensional case is check_theorem1.
Theorem2Check check_theorem2_detailed(const GeneratingFunction& g, const FFunction& f, int d,
                                      bool cross_check = true);
BoundednessVerdict check_theorem2(const GeneratingFunction& g, const FFunction& f, int d);

// The unbiasedness condition matching a family: check_theorem1 for igt (and
// migt:1), check_corollary2 for gigt_mix, check_theorem2 for migt:d.
BoundednessVerdict check_condition(const ConditionFamily& family, const GeneratingFunction& g,
                                   const FFunction& f);

struct ConditionCell {
  ConditionFamily family;
  std::string g;
  std::string f;
  BoundednessVerdict assumption;
  BoundednessVerdict condition;
};

// Every (family, g, f) combination, cells evaluated in parallel on up to
// `threads` workers; the output order is families x g x f regardless.
// Throws DomainError on an empty list.
std::vector<ConditionCell> condition_matrix(const std::vector<GeneratingFunction>& g_list,
                                            const std::vector<FFunction>& f_list,
                                            const std::vector<ConditionFamily>& families,
                                            unsigned threads = 1);

// Default families: igt, gigt_mix, migt:2.
std::vector<ConditionFamily> default_condition_families();

}  // namespace invdiv
