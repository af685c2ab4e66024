#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace invdiv {

// Monotone increasing distortion f applied to each per-point divergence in
// the loss L(theta) = (1/n) sum_i f(d(x_i, theta)). Catalog members:
//
//   identity        f(t) = t
//   log1p:eta       f(t) = eta log(1 + t/eta)          f'(t) = 1 / (1 + t/eta)
//   power:gamma     f(t) = ((1+t)^gamma - 1) / gamma   f'(t) = (1+t)^(gamma-1)
//   exp_tilt:c      f(t) = (e^{ct} - 1) / c            f'(t) = e^{ct}
//
// The string spelling "name:param" is the CLI grammar.
class FFunction {
public:
  enum class Shape { linear, concave, convex };

  // Arbitrary f with analytic derivative, for experiments outside the
  // catalog. fprime must be strictly positive on [0, inf).
  static FFunction custom(std::string name, std::function<double(double)> f,
                          std::function<double(double)> fprime, Shape shape);

  const std::string& name() const noexcept { return name_; }
  Shape shape() const noexcept { return shape_; }

  double operator()(double t) const;
  double deriv(double t) const;
  // log f'(t); exact for catalog entries even where f'(t) overflows.
  double log_deriv(double t) const;

  bool is_identity() const noexcept { return kind_ == Kind::identity; }

private:
  enum class Kind { identity, log1p, power, exp_tilt, custom };
  struct Custom {
    std::function<double(double)> f;
    std::function<double(double)> fprime;
  };

  FFunction(Kind kind, double param, std::string name, Shape shape)
      : kind_(kind), param_(param), name_(std::move(name)), shape_(shape) {}

  friend FFunction make_f(std::string_view, const std::vector<double>&);

  Kind kind_;
  double param_;
  std::string name_;
  Shape shape_;
  std::shared_ptr<const Custom> custom_;
};

// Catalog lookup. Throws ParseError for an unknown name or wrong parameter
// count, DomainError for a parameter outside its admissible range.
FFunction make_f(std::string_view name, const std::vector<double>& params = {});
// Parses "log1p:1", "power:0.5", "identity", ...
FFunction parse_f(std::string_view spelling);

// Asymptotic behaviour of a generating function, with the envelope used to
// check it: exponential c e^{-rate t}, polynomial c t^exponent, or g = 0 for
// t >= bound.
struct TailClass {
  enum class Kind { exponential, polynomial, compact_support };
  Kind kind;
  double coefficient = 1.0;
  double rate_or_exponent = 0.0;
  double bound = 0.0;

  // log of the envelope at t (-inf beyond a compact support bound).
  double log_envelope(double t) const;
};

// Nonnegative generating function g on [0, inf) shaping a density through
// the divergence. Catalog members:
//
//   gauss          g(t) = exp(-t/2)
//   student:nu     g(t) = (1 + t/nu)^(-(nu+1)/2)
//   cauchy         g(t) = 1 / (1 + t)
//   tricube        g(t) = max(0, 1 - t)
//
// "gauss_kernel", "cauchy_like" and "tricube_like" are accepted as aliases.
class GeneratingFunction {
public:
  static GeneratingFunction custom(std::string name, std::function<double(double)> g,
                                   TailClass tail);

  const std::string& name() const noexcept { return name_; }
  const TailClass& tail_class() const noexcept { return tail_; }

  double operator()(double t) const;
  double log_eval(double t) const;

  bool is_gauss_kernel() const noexcept { return kind_ == Kind::gauss; }

  // Closed form of M(alpha) = int_0^inf t^(alpha-1) g(t) dt when known
  // (gauss: 2^alpha Gamma(alpha)).
  std::optional<double> radial_moment(double alpha) const;
  // C_IGT = M(1/2) when known in closed form.
  std::optional<double> c_igt() const { return radial_moment(0.5); }

private:
  enum class Kind { gauss, student, cauchy, tricube, custom };

  GeneratingFunction(Kind kind, double param, std::string name, TailClass tail)
      : kind_(kind), param_(param), name_(std::move(name)), tail_(tail) {}

  friend GeneratingFunction make_g(std::string_view, const std::vector<double>&);

  Kind kind_;
  double param_;
  std::string name_;
  TailClass tail_;
  std::shared_ptr<const std::function<double(double)>> custom_;
};

GeneratingFunction make_g(std::string_view name, const std::vector<double>& params = {});
// Parses "gauss", "student:5", "cauchy", "tricube".
GeneratingFunction parse_g(std::string_view spelling);

// g(t) f'(t) computed as exp(log g + log f'), so that g underflowing to zero
// while f' overflows still yields the exact product.
double weighted_generator(const GeneratingFunction& g, const FFunction& f, double t);

// Catalog defaults used by the condition matrix and acceptance tests.
std::vector<GeneratingFunction> default_g_catalog();
std::vector<FFunction> default_f_catalog();

}  // namespace invdiv
