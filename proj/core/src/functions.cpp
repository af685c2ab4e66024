#include "invdiv/functions.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "invdiv/errors.hpp"

namespace invdiv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void expect_params(std::string_view name, const std::vector<double>& params,
                   std::size_t count) {
  if (params.size() != count) {
    throw ParseError(std::string(name) + " expects " + std::to_string(count) +
                     " parameter(s), got " + std::to_string(params.size()));
  }
}

// "name" or "name:p1,p2".
std::pair<std::string, std::vector<double>> split_spelling(std::string_view spelling) {
  const auto colon = spelling.find(':');
  std::string name(spelling.substr(0, colon));
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spelling.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view token = rest.substr(0, comma);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
        throw ParseError("cannot parse parameter '" + std::string(token) + "' in '" +
                         std::string(spelling) + "'");
      }
      params.push_back(value);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return {name, params};
}

}  // namespace

// ---------------------------------------------------------------------------
// FFunction

FFunction FFunction::custom(std::string name, std::function<double(double)> f,
                            std::function<double(double)> fprime, Shape shape) {
  FFunction out(Kind::custom, 0.0, std::move(name), shape);
  out.custom_ = std::make_shared<const Custom>(Custom{std::move(f), std::move(fprime)});
  return out;
}

double FFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::identity: return t;
    case Kind::log1p: return param_ * std::log1p(t / param_);
    case Kind::power:
      return param_ == 1.0 ? t : std::expm1(param_ * std::log1p(t)) / param_;
    case Kind::exp_tilt: return param_ == 0.0 ? t : std::expm1(param_ * t) / param_;
    case Kind::custom: return custom_->f(t);
  }
  return 0.0;
}

double FFunction::deriv(double t) const {
  switch (kind_) {
    case Kind::identity: return 1.0;
    case Kind::log1p: return 1.0 / (1.0 + t / param_);
    case Kind::power: return std::pow(1.0 + t, param_ - 1.0);
    case Kind::exp_tilt: return std::exp(param_ * t);
    case Kind::custom: return custom_->fprime(t);
  }
  return 0.0;
}

double FFunction::log_deriv(double t) const {
  switch (kind_) {
    case Kind::identity: return 0.0;
    case Kind::log1p: return -std::log1p(t / param_);
    case Kind::power: return (param_ - 1.0) * std::log1p(t);
    case Kind::exp_tilt: return param_ * t;
    case Kind::custom: return std::log(custom_->fprime(t));
  }
  return 0.0;
}

FFunction make_f(std::string_view name, const std::vector<double>& params) {
  using Shape = FFunction::Shape;
  using Kind = FFunction::Kind;
  if (name == "identity") {
    expect_params(name, params, 0);
    return FFunction(Kind::identity, 0.0, "identity", Shape::linear);
  }
  if (name == "log1p") {
    expect_params(name, params, 1);
    const double eta = params[0];
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("log1p: eta must be > 0");
    return FFunction(Kind::log1p, eta, "log1p:" + format_param(eta), Shape::concave);
  }
  if (name == "power") {
    expect_params(name, params, 1);
    const double gamma = params[0];
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("power: gamma must lie in (0, 1]");
    return FFunction(Kind::power, gamma, "power:" + format_param(gamma),
                     gamma == 1.0 ? Shape::linear : Shape::concave);
  }
  if (name == "exp_tilt") {
    expect_params(name, params, 1);
    const double c = params[0];
    if (!std::isfinite(c)) throw DomainError("exp_tilt: c must be finite");
    const Shape shape = c > 0.0 ? Shape::convex : (c < 0.0 ? Shape::concave : Shape::linear);
    return FFunction(Kind::exp_tilt, c, "exp_tilt:" + format_param(c), shape);
  }
  throw ParseError("unknown f-function '" + std::string(name) + "'");
}

FFunction parse_f(std::string_view spelling) {
  auto [name, params] = split_spelling(spelling);
  return make_f(name, params);
}

// ---------------------------------------------------------------------------
// GeneratingFunction

double TailClass::log_envelope(double t) const {
  switch (kind) {
    case Kind::exponential: return std::log(coefficient) - rate_or_exponent * t;
    case Kind::polynomial: return std::log(coefficient) + rate_or_exponent * std::log(t);
    case Kind::compact_support: return t >= bound ? -kInf : 0.0;
  }
  return 0.0;
}

GeneratingFunction GeneratingFunction::custom(std::string name,
                                              std::function<double(double)> g,
                                              TailClass tail) {
  GeneratingFunction out(Kind::custom, 0.0, std::move(name), tail);
  out.custom_ = std::make_shared<const std::function<double(double)>>(std::move(g));
  return out;
}

double GeneratingFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::gauss: return std::exp(-0.5 * t);
    case Kind::student: return std::exp(-0.5 * (param_ + 1.0) * std::log1p(t / param_));
    case Kind::cauchy: return 1.0 / (1.0 + t);
    case Kind::tricube: return t < 1.0 ? 1.0 - t : 0.0;
    case Kind::custom: return (*custom_)(t);
  }
  return 0.0;
}

double GeneratingFunction::log_eval(double t) const {
  switch (kind_) {
    case Kind::gauss: return -0.5 * t;
    case Kind::student: return -0.5 * (param_ + 1.0) * std::log1p(t / param_);
    case Kind::cauchy: return -std::log1p(t);
    case Kind::tricube: return t < 1.0 ? std::log1p(-t) : -kInf;
    case Kind::custom: return std::log((*custom_)(t));
  }
  return 0.0;
}

std::optional<double> GeneratingFunction::radial_moment(double alpha) const {
  if (kind_ == Kind::gauss && alpha > 0.0) {
    return std::exp(alpha * std::numbers::ln2 + std::lgamma(alpha));
  }
  return std::nullopt;
}

GeneratingFunction make_g(std::string_view name, const std::vector<double>& params) {
  using Kind = GeneratingFunction::Kind;
  using TK = TailClass::Kind;
  if (name == "gauss" || name == "gauss_kernel") {
    expect_params(name, params, 0);
    return GeneratingFunction(Kind::gauss, 0.0, "gauss", TailClass{TK::exponential, 1.0, 0.5});
  }
  if (name == "student") {
    expect_params(name, params, 1);
    const double nu = params[0];
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("student: nu must be > 0");
    const double exponent = -0.5 * (nu + 1.0);
    // (1 + t/nu)^e ~ nu^(-e) t^e
    return GeneratingFunction(Kind::student, nu, "student:" + format_param(nu),
                              TailClass{TK::polynomial, std::pow(nu, -exponent), exponent});
  }
  if (name == "cauchy" || name == "cauchy_like") {
    expect_params(name, params, 0);
    return GeneratingFunction(Kind::cauchy, 0.0, "cauchy", TailClass{TK::polynomial, 1.0, -1.0});
  }
  if (name == "tricube" || name == "tricube_like") {
    expect_params(name, params, 0);
    return GeneratingFunction(Kind::tricube, 0.0, "tricube",
                              TailClass{TK::compact_support, 1.0, 0.0, 1.0});
  }
  throw ParseError("unknown generating function '" + std::string(name) + "'");
}

GeneratingFunction parse_g(std::string_view spelling) {
  auto [name, params] = split_spelling(spelling);
  return make_g(name, params);
}

double weighted_generator(const GeneratingFunction& g, const FFunction& f, double t) {
  const double lg = g.log_eval(t);
  if (lg == -kInf) return 0.0;
  return std::exp(lg + f.log_deriv(t));
}

std::vector<GeneratingFunction> default_g_catalog() {
  return {make_g("gauss"), make_g("student", {5.0}), make_g("cauchy"), make_g("tricube")};
}

std::vector<FFunction> default_f_catalog() {
  return {make_f("identity"), make_f("log1p", {1.0}), make_f("power", {0.5}),
          make_f("exp_tilt", {0.25})};
}

}  // namespace invdiv
