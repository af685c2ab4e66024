#include "invdiv/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "invdiv/errors.hpp"

namespace invdiv {
namespace {

// QUADPACK qk21 abscissae and weights. Odd indices of kXgk are the
// 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208626368583, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

bool operator<(const Panel& lhs, const Panel& rhs) { return lhs.error < rhs.error; }

Panel gauss_kronrod21(const Integrand& h, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  const double fc = h(center);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::fabs(resk);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = h(center - dx);
    const double f2 = h(center + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  // 10-point Gauss rule has no center node.
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::fabs(fc - reskh);
  for (std::size_t j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::fabs(fv[2 * j] - reskh) + std::fabs(fv[2 * j + 1] - reskh));
  }
  const double scale = std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  resasc *= scale;
  resabs *= scale;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return Panel{a, b, resk * half, err};
}

// Thrown on a non-finite sample and reported as BudgetExhausted, so that
// divergent integrands share one failure channel.
struct NonFinite {};

}  // namespace

QuadratureResult integrate_interval(const Integrand& h, double a, double b,
                                    const QuadratureOptions& opts) {
  if (!(a <= b)) throw DomainError("integrate_interval: require a <= b");
  QuadratureResult out;
  if (a == b) return out;

  std::size_t evaluations = 0;
  const Integrand checked = [&](double x) {
    ++evaluations;
    const double v = h(x);
    if (!std::isfinite(v)) throw NonFinite{};
    return v;
  };

  try {
    std::vector<Panel> heap;
    heap.reserve(64);
    heap.push_back(gauss_kronrod21(checked, a, b));
    double total = heap.front().value;
    double total_err = heap.front().error;
    // Panels too narrow to split further; their error is final.
    double frozen_value = 0.0;
    double frozen_err = 0.0;

    std::size_t subdivisions = 0;
    // Below the floor panels hold subnormal values, whose rounding noise no
    // relative tolerance can beat.
    constexpr double kFloor = std::numeric_limits<double>::min() / kEps;
    const auto target = [&] {
      return std::max({opts.abs_tol, opts.rel_tol * std::fabs(total), kFloor});
    };
    while (total_err > target() && !heap.empty()) {
      if (subdivisions >= opts.max_subdivisions) {
        throw BudgetExhausted("integrate_interval: subdivision budget exhausted on [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "]",
                              total, total_err);
      }
      std::pop_heap(heap.begin(), heap.end());
      const Panel worst = heap.back();
      heap.pop_back();
      const double mid = 0.5 * (worst.a + worst.b);
      if (!(mid > worst.a && mid < worst.b) ||
          (worst.b - worst.a) < 8.0 * kEps * std::max(std::fabs(worst.a), std::fabs(worst.b))) {
        frozen_value += worst.value;
        frozen_err += worst.error;
        continue;
      }
      const Panel left = gauss_kronrod21(checked, worst.a, mid);
      const Panel right = gauss_kronrod21(checked, mid, worst.b);
      ++subdivisions;
      total += left.value + right.value - worst.value;
      total_err += left.error + right.error - worst.error;
      heap.push_back(left);
      std::push_heap(heap.begin(), heap.end());
      heap.push_back(right);
      std::push_heap(heap.begin(), heap.end());
      if (subdivisions % 64 == 0) {
        // Re-sum to keep the running totals from drifting.
        total = frozen_value;
        total_err = frozen_err;
        for (const Panel& p : heap) {
          total += p.value;
          total_err += p.error;
        }
      }
    }
    if (total_err > target()) {
      throw BudgetExhausted("integrate_interval: tolerance unreachable (roundoff or singularity)",
                            total, total_err);
    }
    out.value = total;
    out.abs_error_estimate = total_err;
  } catch (const NonFinite&) {
    throw BudgetExhausted("integrate_interval: integrand is non-finite inside [" +
                              std::to_string(a) + ", " + std::to_string(b) + "]",
                          std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity());
  }
  out.evaluations = evaluations;
  return out;
}

namespace {

QuadratureResult add(QuadratureResult lhs, const QuadratureResult& rhs) {
  lhs.value += rhs.value;
  lhs.abs_error_estimate += rhs.abs_error_estimate;
  lhs.evaluations += rhs.evaluations;
  return lhs;
}

QuadratureResult head_piece(const Integrand& h, double upper, const QuadratureOptions& opts) {
  // t = v^2 on [0, upper].
  return integrate_interval([&](double v) { return 2.0 * v * h(v * v); }, 0.0,
                            std::sqrt(upper), opts);
}

// The tolerance is relative to the whole integral, so the second piece may
// stop at an absolute error set by the first.
QuadratureOptions after(const QuadratureOptions& opts, const QuadratureResult& first) {
  QuadratureOptions o = opts;
  o.abs_tol = std::max(opts.abs_tol, opts.rel_tol * std::fabs(first.value));
  return o;
}

}  // namespace

QuadratureResult integrate_halfline(const Integrand& h, const QuadratureOptions& opts) {
  const QuadratureResult head = head_piece(h, 1.0, opts);
  const QuadratureResult tail = integrate_interval(
      [&](double w) {
        const double w2 = w * w;
        const double t = (1.0 - w2) / w2;
        const double v = h(t);
        // Vanishing integrand; avoid 0 * inf from the Jacobian.
        if (v == 0.0) return 0.0;
        return v * 2.0 / (w2 * w);
      },
      0.0, std::numbers::sqrt2 / 2.0, after(opts, head));
  return add(head, tail);
}

QuadratureResult integrate_halfline(const Integrand& h, double tol) {
  QuadratureOptions opts;
  opts.rel_tol = tol;
  return integrate_halfline(h, opts);
}

QuadratureResult integrate_truncated(const Integrand& h, double upper,
                                     const QuadratureOptions& opts) {
  if (!(upper >= 0.0)) throw DomainError("integrate_truncated: upper must be >= 0");
  if (upper <= 1.0) return head_piece(h, upper, opts);
  // Log-spaced variable on [1, upper] keeps power-law pieces smooth.
  const QuadratureResult body = integrate_interval(
      [&](double y) {
        const double t = std::exp(y);
        return h(t) * t;
      },
      0.0, std::log(upper), opts);
  return add(head_piece(h, 1.0, opts), body);
}

QuadratureResult integrate_plane_quadrant(const Integrand2& h, double tol) {
  return integrate_orthant(
      2, [&](std::span<const double> p) { return h(p[0], p[1]); }, tol);
}

namespace {

QuadratureResult orthant_recursive(std::size_t level, std::size_t dims, std::vector<double>& point,
                                   const IntegrandN& h, double tol) {
  std::size_t inner_evals = 0;
  const QuadratureResult r = integrate_halfline(
      [&](double x) {
        point[level] = x;
        if (level + 1 == dims) {
          ++inner_evals;
          return h(std::span<const double>(point.data(), dims));
        }
        const QuadratureResult inner = orthant_recursive(level + 1, dims, point, h, 0.1 * tol);
        inner_evals += inner.evaluations;
        return inner.value;
      },
      tol);
  QuadratureResult out = r;
  out.evaluations = inner_evals;
  // Inner errors are relative at a tenth of the tolerance; charge them
  // proportionally to the outer value.
  if (level + 1 < dims) out.abs_error_estimate += 0.1 * tol * std::fabs(r.value);
  return out;
}

}  // namespace

QuadratureResult integrate_orthant(std::size_t dims, const IntegrandN& h, double tol) {
  if (dims == 0 || dims > 4) throw DomainError("integrate_orthant: dims must be in [1, 4]");
  std::vector<double> point(dims, 0.0);
  return orthant_recursive(0, dims, point, h, tol);
}

QuadratureResult integrate_positive_axis(const Integrand& h, double center,
                                         const QuadratureOptions& opts) {
  if (!(center > 0.0)) throw DomainError("integrate_positive_axis: center must be > 0");
  const QuadratureResult upper =
      integrate_halfline([&](double s) { return center * h(center * (1.0 + s)); }, opts);
  const QuadratureResult lower = integrate_halfline(
      [&](double s) {
        const double q = 1.0 + s;
        const double v = h(center / q);
        if (v == 0.0) return 0.0;
        return center * v / (q * q);
      },
      after(opts, upper));
  return add(upper, lower);
}

}  // namespace invdiv
