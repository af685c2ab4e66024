#include "invdiv/inverse_cdf.hpp"

#include <algorithm>
#include <cmath>

#include "invdiv/errors.hpp"
#include "invdiv/quadrature.hpp"

namespace invdiv {

InverseCdfTable::InverseCdfTable(std::function<double(double)> density, double scale,
                                 std::size_t panels)
    : scale_(scale) {
  if (!(scale > 0.0)) throw DomainError("InverseCdfTable: scale must be > 0");
  if (panels < 8) throw DomainError("InverseCdfTable: need at least 8 panels");

  // Density in z, including the Jacobian of x = scale (z/(1-z))^2.
  const auto density_z = [&](double z) {
    if (!(z > 0.0 && z < 1.0)) return 0.0;
    const double r = z / (1.0 - z);
    const double x = scale_ * r * r;
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    const double p = density(x);
    if (p == 0.0) return 0.0;
    return p * scale_ * 2.0 * r / ((1.0 - z) * (1.0 - z));
  };

  QuadratureOptions rough;
  rough.rel_tol = 1e-8;
  const double rough_total = integrate_interval(density_z, 0.0, 1.0, rough).value;
  if (!(rough_total > 0.0) || !std::isfinite(rough_total)) {
    throw DomainError("InverseCdfTable: density has no finite positive mass");
  }

  QuadratureOptions fine;
  fine.rel_tol = 1e-11;
  fine.abs_tol = 1e-15 * rough_total;
  const double h = 1.0 / static_cast<double>(panels);
  std::vector<double> mass(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    mass[k] = integrate_interval(density_z, k * h, (k + 1) * h, fine).value;
  }
  total_ = 0.0;
  for (double m : mass) total_ += m;

  double running = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    if (!(mass[k] > 0.0)) continue;
    const double f0 = running / total_;
    running += mass[k];
    const double f1 = k + 1 == panels ? 1.0 : running / total_;
    if (!(f1 > f0)) continue;
    Panel p{f0, f1, k * h, (k + 1) * h, 0.0, 0.0};
    const double secant = (p.z1 - p.z0) / (p.f1 - p.f0);
    const auto slope_at = [&](double z) {
      const double q = density_z(z) / total_;
      return (q > 0.0 && std::isfinite(q)) ? 1.0 / q : secant;
    };
    p.d0 = slope_at(p.z0);
    p.d1 = slope_at(p.z1);
    // Fritsch-Carlson: keep the cubic monotone inside the panel.
    const double a = p.d0 / secant;
    const double b = p.d1 / secant;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      p.d0 = tau * a * secant;
      p.d1 = tau * b * secant;
    }
    panels_.push_back(p);
  }
  if (panels_.empty()) throw DomainError("InverseCdfTable: no panel carries mass");
}

double InverseCdfTable::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("InverseCdfTable: u must lie in (0, 1)");
  auto it = std::upper_bound(panels_.begin(), panels_.end(), u,
                             [](double value, const Panel& p) { return value < p.f1; });
  if (it == panels_.end()) --it;
  const Panel& p = *it;
  const double width = p.f1 - p.f0;
  const double s = std::clamp((u - p.f0) / width, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  double z = h00 * p.z0 + h10 * width * p.d0 + h01 * p.z1 + h11 * width * p.d1;
  z = std::clamp(z, p.z0, p.z1);
  if (z <= 0.0) z = 0.5 * p.z1 * std::max(s, 1e-300);  // stay inside (0, 1)
  if (z >= 1.0) z = 1.0 - 1e-16;
  const double r = z / (1.0 - z);
  return scale_ * r * r;
}

}  // namespace invdiv
