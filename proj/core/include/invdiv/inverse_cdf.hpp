#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace invdiv {

// Numeric inverse CDF of an (unnormalized) density on (0, inf).
//
// The axis is compactified by x = scale (z / (1 - z))^2, z in (0, 1); the
// square keeps x^(-1/2) heads and x^(-3/2) tails bounded in z. The CDF is
// integrated panel by panel on a uniform z grid and z(F) is represented by a
// monotone (Fritsch-Carlson) cubic Hermite interpolant whose knot slopes come
// from the density itself. Panels without mass (densities with compact
// support) are dropped, so flat stretches of the CDF never receive draws.
class InverseCdfTable {
public:
  InverseCdfTable(std::function<double(double)> density, double scale, std::size_t panels = 2048);

  // Quantile at probability u in (0, 1).
  double quantile(double u) const;
  // Integral of the unnormalized density.
  double total_mass() const noexcept { return total_; }
  // Panels carrying mass.
  std::size_t panels() const noexcept { return panels_.size(); }

private:
  struct Panel {
    double f0, f1;  // CDF at the ends
    double z0, z1;
    double d0, d1;  // dz/dF at the ends
  };

  double scale_;
  double total_ = 0.0;
  std::vector<Panel> panels_;
};

}  // namespace invdiv
