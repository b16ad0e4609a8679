#pragma once

#include <cstddef>
#include <vector>

namespace mvfbsde {

/// Uniform truncation of [0, ∞) carrying the exponential weight rate K of
/// the solution space: norms below integrate e^{2Kt}|·|² with a
/// left-rectangle rule on the nodes t_i = i·dt.
struct TimeGrid {
  double T = 0.0;
  std::size_t N = 0;
  double K = 0.0;
  double dt = 0.0;

  double node(std::size_t i) const { return static_cast<double>(i) * dt; }
  double weight(std::size_t i) const;  // e^{2K t_i}
  std::size_t levels() const { return N + 1; }
};

// Rejects non-positive horizons and weight exponents 2K·T > 300 that would
// overflow e^{2Kt}.
TimeGrid make_grid(double T, std::size_t N, double K);

}  // namespace mvfbsde
