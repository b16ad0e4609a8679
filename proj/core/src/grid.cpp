#include "mvfbsde/grid.hpp"

#include <cmath>
#include <string>

#include "mvfbsde/errors.hpp"

namespace mvfbsde {

double TimeGrid::weight(std::size_t i) const { return std::exp(2.0 * K * node(i)); }

TimeGrid make_grid(double T, std::size_t N, double K) {
  if (!(T > 0.0))
    throw Error(ErrorCode::NonPositiveHorizon, "T must be positive, got " + std::to_string(T));
  if (N < 1) throw Error(ErrorCode::NonPositiveHorizon, "N must be at least 1");
  if (2.0 * K * T > 300.0)
    throw Error(ErrorCode::WeightOverflow,
                "2*K*T = " + std::to_string(2.0 * K * T) + " exceeds 300");
  TimeGrid g;
  g.T = T;
  g.N = N;
  g.K = K;
  g.dt = T / static_cast<double>(N);
  return g;
}

}  // namespace mvfbsde
