#pragma once

#include <cstddef>
#include <vector>

#include "mvfbsde/ensemble.hpp"
#include "mvfbsde/grid.hpp"

namespace mvfbsde {

/// Discrete ‖f‖²_K = dt · Σ_i e^{2K t_i} · mean_p |f_p(t_i)|², left-rectangle
/// rule over [0, T].
struct WeightedNormReport {
  double value = 0.0;
  std::vector<double> contributions;  // e^{2K t_i} · mean_p |f_i|², per node
};

WeightedNormReport weighted_sq_norm(const PathView& paths, const TimeGrid& grid);

struct TailProfile {
  std::vector<double> profile;  // e^{2K t_i} · mean_p |f_i|²
  double terminal = 0.0;
  bool decreasing_final_quarter = false;
  bool flag = false;  // decreasing AND terminal < tail_tol
  double tail_tol = 1e-4;
};

// "Decreasing over the final quarter" is judged on quarter-bucket averages
// with 10% slack so Monte Carlo noise on a genuinely decaying profile does
// not flip the verdict, while flat (K=0 constant-path) profiles fail it.
TailProfile tail_weight_profile(const PathView& paths, const TimeGrid& grid,
                                double tail_tol = 1e-4);

}  // namespace mvfbsde
