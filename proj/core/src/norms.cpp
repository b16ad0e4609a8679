#include "mvfbsde/norms.hpp"

#include <algorithm>
#include <string>

#include "mvfbsde/errors.hpp"
#include "mvfbsde/parallel.hpp"

namespace mvfbsde {

namespace {

std::vector<double> level_mean_squares(const PathView& paths, const TimeGrid& grid) {
  if (paths.empty()) throw Error(ErrorCode::ShapeMismatch, "empty path view");
  if (paths.levels != grid.N + 1 && paths.levels != grid.N)
    throw Error(ErrorCode::ShapeMismatch,
                "path has " + std::to_string(paths.levels) + " levels, grid expects " +
                    std::to_string(grid.N) + " or " + std::to_string(grid.N + 1));
  const std::size_t L = std::min(paths.levels, grid.N);  // left rectangle: nodes 0..N-1
  std::vector<double> ms(paths.levels, 0.0);
  const std::size_t M = paths.particles;
  const std::size_t w = paths.width;
  for (std::size_t i = 0; i < paths.levels; ++i) {
    const double* lvl = paths.level(i);
    ms[i] = chunked_sum(M, [&](std::size_t p) {
              double s = 0.0;
              for (std::size_t c = 0; c < w; ++c) {
                const double v = lvl[p * w + c];
                s += v * v;
              }
              return s;
            }) /
            static_cast<double>(M);
  }
  (void)L;
  return ms;
}

}  // namespace

WeightedNormReport weighted_sq_norm(const PathView& paths, const TimeGrid& grid) {
  WeightedNormReport rep;
  const auto ms = level_mean_squares(paths, grid);
  rep.contributions.resize(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) rep.contributions[i] = grid.weight(i) * ms[i];
  const std::size_t L = std::min(paths.levels, grid.N);
  for (std::size_t i = 0; i < L; ++i) rep.value += rep.contributions[i];
  rep.value *= grid.dt;
  return rep;
}

TailProfile tail_weight_profile(const PathView& paths, const TimeGrid& grid, double tail_tol) {
  TailProfile out;
  out.tail_tol = tail_tol;
  const auto ms = level_mean_squares(paths, grid);
  out.profile.resize(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) out.profile[i] = grid.weight(i) * ms[i];
  out.terminal = out.profile.back();

  const std::size_t L = out.profile.size();
  const std::size_t q0 = (3 * L) / 4;
  const std::size_t span = L - q0;
  double first = 0.0, last = 0.0;
  if (span >= 2) {
    const std::size_t bucket = std::max<std::size_t>(1, span / 4);
    for (std::size_t i = q0; i < std::min(q0 + bucket, L); ++i) first += out.profile[i];
    first /= static_cast<double>(std::min(q0 + bucket, L) - q0);
    for (std::size_t i = L - bucket; i < L; ++i) last += out.profile[i];
    last /= static_cast<double>(bucket);
    out.decreasing_final_quarter = last <= 0.9 * first + 1e-300;
  } else {
    out.decreasing_final_quarter = true;
  }
  out.flag = out.decreasing_final_quarter && out.terminal < tail_tol;
  return out;
}

}  // namespace mvfbsde
