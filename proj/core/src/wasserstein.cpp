#include "mvfbsde/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mvfbsde/errors.hpp"

namespace mvfbsde {

double w2_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, W2Mode mode) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::DimensionMismatch, "law dimensions differ");
  if (a.size() != b.size())
    throw Error(ErrorCode::ShapeMismatch, "equal sample counts required");
  const std::size_t M = a.size();
  const std::size_t k = a.dim();

  if (mode == W2Mode::Exact1d) {
    if (k != 1) throw Error(ErrorCode::Exact1dOnMultiD, "exact1d requires dimension 1");
    std::vector<double> va(M), vb(M);
    for (std::size_t p = 0; p < M; ++p) {
      va[p] = a.coord(p, 0);
      vb[p] = b.coord(p, 0);
    }
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    double s = 0.0;
    for (std::size_t p = 0; p < M; ++p) {
      const double dfs = va[p] - vb[p];
      s += dfs * dfs;
    }
    return std::sqrt(s / static_cast<double>(M));
  }

  double s = 0.0;
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t c = 0; c < k; ++c) {
      const double dfs = a.coord(p, c) - b.coord(p, c);
      s += dfs * dfs;
    }
  return std::sqrt(s / static_cast<double>(M));
}

}  // namespace mvfbsde
