#include "mvfbsde/coefficients.hpp"

namespace mvfbsde {

CoefficientSet CoefficientSet::from_pointwise(Dims dims, PointwiseFn B, PointwiseFn F,
                                              PointwiseFn S) {
  CoefficientSet set;
  set.dims = dims;
  const std::size_t n = dims.n, m = dims.m, zw = dims.zw();
  auto make = [n, m, zw](PointwiseFn fn, std::size_t w) -> CoeffFn {
    return [fn = std::move(fn), n, m, zw, w](const CoeffArgs& a, double* out) {
      for (std::size_t p = 0; p < a.count; ++p) {
        fn(a.t, a.x ? a.x + p * n : nullptr, a.y ? a.y + p * m : nullptr,
           a.z ? a.z + p * zw : nullptr, *a.law, out + p * w);
      }
    };
  };
  set.drift = make(std::move(B), n);
  set.driver = make(std::move(F), m);
  set.vol = make(std::move(S), dims.n * dims.d);
  return set;
}

void ValidationReport::add(const std::string& check, bool passed, const std::string& detail) {
  items.push_back({check, passed, detail});
  ok = ok && passed;
}

}  // namespace mvfbsde
