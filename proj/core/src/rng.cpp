#include "mvfbsde/rng.hpp"

#include <cmath>

#include "mvfbsde/parallel.hpp"

namespace mvfbsde {
namespace rng {

double normal_quantile(double u) {
  // Acklam (2003). Central region rational approximation plus tail branches.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;

  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace rng

void NoiseCache::build(std::uint64_t seed, std::size_t particles, std::size_t steps,
                       std::size_t d, std::size_t budget_bytes) {
  const std::size_t count = particles * steps * d;
  if (count == 0 || count * sizeof(float) > budget_bytes) {
    active_ = false;
    data_.clear();
    return;
  }
  particles_ = particles;
  d_ = d;
  data_.resize(count);
  parallel_chunks(steps * particles, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const std::size_t step = i / particles;
      const std::size_t p = i % particles;
      for (std::size_t c = 0; c < d; ++c)
        data_[i * d + c] = static_cast<float>(rng::normal(seed, p, step, c));
    }
  });
  active_ = true;
}

}  // namespace mvfbsde
