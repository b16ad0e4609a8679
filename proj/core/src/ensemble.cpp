#include "mvfbsde/ensemble.hpp"

#include <cmath>

#include "mvfbsde/errors.hpp"
#include "mvfbsde/parallel.hpp"
#include "mvfbsde/rng.hpp"

namespace mvfbsde {

EmpiricalLaw::EmpiricalLaw(const double* data, std::size_t count, std::size_t width) {
  segments_[0] = {data, width};
  nseg_ = 1;
  count_ = count;
  finalize();
}

EmpiricalLaw EmpiricalLaw::joint(const double* x, std::size_t n, const double* y, std::size_t m,
                                 const double* z, std::size_t zw, std::size_t count) {
  EmpiricalLaw law;
  law.count_ = count;
  if (x && n) law.segments_[law.nseg_++] = {x, n};
  if (y && m) law.segments_[law.nseg_++] = {y, m};
  if (z && zw) law.segments_[law.nseg_++] = {z, zw};
  law.finalize();
  return law;
}

void EmpiricalLaw::finalize() {
  dim_ = 0;
  for (std::size_t s = 0; s < nseg_; ++s) dim_ += segments_[s].width;
  means_.assign(dim_, 0.0);
  sq_means_.assign(dim_, 0.0);
  if (count_ == 0 || dim_ == 0) return;

  std::vector<double> sums(2 * dim_, 0.0);
  chunked_sum_vec(count_, 2 * dim_, sums.data(), [&](std::size_t p, double* acc) {
    std::size_t off = 0;
    for (std::size_t s = 0; s < nseg_; ++s) {
      const double* row = segments_[s].data + p * segments_[s].width;
      for (std::size_t c = 0; c < segments_[s].width; ++c) {
        acc[off + c] += row[c];
        acc[dim_ + off + c] += row[c] * row[c];
      }
      off += segments_[s].width;
    }
  });
  second_moment_ = 0.0;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t c = 0; c < dim_; ++c) {
    means_[c] = sums[c] * inv;
    sq_means_[c] = sums[dim_ + c] * inv;
    second_moment_ += sq_means_[c];
  }
}

double EmpiricalLaw::second_moment_block(std::size_t c0, std::size_t w) const {
  double s = 0.0;
  for (std::size_t c = c0; c < c0 + w; ++c) s += sq_means_[c];
  return s;
}

PathEnsemble::PathEnsemble(Dims dims, TimeGrid grid, std::size_t particles, std::uint64_t seed)
    : dims_(dims), grid_(grid), particles_(particles), seed_(seed) {
  if (particles_ < 2) throw Error(ErrorCode::ShapeMismatch, "ensemble needs M >= 2 particles");
}

EmpiricalLaw PathEnsemble::joint_law(std::size_t i) const {
  const double* z = (!z_.empty() && i < grid_.N) ? z_level(i) : nullptr;
  return EmpiricalLaw::joint(x_.empty() ? nullptr : x_level(i), dims_.n,
                             y_.empty() ? nullptr : y_level(i), dims_.m, z, dims_.zw(),
                             particles_);
}

bool PathEnsemble::all_finite() const {
  for (const auto* v : {&x_, &y_, &z_}) {
    for (double a : *v)
      if (!std::isfinite(a)) return false;
  }
  return true;
}

InitialSampler deterministic_initial(std::vector<double> point) {
  return [point = std::move(point)](std::uint64_t, std::size_t, double* out) {
    for (std::size_t c = 0; c < point.size(); ++c) out[c] = point[c];
  };
}

InitialSampler gaussian_initial(std::vector<double> mean, std::vector<double> stddev) {
  return [mean = std::move(mean), stddev = std::move(stddev)](std::uint64_t seed,
                                                              std::size_t p, double* out) {
    for (std::size_t c = 0; c < mean.size(); ++c)
      out[c] = mean[c] + stddev[c] * rng::normal(seed, p, rng::kInitStep, c);
  };
}

}  // namespace mvfbsde
