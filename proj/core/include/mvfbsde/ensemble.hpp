#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mvfbsde/grid.hpp"

namespace mvfbsde {

struct Dims {
  std::size_t n = 1;  // state
  std::size_t m = 1;  // adjoint
  std::size_t d = 1;  // noise
  std::size_t zw() const { return m * d; }
  std::size_t total() const { return n + m + m * d; }
};

// Non-owning view of M samples in R^k, assembled from up to three
// contiguous blocks (the (X, Y, Z) slices of an ensemble at one node).
// Means and second moments are computed once at construction; coefficient
// code reads them in O(1) per particle.
class EmpiricalLaw {
 public:
  EmpiricalLaw() = default;
  EmpiricalLaw(const double* data, std::size_t count, std::size_t width);

  static EmpiricalLaw joint(const double* x, std::size_t n, const double* y, std::size_t m,
                            const double* z, std::size_t zw, std::size_t count);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }

  double coord(std::size_t sample, std::size_t c) const {
    for (const auto& s : segments_) {
      if (c < s.width) return s.data[sample * s.width + c];
      c -= s.width;
    }
    return 0.0;
  }

  double mean(std::size_t c) const { return means_[c]; }
  /// Mean of |ξ|² over all coordinates.
  double second_moment() const { return second_moment_; }
  /// Mean of the squared norm restricted to coordinates [c0, c0+w).
  double second_moment_block(std::size_t c0, std::size_t w) const;

  // Segment accessors for hot paths (x/y/z blocks in joint() order).
  std::size_t segment_count() const { return nseg_; }
  const double* segment_data(std::size_t s) const { return segments_[s].data; }
  std::size_t segment_width(std::size_t s) const { return segments_[s].width; }

 private:
  struct Segment {
    const double* data = nullptr;
    std::size_t width = 0;
  };
  void finalize();

  std::array<Segment, 3> segments_{};
  std::size_t nseg_ = 0;
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> means_;
  std::vector<double> sq_means_;  // per-coordinate mean of squares
  double second_moment_ = 0.0;
};

// View of one path component: M particles × `levels` nodes × width.
// Data is level-major: value(p, i, c) = data[(i*M + p)*width + c].
struct PathView {
  const double* data = nullptr;
  std::size_t particles = 0;
  std::size_t levels = 0;
  std::size_t width = 0;

  bool empty() const { return data == nullptr; }
  const double* level(std::size_t i) const { return data + i * particles * width; }
  double value(std::size_t p, std::size_t i, std::size_t c) const {
    return data[(i * particles + p) * width + c];
  }
};

/// M particle trajectories of (X, Y, Z) on a grid. X and Y live on the
/// N+1 nodes; Z lives on the N step intervals (left endpoints).
class PathEnsemble {
 public:
  PathEnsemble() = default;
  PathEnsemble(Dims dims, TimeGrid grid, std::size_t particles, std::uint64_t seed);

  const Dims& dims() const { return dims_; }
  const TimeGrid& grid() const { return grid_; }
  std::size_t particles() const { return particles_; }
  std::uint64_t seed() const { return seed_; }

  double* x_level(std::size_t i) { return x_.data() + i * particles_ * dims_.n; }
  double* y_level(std::size_t i) { return y_.data() + i * particles_ * dims_.m; }
  double* z_level(std::size_t i) { return z_.data() + i * particles_ * dims_.zw(); }
  const double* x_level(std::size_t i) const { return x_.data() + i * particles_ * dims_.n; }
  const double* y_level(std::size_t i) const { return y_.data() + i * particles_ * dims_.m; }
  const double* z_level(std::size_t i) const { return z_.data() + i * particles_ * dims_.zw(); }

  bool has_x() const { return !x_.empty(); }
  bool has_y() const { return !y_.empty(); }
  bool has_z() const { return !z_.empty(); }

  PathView x_view() const { return {x_.data(), particles_, grid_.N + 1, dims_.n}; }
  PathView y_view() const { return {y_.data(), particles_, grid_.N + 1, dims_.m}; }
  PathView z_view() const { return {z_.data(), particles_, grid_.N, dims_.zw()}; }

  EmpiricalLaw x_law(std::size_t i) const {
    return EmpiricalLaw(x_level(i), particles_, dims_.n);
  }
  EmpiricalLaw joint_law(std::size_t i) const;

  void allocate_x() { x_.assign((grid_.N + 1) * particles_ * dims_.n, 0.0); }
  void allocate_y() { y_.assign((grid_.N + 1) * particles_ * dims_.m, 0.0); }
  void allocate_z() { z_.assign(grid_.N * particles_ * dims_.zw(), 0.0); }

  std::vector<double>& x_storage() { return x_; }
  std::vector<double>& y_storage() { return y_; }
  std::vector<double>& z_storage() { return z_; }

  bool all_finite() const;

 private:
  Dims dims_;
  TimeGrid grid_;
  std::size_t particles_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> x_, y_, z_;
};

// Draws one particle's initial state into out[0..n).
using InitialSampler =
    std::function<void(std::uint64_t seed, std::size_t particle, double* out)>;

InitialSampler deterministic_initial(std::vector<double> point);
InitialSampler gaussian_initial(std::vector<double> mean, std::vector<double> stddev);

}  // namespace mvfbsde
