#pragma once

// Least-squares Monte Carlo conditional expectations: standardized
// monomial basis on the conditioning state, Gram assembled with
// deterministic chunked sums, one shared fit for any number of targets.
// Internal to the library.

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <vector>

#include "mvfbsde/errors.hpp"
#include "mvfbsde/parallel.hpp"

namespace mvfbsde::detail {

inline constexpr std::size_t kMaxBasis = 16;

class Regression {
 public:
  // degree 0 (constant) reproduces the sample-mean estimator.
  Regression(std::size_t state_dim, int degree) : n_(state_dim), degree_(degree) {
    if (degree_ < 0 || degree_ > 3)
      throw Error(ErrorCode::IllConditionedRegression, "polynomial degree must be in {0,1,2,3}");
    // Monomial exponent table for up to degree 3 in n variables.
    terms_.push_back({});  // constant
    if (degree_ >= 1)
      for (std::size_t c = 0; c < n_; ++c) terms_.push_back({c});
    if (degree_ >= 2)
      for (std::size_t c = 0; c < n_; ++c)
        for (std::size_t e = c; e < n_; ++e) terms_.push_back({c, e});
    if (degree_ >= 3)
      for (std::size_t c = 0; c < n_; ++c)
        for (std::size_t e = c; e < n_; ++e)
          for (std::size_t g = e; g < n_; ++g) terms_.push_back({c, e, g});
    if (terms_.size() > kMaxBasis)
      throw Error(ErrorCode::IllConditionedRegression, "basis too large");
  }

  std::size_t basis_size() const { return active_.empty() ? terms_.size() : active_.size(); }

  // Computes per-coordinate standardization from the conditioning slice and
  // drops directions with (numerically) zero spread — a deterministic
  // initial condition degrades gracefully to the constant basis.
  void prepare(const double* x, std::size_t count) {
    mean_.assign(n_, 0.0);
    inv_std_.assign(n_, 0.0);
    if (degree_ > 0 && x) {
      std::vector<double> sums(2 * n_, 0.0);
      chunked_sum_vec(count, 2 * n_, sums.data(), [&](std::size_t p, double* acc) {
        for (std::size_t c = 0; c < n_; ++c) {
          const double v = x[p * n_ + c];
          acc[c] += v;
          acc[n_ + c] += v * v;
        }
      });
      const double inv = 1.0 / static_cast<double>(count);
      for (std::size_t c = 0; c < n_; ++c) {
        mean_[c] = sums[c] * inv;
        const double var = std::max(0.0, sums[n_ + c] * inv - mean_[c] * mean_[c]);
        const double sd = std::sqrt(var);
        inv_std_[c] = sd > 1e-12 * (1.0 + std::abs(mean_[c])) ? 1.0 / sd : 0.0;
      }
    }
    active_.clear();
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      bool ok = true;
      for (std::size_t c : terms_[k]) ok = ok && inv_std_[c] > 0.0;
      if (ok) active_.push_back(k);
    }
    x_ = x;
    count_ = count;
  }

  void basis_row(std::size_t p, double* phi) const {
    for (std::size_t a = 0; a < active_.size(); ++a) {
      double v = 1.0;
      for (std::size_t c : terms_[active_[a]]) v *= (x_[p * n_ + c] - mean_[c]) * inv_std_[c];
      phi[a] = v;
    }
  }

  // Fits `width` targets at once; target(p, out_row) fills the particle's
  // target values. Coefficients land in beta (k × width, column = target).
  void fit(std::size_t width, const std::function<void(std::size_t, double*)>& target,
           Eigen::MatrixXd& beta) const {
    const std::size_t k = active_.size();
    const std::size_t stride = k * k + k * width;
    std::vector<double> acc(stride, 0.0);
    std::vector<double> partials(num_chunks(count_) * stride, 0.0);
    parallel_chunks(count_, [&](std::size_t b, std::size_t e, std::size_t ci) {
      double* a = partials.data() + ci * stride;
      std::array<double, kMaxBasis> phi;
      std::vector<double> tgt(width);
      for (std::size_t p = b; p < e; ++p) {
        basis_row(p, phi.data());
        target(p, tgt.data());
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = i; j < k; ++j) a[i * k + j] += phi[i] * phi[j];
          for (std::size_t w = 0; w < width; ++w) a[k * k + i * width + w] += phi[i] * tgt[w];
        }
      }
    });
    for (std::size_t c = 0; c < num_chunks(count_); ++c)
      for (std::size_t s = 0; s < stride; ++s) acc[s] += partials[c * stride + s];

    Eigen::MatrixXd gram(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        gram(i, j) = (i <= j ? acc[i * k + j] : acc[j * k + i]) / static_cast<double>(count_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
      throw Error(ErrorCode::IllConditionedRegression,
                  "normal equations condition exceeds 1e12");
    Eigen::MatrixXd rhs(k, width);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t w = 0; w < width; ++w)
        rhs(i, w) = acc[k * k + i * width + w] / static_cast<double>(count_);
    beta = gram.ldlt().solve(rhs);
  }

  void apply(std::size_t p, const Eigen::MatrixXd& beta, double* out) const {
    std::array<double, kMaxBasis> phi;
    basis_row(p, phi.data());
    const std::size_t k = active_.size();
    const auto width = static_cast<std::size_t>(beta.cols());
    for (std::size_t w = 0; w < width; ++w) {
      double v = 0.0;
      for (std::size_t i = 0; i < k; ++i) v += phi[i] * beta(i, w);
      out[w] = v;
    }
  }

 private:
  std::size_t n_;
  int degree_;
  std::vector<std::vector<std::size_t>> terms_;  // exponents as repeated coord indices
  std::vector<std::size_t> active_;
  std::vector<double> mean_, inv_std_;
  const double* x_ = nullptr;
  std::size_t count_ = 0;
};

}  // namespace mvfbsde::detail
