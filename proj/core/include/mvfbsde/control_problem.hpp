#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

#include "mvfbsde/coefficients.hpp"
#include "mvfbsde/constants.hpp"
#include "mvfbsde/ensemble.hpp"

namespace mvfbsde {

using CostFn =
    std::function<double(double t, const double* x, const EmpiricalLaw& mu, const double* a)>;
using GradFn = std::function<void(double t, const double* x, const EmpiricalLaw& mu,
                                  const double* a, double* out)>;
// ∂μ f(t, x_src, μ, a_src)(x_eval) → ℝⁿ
using MuKernel = std::function<void(double t, const double* x_src, const EmpiricalLaw& mu,
                                    const double* a_src, const double* x_eval, double* out)>;

/// Control problem with the linear state dynamics of the mean-field theory:
///   b(t,x,μ,α) = b0(t) + b1·x + b2·mean(μ) + b3·α
///   σ(t,x,μ,α) = σ0(t) + σ1·x + σ2·mean(μ) + σ3·α
/// and a general convex running cost f with explicit derivative callables.
/// σ1, σ2, σ3 act on vectors and produce row-major-flattened n×d blocks.
struct ControlProblemSpec {
  Dims dims;  // n = state, m = control, d = noise; the adjoint lives in ℝⁿ
  std::function<Eigen::VectorXd(double)> b0;      // null = 0
  Eigen::MatrixXd b1, b2;                         // n×n
  Eigen::MatrixXd b3;                             // n×m
  std::function<Eigen::VectorXd(double)> sigma0;  // → flat n·d; null = 0
  Eigen::MatrixXd sigma1, sigma2;                 // (n·d)×n
  Eigen::MatrixXd sigma3;                         // (n·d)×m

  CostFn f;
  GradFn dx_f;
  GradFn da_f;
  MuKernel dmu_f;  // null = no measure dependence of the cost

  double lambda_conv = 0.0;
  double K = 0.0;
  InitialSampler initial;
};

/// Closed-form linear-quadratic instance: cost
///   f = ½(xᵀQx + 2αᵀSx + αᵀRα + mean(μ)ᵀ·Qbar·mean(μ)).
struct LQSpec {
  Dims dims;
  Eigen::VectorXd b0;
  Eigen::MatrixXd b1, b2, b3;
  Eigen::VectorXd sigma0;                  // flat n·d
  Eigen::MatrixXd sigma1, sigma2, sigma3;  // (n·d)×n, (n·d)×n, (n·d)×m
  Eigen::MatrixXd Q, S, R;
  Eigen::MatrixXd Qbar;
  double K = 0.0;
  double lambda_conv = 0.0;

  static LQSpec zero(Dims dims, double K);
};

// Hamiltonian-system coefficients of the LQ problem: forward (b, σ)
// composed with the closed-form minimizer α̂ = −R⁻¹(Sx + b3ᵀy + σ3ᵀz),
// backward driver −[∂x f + b1ᵀy + 2Ky + σ1ᵀz + Qbar·mean + b2ᵀE[y] + σ2ᵀE[z]].
// The adjoint dimension of the produced set is n.
CoefficientSet lq_to_coefficients(const LQSpec& lq);

// The same LQ problem expressed through the generic control-problem
// surface (quadratic cost closures). Independent of lq_to_coefficients.
ControlProblemSpec lq_to_control_spec(const LQSpec& lq, InitialSampler initial);

ValidationReport validate_lq(const LQSpec& lq);

// Dimension/finiteness checks plus central finite-difference consistency
// of dx_f/da_f against f (relative error ≤ 1e-3 at h = 1e-4 on unit-scale
// sampled points). Failures are reported, not thrown.
ValidationReport validate_spec(const ControlProblemSpec& spec, std::uint64_t seed = 7,
                               std::size_t points = 32);

}  // namespace mvfbsde
