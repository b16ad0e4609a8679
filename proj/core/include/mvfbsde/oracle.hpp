#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "mvfbsde/control_problem.hpp"
#include "mvfbsde/grid.hpp"

namespace mvfbsde {
namespace oracle {

/// Closed-form Ornstein-Uhlenbeck second moments for dX = −κX dt + σ₀ dW,
/// X₀ = x₀: E|X_t|² = x₀²e^{−2κt} + σ₀²(1−e^{−2κt})/(2κ), and the exact
/// weighted integrals ∫ e^{2Kt} E|X_t|² dt over [0,T] and [0,∞).
struct OuMoments {
  std::vector<double> second_moment;  // per grid node
  double weighted_norm = 0.0;
  double weighted_norm_infinite = 0.0;
};

OuMoments ou_moments(double kappa, double sigma0, double x0, double K, const TimeGrid& grid);

// Bounded-solution selection for linear(izable) backward ODEs: integrates
// y' = rhs(t, y) from y(T) = terminal down to 0 with RK4 on the grid.
// Matches the zero-terminal truncation of the BSDE scheme.
std::vector<Eigen::VectorXd> backward_ode(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
    const Eigen::VectorXd& terminal, const TimeGrid& grid);

/// Two-Riccati decomposition of the mean-field LQ Hamiltonian system with
/// constant volatility: Y_t = p(t)X_t + p̄(t)E[X_t] + ρ(t), with p, p̄, ρ
/// integrated backward from zero terminal data. The value() is the cost of
/// the truncated-horizon problem under this feedback, computed from the
/// deterministic moment ODEs — independent of any particle simulation.
struct RiccatiSolution {
  TimeGrid grid;
  Dims dims;
  LQSpec lq;
  std::vector<double> p;     // (N+1)·n·n, row-major per node
  std::vector<double> pbar;  // (N+1)·n·n
  std::vector<double> rho;   // (N+1)·n

  Eigen::MatrixXd p_at(std::size_t i) const;
  Eigen::MatrixXd pbar_at(std::size_t i) const;
  Eigen::VectorXd rho_at(std::size_t i) const;

  // Feedback gains at node i: α̂ = −k·x − kbar·mean − kc.
  Eigen::MatrixXd gain_k(std::size_t i) const;
  Eigen::MatrixXd gain_kbar(std::size_t i) const;
  Eigen::VectorXd gain_const(std::size_t i) const;

  void feedback(std::size_t i, const double* x, const double* mean, double* alpha_out) const;

  double value(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0) const;
  double value_deterministic(const Eigen::VectorXd& x0) const;

  Eigen::MatrixXd stationary_p;
  bool stationary_converged = false;
};

// Constant-volatility LQ only (σ1 = σ2 = σ3 = 0); requires gate (4.15).
RiccatiSolution riccati_lq(const LQSpec& lq, const TimeGrid& grid);

// Independent cross-check of the stationary p for scalar problems:
// bisection on (s + b p)²/r − 2(a + K)p − q = 0, tolerance 1e−10.
double scalar_stationary_riccati(const LQSpec& lq);

// Gate (4.15): K < −½λmax(b1+b1ᵀ) − ‖b2‖ − (‖σ1‖+‖σ2‖)²/2. Returns the
// right-hand side.
double lq_gate_bound(const LQSpec& lq);

}  // namespace oracle
}  // namespace mvfbsde
