#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>

#include "mvfbsde/ensemble.hpp"
#include "mvfbsde/errors.hpp"

namespace mvfbsde {

enum class H2Case { Case1, Case2 };

// Flexible monotonicity functionals evaluated on paired mini-ensembles
// standing in for L²(Ω) elements: samples of a and b with the same index
// form the coupled pair.
using PhiFn = std::function<double(double t, const EmpiricalLaw& a, const EmpiricalLaw& b)>;

/// Every scalar gate parameter of the well-posedness theory in one place.
/// kappa_x/kappa_y are the drift/driver monotonicity rates, l the joint
/// Lipschitz bound, (l_sigma, l_z, l_phi, gamma, beta1, beta2, G, phi1,
/// phi2) the generalized monotonicity data.
struct ConstantsBundle {
  double K = 0.0;
  double kappa_x = 0.0;
  double kappa_y = 0.0;
  double l = 0.0;
  double l_sigma = 0.0;
  double l_z = 0.0;
  double l_phi = 0.0;
  double gamma = 0.5;
  double beta1 = 0.0;
  double beta2 = 0.0;
  Eigen::MatrixXd G;  // m×n
  PhiFn phi1;         // on X-laws; null = 0
  PhiFn phi2;         // on joint laws; null = 0
  H2Case monotonicity_case = H2Case::Case1;

  void validate() const;  // γ ∈ (0,1), β₁+β₂ > 0, finite entries
};

inline void ConstantsBundle::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::MissingConstant, "gamma must lie in (0,1)");
  if (!(beta1 + beta2 > 0.0))
    throw Error(ErrorCode::MissingConstant, "beta1 + beta2 must be positive");
  if (beta1 < 0.0 || beta2 < 0.0)
    throw Error(ErrorCode::MissingConstant, "beta1, beta2 must be nonnegative");
  for (double v : {K, kappa_x, kappa_y, l, l_sigma, l_z, l_phi})
    if (!finite(v)) throw Error(ErrorCode::MissingConstant, "non-finite constant");
}

// Inputs of the forward a priori estimate audit (drift/volatility
// monotonicity and Lipschitz rates plus the zero-point profiles).
struct SdeAuditData {
  double kappa_x = 0.0;
  double K = 0.0;
  double l_sigma_x = 0.0;
  double l_sigma_mu = 0.0;
  double l_b_mu = 0.0;
  std::function<double(double)> b0_sq;     // |b(t, 0, δ₀)|²; null = 0
  std::function<double(double)> sigma0_sq; // |σ(t, 0, δ₀)|²; null = 0
};

struct BsdeAuditData {
  double kappa_y = 0.0;
  double K = 0.0;
  double l_z = 0.0;
  double l_mu_y = 0.0;
  double l_mu_z = 0.0;
  std::function<double(double)> f0_sq;  // |f(t, 0, 0, δ₀, δ₀)|²; null = 0
};

}  // namespace mvfbsde
