#pragma once

#include <cstdint>
#include <optional>

#include "mvfbsde/coefficients.hpp"
#include "mvfbsde/constants.hpp"
#include "mvfbsde/ensemble.hpp"
#include "mvfbsde/norms.hpp"

namespace mvfbsde {

struct SdeRunConfig {
  TimeGrid grid;
  std::size_t particles = 0;
  std::uint64_t seed = 0;
  bool store_paths = true;
  // Frozen (Y, Z) paths feeding coupled drift/volatility (homotopy inner
  // steps and solve-sde on coupled problems). Empty views = zeros omitted.
  PathView frozen_y{};
  PathView frozen_z{};
  double blowup_threshold = 1e12;
  std::size_t noise_cache_budget = 0;  // bytes; 0 disables the cache
};

struct SdeResult {
  PathEnsemble paths;  // X filled when store_paths; always carries grid/dims
  WeightedNormReport norm;
  TailProfile tail;
  std::vector<double> mean_path;  // E[X_{t_i}], flattened n per node
  double initial_second_moment = 0.0;
};

// Euler-Maruyama with the empirical law of the current level plugged into
// (b, σ). ΔW_{p,i} comes from the particle's counter-derived stream. Gate
// violations are not enforced here; audits judge.
SdeResult solve_sde(const CoefficientSet& coeffs, const SdeRunConfig& cfg,
                    const InitialSampler& initial);

struct SdeAuditReport {
  double coef = 0.0;  // 2κx − 2K − 2l_bμ − (l_σx+l_σμ)² − 3ε
  double lhs = 0.0;
  double rhs = 0.0;
  double eps = 0.0;
  double slack = 0.0;
  bool flag = false;
};

// A priori estimate audit: LHS = coef·‖X‖²_K against the initial-data and
// zero-point integrals. eps ≤ 0 selects the default
// (κx − K − (l_σx+l_σμ)²/2 − l_bμ)/6; slack < 0 selects 5·dt + 3·M^{−1/2}.
SdeAuditReport audit_sde_apriori(const SdeAuditData& data, double x_norm_sq,
                                 double initial_second_moment, const TimeGrid& grid,
                                 std::size_t particles, double eps = -1.0,
                                 double slack = -1.0);

}  // namespace mvfbsde
