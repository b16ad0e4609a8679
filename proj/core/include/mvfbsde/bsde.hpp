#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvfbsde/constants.hpp"
#include "mvfbsde/ensemble.hpp"
#include "mvfbsde/norms.hpp"

namespace mvfbsde {

enum class BasisKind {
  SampleMean,  // constant basis (laws / deterministic structure)
  Polynomial,  // standardized monomials in the conditioning state
};

struct BsdeRunConfig {
  TimeGrid grid;
  std::size_t particles = 0;
  std::uint64_t seed = 0;
  std::vector<double> terminal;  // Y_T, length m; empty = 0 (truncation default)
  BasisKind basis = BasisKind::SampleMean;
  int poly_degree = 2;      // 1..3
  PathView conditioning{};  // forward X path (N+1 levels); empty = none
  bool store_paths = true;
  std::size_t noise_cache_budget = 0;
};

// Driver inputs at one backward step: the regression projections of
// Y_{i+1}, the fitted Z_i, and the empirical laws of (Y_{i+1}, Z_i).
struct DriverArgs {
  double t = 0.0;
  std::size_t count = 0;
  const double* y_proj = nullptr;  // count × m
  const double* z = nullptr;       // count × (m·d)
  const EmpiricalLaw* law_y = nullptr;
  const EmpiricalLaw* law_z = nullptr;
};
using DriverFn = std::function<void(const DriverArgs&, double* out)>;

struct BsdeResult {
  PathEnsemble paths;  // Y (N+1 levels) and Z (N levels) when stored
  std::vector<double> y0_mean;
  double y0_second_moment = 0.0;
  WeightedNormReport y_norm, z_norm;
  // |mean regression residual| / (std/√M) per step; centered increments
  // should keep these O(1).
  std::vector<double> residual_zscores;
};

// Backward induction: Z_i = Ê[Y_{i+1}·ΔW_iᵀ | X_i]/dt,
// Y_i = Ê[Y_{i+1} | X_i] − f(t_i, ·)·dt, with Ê the configured regression
// and ΔW re-derived from the same counter streams the forward pass used.
BsdeResult solve_bsde(const DriverFn& driver, Dims dims, const BsdeRunConfig& cfg);

struct BsdeAuditReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double y_coef = 0.0;  // 2K − 2κy − 2l_z² − 2l_μz² − 2l_μy − 3ε
  double z_coef = 0.0;  // ε/(l_z²+l_μz²+ε)
  double eps = 0.0;
  double slack = 0.0;
  bool flag = false;
};

BsdeAuditReport audit_bsde_apriori(const BsdeAuditData& data, double y0_second_moment,
                                   const WeightedNormReport& y_norm,
                                   const WeightedNormReport& z_norm, const TimeGrid& grid,
                                   std::size_t particles, double eps = 0.1,
                                   double slack = -1.0);

}  // namespace mvfbsde
