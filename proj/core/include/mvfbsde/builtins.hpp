#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvfbsde/coefficients.hpp"
#include "mvfbsde/constants.hpp"
#include "mvfbsde/control_problem.hpp"

namespace mvfbsde {

/// A catalog problem: coefficients (direct FBSDE form and/or control-problem
/// form), the constants bundle carrying its gate parameters, and the
/// Lipschitz data its audits need.
struct BuiltinProblem {
  std::string name;
  Dims dims;  // FBSDE dimensions (adjoint = state for control problems)
  std::optional<CoefficientSet> fbsde;
  std::optional<ControlProblemSpec> control;
  std::optional<LQSpec> lq;
  ConstantsBundle constants;
  InitialSampler initial;
  SdeAuditData sde_audit;
  BsdeAuditData bsde_audit;
  double default_T = 10.0;
};

// Known names: decoupled_ou, constant_driver_bsde, scalar_lq_meanfield,
// drift_control_constant_sigma.
BuiltinProblem builtin(const std::string& name);
std::vector<std::string> builtin_names();

// φ₂ = squared control gap E|α̂(Θ₁)−α̂(Θ₂)|² for an LQ problem, the §4
// choice of flexible function.
PhiFn lq_control_gap_phi(const LQSpec& lq);

}  // namespace mvfbsde
