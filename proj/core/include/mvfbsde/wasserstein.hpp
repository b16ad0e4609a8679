#pragma once

#include "mvfbsde/ensemble.hpp"

namespace mvfbsde {

enum class W2Mode {
  Exact1d,        // order-statistics optimal coupling, dimension 1 only
  CouplingBound,  // synchronous coupling √(mean_i |a_i − b_i|²), any dimension
};

double w2_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, W2Mode mode);

}  // namespace mvfbsde
