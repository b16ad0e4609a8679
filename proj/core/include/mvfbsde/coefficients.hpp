#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mvfbsde/ensemble.hpp"

namespace mvfbsde {

// One time-slice of evaluation inputs. y/z are null when the component is
// not in play (pure SDE legs, frozen-argument solves fill them in).
// `law` is the empirical law of whatever components are present.
struct CoeffArgs {
  double t = 0.0;
  std::size_t count = 0;
  const double* x = nullptr;  // count × n
  const double* y = nullptr;  // count × m
  const double* z = nullptr;  // count × (m·d)
  const EmpiricalLaw* law = nullptr;
};

// Batch evaluation: one call per (time level, coefficient), writing all
// particles. This is the engine-facing contract; the per-particle spec
// signature is wrapped by from_pointwise below.
using CoeffFn = std::function<void(const CoeffArgs&, double* out)>;

// Per-particle form of the same map, for user problems and tests.
using PointwiseFn = std::function<void(double t, const double* x, const double* y,
                                       const double* z, const EmpiricalLaw& law, double* out)>;

/// Evaluable data (B, F, σ) of the coupled forward-backward system, all
/// taking (t, x, y, z, law). B → ℝⁿ, F → ℝᵐ, σ → ℝ^{n×d} (row-major flat).
/// Callables must be pure: they are invoked concurrently across particles.
struct CoefficientSet {
  Dims dims;
  CoeffFn drift;   // B
  CoeffFn driver;  // F
  CoeffFn vol;     // σ

  static CoefficientSet from_pointwise(Dims dims, PointwiseFn B, PointwiseFn F, PointwiseFn S);
};

struct ValidationItem {
  std::string check;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationItem> items;
  void add(const std::string& check, bool passed, const std::string& detail = "");
};

}  // namespace mvfbsde
