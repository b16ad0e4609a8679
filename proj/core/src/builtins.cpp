#include "mvfbsde/builtins.hpp"

#include <Eigen/Dense>

#include "mvfbsde/errors.hpp"

namespace mvfbsde {

PhiFn lq_control_gap_phi(const LQSpec& lq) {
  const Eigen::MatrixXd Rinv = lq.R.fullPivLu().inverse();
  const std::size_t n = lq.dims.n, nd = lq.dims.n * lq.dims.d;
  const Eigen::MatrixXd S = lq.S, b3t = lq.b3.transpose(), s3t = lq.sigma3.transpose();
  return [Rinv, S, b3t, s3t, n, nd](double, const EmpiricalLaw& a,
                                    const EmpiricalLaw& b) -> double {
    const std::size_t m = Rinv.rows();
    Eigen::VectorXd xa(n), ya(n), za(nd), xb(n), yb(n), zb(nd);
    double acc = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      for (std::size_t c = 0; c < n; ++c) {
        xa(c) = a.coord(p, c);
        ya(c) = a.coord(p, n + c);
        xb(c) = b.coord(p, c);
        yb(c) = b.coord(p, n + c);
      }
      for (std::size_t c = 0; c < nd; ++c) {
        za(c) = a.coord(p, 2 * n + c);
        zb(c) = b.coord(p, 2 * n + c);
      }
      const Eigen::VectorXd da =
          -Rinv * (S * (xa - xb) + b3t * (ya - yb) + s3t * (za - zb));
      acc += da.squaredNorm();
      (void)m;
    }
    return acc / static_cast<double>(a.size());
  };
}

namespace {

Eigen::MatrixXd id1() { return Eigen::MatrixXd::Identity(1, 1); }

BuiltinProblem make_decoupled_ou() {
  BuiltinProblem p;
  p.name = "decoupled_ou";
  p.dims = {1, 1, 1};
  const double kx = 1.0, ky = -2.0, sigma0 = 1.0, K = -0.5;

  CoefficientSet set;
  set.dims = p.dims;
  set.drift = [kx](const CoeffArgs& a, double* out) {
    for (std::size_t i = 0; i < a.count; ++i) out[i] = -kx * a.x[i];
  };
  set.driver = [ky](const CoeffArgs& a, double* out) {
    for (std::size_t i = 0; i < a.count; ++i) out[i] = -ky * a.y[i];
  };
  set.vol = [sigma0](const CoeffArgs& a, double* out) {
    for (std::size_t i = 0; i < a.count; ++i) out[i] = sigma0;
  };
  p.fbsde = std::move(set);

  p.constants.K = K;
  p.constants.kappa_x = kx;
  p.constants.kappa_y = ky;
  p.constants.l = 2.0;
  p.constants.l_sigma = 0.5;
  p.constants.l_z = 0.5;
  p.constants.l_phi = 1.0;
  p.constants.gamma = 0.5;
  p.constants.beta2 = 1.0;
  p.constants.G = id1();

  p.initial = deterministic_initial({1.0});
  p.sde_audit = {kx, K, 0.0, 0.0, 0.0, nullptr,
                 [sigma0](double) { return sigma0 * sigma0; }};
  p.bsde_audit = {ky, K, 0.0, 0.0, 0.0, nullptr};
  return p;
}

BuiltinProblem make_constant_driver_bsde() {
  BuiltinProblem p;
  p.name = "constant_driver_bsde";
  p.dims = {1, 1, 1};
  const double K = -0.5;

  CoefficientSet set;
  set.dims = p.dims;
  set.drift = [](const CoeffArgs& a, double* out) {
    for (std::size_t i = 0; i < a.count; ++i) out[i] = 0.0;
  };
  set.driver = [](const CoeffArgs& a, double* out) {
    for (std::size_t i = 0; i < a.count; ++i) out[i] = a.y[i] - 1.0;
  };
  set.vol = [](const CoeffArgs& a, double* out) {
    for (std::size_t i = 0; i < a.count; ++i) out[i] = 0.0;
  };
  p.fbsde = std::move(set);

  p.constants.K = K;
  p.constants.kappa_x = 0.0;
  p.constants.kappa_y = -1.0;
  p.constants.l = 1.0;
  p.constants.l_sigma = 0.25;
  p.constants.l_z = 0.25;
  p.constants.l_phi = 1.0;
  p.constants.gamma = 0.5;
  p.constants.beta2 = 1.0;
  p.constants.G = id1();

  p.initial = deterministic_initial({0.0});
  p.sde_audit = {0.0, K, 0.0, 0.0, 0.0, nullptr, nullptr};
  p.bsde_audit = {-1.0, K, 0.0, 0.0, 0.0, [](double) { return 1.0; }};
  return p;
}

BuiltinProblem make_scalar_lq_meanfield() {
  BuiltinProblem p;
  p.name = "scalar_lq_meanfield";
  p.dims = {1, 1, 1};
  const double a = -1.0, abar = 0.2, b = 1.0, sigma0 = 0.5, q = 1.0, r = 1.0, K = -0.1;

  LQSpec lq = LQSpec::zero({1, 1, 1}, K);
  lq.b1(0, 0) = a;
  lq.b2(0, 0) = abar;
  lq.b3(0, 0) = b;
  lq.sigma0(0) = sigma0;
  lq.Q(0, 0) = q;
  lq.R(0, 0) = r;
  lq.lambda_conv = 0.5 * r;
  p.initial = deterministic_initial({1.0});
  p.control = lq_to_control_spec(lq, p.initial);
  p.fbsde = lq_to_coefficients(lq);
  p.lq = std::move(lq);

  // Theorem 4.6 construction: gate (4.15) bound is -a - |abar| = 0.8, so the
  // slack is 0.8 - K = 0.9 and κx = 0.8 - 0.45, κy = -0.8 + 2K + 0.45.
  p.constants.K = K;
  p.constants.kappa_x = 0.35;
  p.constants.kappa_y = -0.55;
  p.constants.l = 2.0;
  p.constants.l_sigma = 0.45;
  p.constants.l_z = 0.45;
  p.constants.l_phi = 1.0;
  p.constants.gamma = 0.5;
  p.constants.beta2 = 2.0 * p.lq->lambda_conv;
  p.constants.G = id1();
  p.constants.phi2 = lq_control_gap_phi(*p.lq);

  p.sde_audit = {-a, K, 0.0, 0.0, abar, nullptr,
                 [sigma0](double) { return sigma0 * sigma0; }};
  p.bsde_audit = {a + 2.0 * K, K, 0.0, abar, 0.0, nullptr};
  return p;
}

BuiltinProblem make_drift_control_constant_sigma() {
  BuiltinProblem p;
  p.name = "drift_control_constant_sigma";
  p.dims = {1, 1, 1};
  const double a = -1.0, abar = 0.25, b = 1.0, sigma0 = 0.4, q = 1.0, r = 1.0, K = -0.5;

  LQSpec lq = LQSpec::zero({1, 1, 1}, K);
  lq.b1(0, 0) = a;
  lq.b2(0, 0) = abar;
  lq.b3(0, 0) = b;
  lq.sigma0(0) = sigma0;
  lq.Q(0, 0) = q;
  lq.R(0, 0) = r;
  lq.lambda_conv = 0.5 * r;
  p.initial = deterministic_initial({1.0});
  p.control = lq_to_control_spec(lq, p.initial);
  p.fbsde = lq_to_coefficients(lq);
  p.lq = std::move(lq);

  // Gate bound -a - |abar| = 0.75; slack 1.25.
  p.constants.K = K;
  p.constants.kappa_x = 0.125;
  p.constants.kappa_y = -1.125;
  p.constants.l = 2.0;
  p.constants.l_sigma = 0.6;
  p.constants.l_z = 0.6;
  p.constants.l_phi = 1.0;
  p.constants.gamma = 0.5;
  p.constants.beta2 = 2.0 * p.lq->lambda_conv;
  p.constants.G = id1();
  p.constants.phi2 = lq_control_gap_phi(*p.lq);

  p.sde_audit = {-a, K, 0.0, 0.0, abar, nullptr,
                 [sigma0](double) { return sigma0 * sigma0; }};
  p.bsde_audit = {a + 2.0 * K, K, 0.0, abar, 0.0, nullptr};
  return p;
}

}  // namespace

BuiltinProblem builtin(const std::string& name) {
  if (name == "decoupled_ou") return make_decoupled_ou();
  if (name == "constant_driver_bsde") return make_constant_driver_bsde();
  if (name == "scalar_lq_meanfield") return make_scalar_lq_meanfield();
  if (name == "drift_control_constant_sigma") return make_drift_control_constant_sigma();
  throw Error(ErrorCode::UnknownProblem, "no builtin named '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"decoupled_ou", "constant_driver_bsde", "scalar_lq_meanfield",
          "drift_control_constant_sigma"};
}

}  // namespace mvfbsde
