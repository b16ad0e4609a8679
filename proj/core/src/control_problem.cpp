#include "mvfbsde/control_problem.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mvfbsde/errors.hpp"
#include "mvfbsde/rng.hpp"

namespace mvfbsde {

namespace {

Eigen::MatrixXd invert_r(const Eigen::MatrixXd& R) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularR, "control weight R is singular");
  return lu.inverse();
}

bool law_has_joint(const EmpiricalLaw& law, std::size_t n) {
  return law.dim() >= n;
}

}  // namespace

LQSpec LQSpec::zero(Dims dims, double K) {
  LQSpec lq;
  lq.dims = dims;
  const auto n = static_cast<Eigen::Index>(dims.n);
  const auto m = static_cast<Eigen::Index>(dims.m);
  const auto nd = static_cast<Eigen::Index>(dims.n * dims.d);
  lq.b0 = Eigen::VectorXd::Zero(n);
  lq.b1 = Eigen::MatrixXd::Zero(n, n);
  lq.b2 = Eigen::MatrixXd::Zero(n, n);
  lq.b3 = Eigen::MatrixXd::Zero(n, m);
  lq.sigma0 = Eigen::VectorXd::Zero(nd);
  lq.sigma1 = Eigen::MatrixXd::Zero(nd, n);
  lq.sigma2 = Eigen::MatrixXd::Zero(nd, n);
  lq.sigma3 = Eigen::MatrixXd::Zero(nd, m);
  lq.Q = Eigen::MatrixXd::Zero(n, n);
  lq.S = Eigen::MatrixXd::Zero(m, n);
  lq.R = Eigen::MatrixXd::Identity(m, m);
  lq.Qbar = Eigen::MatrixXd::Zero(n, n);
  lq.K = K;
  return lq;
}

CoefficientSet lq_to_coefficients(const LQSpec& lq) {
  const Eigen::MatrixXd Rinv = invert_r(lq.R);
  const std::size_t n = lq.dims.n, m = lq.dims.m, d = lq.dims.d;
  CoefficientSet set;
  set.dims = {n, n, d};  // adjoint dimension equals the state dimension

  if (n == 1 && m == 1 && d == 1) {
    // Scalar fast path: these closures sit inside the particle hot loops.
    const double b0 = lq.b0(0), a = lq.b1(0, 0), abar = lq.b2(0, 0), b = lq.b3(0, 0);
    const double s0 = lq.sigma0(0), s1 = lq.sigma1(0, 0), s2 = lq.sigma2(0, 0),
                 s3 = lq.sigma3(0, 0);
    const double q = lq.Q(0, 0), s = lq.S(0, 0), r_inv = Rinv(0, 0), qbar = lq.Qbar(0, 0);
    const double K = lq.K;
    auto alpha_hat = [=](double x, double y, double z) {
      return -r_inv * (s * x + b * y + s3 * z);
    };
    set.drift = [=](const CoeffArgs& args, double* out) {
      const double mx = args.law->mean(0);
      for (std::size_t p = 0; p < args.count; ++p)
        out[p] = b0 + a * args.x[p] + abar * mx +
                 b * alpha_hat(args.x[p], args.y[p], args.z[p]);
    };
    set.vol = [=](const CoeffArgs& args, double* out) {
      const double mx = args.law->mean(0);
      for (std::size_t p = 0; p < args.count; ++p)
        out[p] = s0 + s1 * args.x[p] + s2 * mx +
                 s3 * alpha_hat(args.x[p], args.y[p], args.z[p]);
    };
    set.driver = [=](const CoeffArgs& args, double* out) {
      const double mx = args.law->mean(0);
      const double my = args.law->mean(1);
      const double mz = args.law->mean(2);
      for (std::size_t p = 0; p < args.count; ++p) {
        const double ah = alpha_hat(args.x[p], args.y[p], args.z[p]);
        const double dxf = q * args.x[p] + s * ah;
        out[p] = -(dxf + a * args.y[p] + 2.0 * K * args.y[p] + s1 * args.z[p] + qbar * mx +
                   abar * my + s2 * mz);
      }
    };
    return set;
  }

  // General small-matrix path; scratch allocated once per batch call.
  const auto lqc = lq;  // value copy keeps the closure self-contained
  set.drift = [lqc, Rinv](const CoeffArgs& args, double* out) {
    const std::size_t n = lqc.dims.n, m = lqc.dims.m;
    Eigen::VectorXd mx(n);
    for (std::size_t c = 0; c < n; ++c) mx(c) = args.law->mean(c);
    const Eigen::VectorXd base = lqc.b0 + lqc.b2 * mx;
    Eigen::VectorXd alpha(m), val(n);
    for (std::size_t p = 0; p < args.count; ++p) {
      Eigen::Map<const Eigen::VectorXd> x(args.x + p * n, n);
      Eigen::Map<const Eigen::VectorXd> y(args.y + p * n, n);
      Eigen::Map<const Eigen::VectorXd> z(args.z + p * n * lqc.dims.d, n * lqc.dims.d);
      alpha.noalias() = -Rinv * (lqc.S * x + lqc.b3.transpose() * y + lqc.sigma3.transpose() * z);
      val.noalias() = base + lqc.b1 * x + lqc.b3 * alpha;
      for (std::size_t c = 0; c < n; ++c) out[p * n + c] = val(c);
    }
  };
  set.vol = [lqc, Rinv](const CoeffArgs& args, double* out) {
    const std::size_t n = lqc.dims.n, m = lqc.dims.m, nd = lqc.dims.n * lqc.dims.d;
    Eigen::VectorXd mx(n);
    for (std::size_t c = 0; c < n; ++c) mx(c) = args.law->mean(c);
    const Eigen::VectorXd base = lqc.sigma0 + lqc.sigma2 * mx;
    Eigen::VectorXd alpha(m), val(nd);
    for (std::size_t p = 0; p < args.count; ++p) {
      Eigen::Map<const Eigen::VectorXd> x(args.x + p * n, n);
      Eigen::Map<const Eigen::VectorXd> y(args.y + p * n, n);
      Eigen::Map<const Eigen::VectorXd> z(args.z + p * nd, nd);
      alpha.noalias() = -Rinv * (lqc.S * x + lqc.b3.transpose() * y + lqc.sigma3.transpose() * z);
      val.noalias() = base + lqc.sigma1 * x + lqc.sigma3 * alpha;
      for (std::size_t c = 0; c < nd; ++c) out[p * nd + c] = val(c);
    }
  };
  set.driver = [lqc, Rinv](const CoeffArgs& args, double* out) {
    const std::size_t n = lqc.dims.n, m = lqc.dims.m, nd = lqc.dims.n * lqc.dims.d;
    Eigen::VectorXd mx(n), my(n), mz(nd);
    for (std::size_t c = 0; c < n; ++c) mx(c) = args.law->mean(c);
    for (std::size_t c = 0; c < n; ++c) my(c) = args.law->mean(n + c);
    for (std::size_t c = 0; c < nd; ++c) mz(c) = args.law->mean(2 * n + c);
    const Eigen::VectorXd mean_terms =
        lqc.Qbar * mx + lqc.b2.transpose() * my + lqc.sigma2.transpose() * mz;
    Eigen::VectorXd alpha(m), val(n);
    for (std::size_t p = 0; p < args.count; ++p) {
      Eigen::Map<const Eigen::VectorXd> x(args.x + p * n, n);
      Eigen::Map<const Eigen::VectorXd> y(args.y + p * n, n);
      Eigen::Map<const Eigen::VectorXd> z(args.z + p * nd, nd);
      alpha.noalias() = -Rinv * (lqc.S * x + lqc.b3.transpose() * y + lqc.sigma3.transpose() * z);
      val.noalias() = lqc.Q * x + lqc.S.transpose() * alpha + lqc.b1.transpose() * y +
                      2.0 * lqc.K * y + lqc.sigma1.transpose() * z + mean_terms;
      for (std::size_t c = 0; c < n; ++c) out[p * n + c] = -val(c);
    }
  };
  return set;
}

ControlProblemSpec lq_to_control_spec(const LQSpec& lq, InitialSampler initial) {
  // R must be invertible for the closed-form policy downstream.
  (void)invert_r(lq.R);
  ControlProblemSpec spec;
  spec.dims = lq.dims;
  const Eigen::VectorXd b0 = lq.b0;
  const Eigen::VectorXd s0 = lq.sigma0;
  spec.b0 = [b0](double) { return b0; };
  spec.b1 = lq.b1;
  spec.b2 = lq.b2;
  spec.b3 = lq.b3;
  spec.sigma0 = [s0](double) { return s0; };
  spec.sigma1 = lq.sigma1;
  spec.sigma2 = lq.sigma2;
  spec.sigma3 = lq.sigma3;
  spec.K = lq.K;
  spec.initial = std::move(initial);

  const std::size_t n = lq.dims.n, m = lq.dims.m;
  const Eigen::MatrixXd Q = lq.Q, S = lq.S, R = lq.R, Qbar = lq.Qbar;
  spec.f = [Q, S, R, Qbar, n, m](double, const double* xp, const EmpiricalLaw& mu,
                                 const double* ap) {
    Eigen::Map<const Eigen::VectorXd> x(xp, n);
    Eigen::Map<const Eigen::VectorXd> a(ap, m);
    Eigen::VectorXd mx(n);
    for (std::size_t c = 0; c < n; ++c) mx(c) = mu.mean(c);
    return 0.5 * (x.dot(Q * x) + 2.0 * a.dot(S * x) + a.dot(R * a) + mx.dot(Qbar * mx));
  };
  spec.dx_f = [Q, S, n, m](double, const double* xp, const EmpiricalLaw&, const double* ap,
                           double* out) {
    Eigen::Map<const Eigen::VectorXd> x(xp, n);
    Eigen::Map<const Eigen::VectorXd> a(ap, m);
    Eigen::Map<Eigen::VectorXd>(out, n) = Q * x + S.transpose() * a;
  };
  spec.da_f = [S, R, n, m](double, const double* xp, const EmpiricalLaw&, const double* ap,
                           double* out) {
    Eigen::Map<const Eigen::VectorXd> x(xp, n);
    Eigen::Map<const Eigen::VectorXd> a(ap, m);
    Eigen::Map<Eigen::VectorXd>(out, m) = S * x + R * a;
  };
  if (!Qbar.isZero(0.0)) {
    spec.dmu_f = [Qbar, n](double, const double*, const EmpiricalLaw& mu, const double*,
                           const double*, double* out) {
      Eigen::VectorXd mx(n);
      for (std::size_t c = 0; c < n; ++c) mx(c) = mu.mean(c);
      Eigen::Map<Eigen::VectorXd>(out, n) = Qbar * mx;
    };
  }
  if (lq.lambda_conv > 0.0) {
    spec.lambda_conv = lq.lambda_conv;
  } else {
    // Convexity modulus in α: ½λ_min(R − S Q⁻¹ Sᵀ) when Q ≻ 0, else ½λ_min(R).
    Eigen::MatrixXd eff = R;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(Q);
    if (!S.isZero(0.0) && qe.eigenvalues().minCoeff() > 1e-12)
      eff = R - S * Q.inverse() * S.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> re(eff);
    spec.lambda_conv = 0.5 * re.eigenvalues().minCoeff();
  }
  return spec;
}

ValidationReport validate_lq(const LQSpec& lq) {
  ValidationReport rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> re(lq.R);
  const double rmin = re.eigenvalues().minCoeff();
  rep.add("R symmetric positive definite", lq.R.isApprox(lq.R.transpose(), 1e-12) && rmin > 0.0,
          "lambda_min(R) = " + std::to_string(rmin));
  double schur_min = rmin;
  if (rmin > 0.0) {
    const Eigen::MatrixXd schur = lq.Q - lq.S.transpose() * lq.R.inverse() * lq.S;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(schur);
    schur_min = se.eigenvalues().minCoeff();
  }
  rep.add("Q - S^T R^{-1} S positive semidefinite", schur_min >= -1e-12,
          "lambda_min = " + std::to_string(schur_min));
  bool finite = lq.b0.allFinite() && lq.b1.allFinite() && lq.b2.allFinite() &&
                lq.b3.allFinite() && lq.sigma0.allFinite() && lq.Q.allFinite() &&
                lq.S.allFinite() && lq.R.allFinite();
  rep.add("bounded entries", finite);
  return rep;
}

ValidationReport validate_spec(const ControlProblemSpec& spec, std::uint64_t seed,
                               std::size_t points) {
  ValidationReport rep;
  const std::size_t n = spec.dims.n, m = spec.dims.m;
  rep.add("cost callable present", static_cast<bool>(spec.f));
  rep.add("dx_f present", static_cast<bool>(spec.dx_f));
  rep.add("da_f present", static_cast<bool>(spec.da_f));
  rep.add("lambda_conv positive", spec.lambda_conv > 0.0,
          "lambda_conv = " + std::to_string(spec.lambda_conv));
  if (!rep.ok) return rep;

  // Mini-ensemble stands in for the measure argument.
  const std::size_t S = 16;
  std::vector<double> mu_samples(S * n);
  for (std::size_t p = 0; p < S; ++p)
    for (std::size_t c = 0; c < n; ++c)
      mu_samples[p * n + c] = rng::normal(seed, p, rng::kAuxStep, c);
  EmpiricalLaw mu(mu_samples.data(), S, n);

  const double h = 1e-4;
  double worst_dx = 0.0, worst_da = 0.0;
  bool all_finite = true;
  std::vector<double> x(n), a(m), g(std::max(n, m)), xp(n), xm(n), ap(m), am(m);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = rng::uniform(seed, k, 0, 0) * 2.0;
    for (std::size_t c = 0; c < n; ++c) x[c] = rng::normal(seed, k, 1, c);
    for (std::size_t c = 0; c < m; ++c) a[c] = rng::normal(seed, k, 2, c);

    spec.dx_f(t, x.data(), mu, a.data(), g.data());
    for (std::size_t c = 0; c < n; ++c) {
      xp = x;
      xm = x;
      xp[c] += h;
      xm[c] -= h;
      const double fd = (spec.f(t, xp.data(), mu, a.data()) - spec.f(t, xm.data(), mu, a.data())) /
                        (2.0 * h);
      if (!std::isfinite(fd) || !std::isfinite(g[c])) all_finite = false;
      worst_dx = std::max(worst_dx, std::abs(fd - g[c]) / (1.0 + std::abs(g[c])));
    }
    spec.da_f(t, x.data(), mu, a.data(), g.data());
    for (std::size_t c = 0; c < m; ++c) {
      ap = a;
      am = a;
      ap[c] += h;
      am[c] -= h;
      const double fd = (spec.f(t, x.data(), mu, ap.data()) - spec.f(t, x.data(), mu, am.data())) /
                        (2.0 * h);
      if (!std::isfinite(fd) || !std::isfinite(g[c])) all_finite = false;
      worst_da = std::max(worst_da, std::abs(fd - g[c]) / (1.0 + std::abs(g[c])));
    }

    if (spec.sigma0) all_finite = all_finite && spec.sigma0(t).allFinite();
    if (spec.b0) all_finite = all_finite && spec.b0(t).allFinite();
  }
  rep.add("dx_f finite-difference consistency", worst_dx <= 1e-3,
          "worst relative error " + std::to_string(worst_dx));
  rep.add("da_f finite-difference consistency", worst_da <= 1e-3,
          "worst relative error " + std::to_string(worst_da));
  rep.add("finite evaluations", all_finite);
  return rep;
}

}  // namespace mvfbsde
