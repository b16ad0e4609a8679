#include "mvfbsde/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mvfbsde/errors.hpp"

namespace mvfbsde {
namespace oracle {

namespace {

// ∫₀ᵀ e^{−a t} dt, stable near a = 0.
double int_exp(double a, double T) {
  if (std::abs(a) < 1e-14) return T;
  return -std::expm1(-a * T) / a;
}

}  // namespace

OuMoments ou_moments(double kappa, double sigma0, double x0, double K, const TimeGrid& grid) {
  if (!(kappa > K))
    throw Error(ErrorCode::GateViolated, "ou_moments requires kappa > K");
  OuMoments out;
  out.second_moment.resize(grid.levels());
  for (std::size_t i = 0; i < grid.levels(); ++i) {
    const double t = grid.node(i);
    const double decay = std::exp(-2.0 * kappa * t);
    const double var = std::abs(kappa) < 1e-14 ? sigma0 * sigma0 * t
                                               : sigma0 * sigma0 * -std::expm1(-2.0 * kappa * t) /
                                                     (2.0 * kappa);
    out.second_moment[i] = x0 * x0 * decay + var;
  }
  // ∫ e^{2Kt} E|X_t|² dt = x0²·I(2κ−2K) + (σ0²/2κ)(I(−2K) − I(2κ−2K)).
  const double a1 = 2.0 * kappa - 2.0 * K;
  const double a2 = -2.0 * K;
  if (std::abs(kappa) < 1e-14) {
    // E|X_t|² = x0² + σ0² t.
    auto t_int = [&](double T) {
      if (std::abs(K) < 1e-14) return 0.5 * T * T;
      const double e = std::exp(2.0 * K * T);
      return T * e / (2.0 * K) - (e - 1.0) / (4.0 * K * K);
    };
    out.weighted_norm = x0 * x0 * int_exp(a2, grid.T) + sigma0 * sigma0 * t_int(grid.T);
    out.weighted_norm_infinite =
        K < 0 ? x0 * x0 / a2 + sigma0 * sigma0 / (4.0 * K * K) : INFINITY;
    return out;
  }
  out.weighted_norm = x0 * x0 * int_exp(a1, grid.T) +
                      sigma0 * sigma0 / (2.0 * kappa) * (int_exp(a2, grid.T) - int_exp(a1, grid.T));
  if (a1 > 0 && a2 > 0)
    out.weighted_norm_infinite =
        x0 * x0 / a1 + sigma0 * sigma0 / (2.0 * kappa) * (1.0 / a2 - 1.0 / a1);
  else
    out.weighted_norm_infinite = INFINITY;
  return out;
}

std::vector<Eigen::VectorXd> backward_ode(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
    const Eigen::VectorXd& terminal, const TimeGrid& grid) {
  std::vector<Eigen::VectorXd> out(grid.levels());
  out[grid.N] = terminal;
  const double h = grid.dt;
  for (std::size_t i = grid.N; i-- > 0;) {
    const double t = grid.node(i + 1);
    const Eigen::VectorXd& y = out[i + 1];
    // RK4 with negative step.
    const Eigen::VectorXd k1 = rhs(t, y);
    const Eigen::VectorXd k2 = rhs(t - 0.5 * h, y - 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t - 0.5 * h, y - 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t - h, y - h * k3);
    out[i] = y - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return out;
}

double lq_gate_bound(const LQSpec& lq) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lq.b1 + lq.b1.transpose());
  const double lam = es.eigenvalues().maxCoeff();
  const double nb2 = lq.b2.operatorNorm();
  const double ns1 = lq.sigma1.operatorNorm();
  const double ns2 = lq.sigma2.operatorNorm();
  return -0.5 * lam - nb2 - 0.5 * (ns1 + ns2) * (ns1 + ns2);
}

namespace {

struct RiccatiRhs {
  const LQSpec& lq;
  Eigen::MatrixXd Rinv;

  // State stacked as [p (n×n), pbar (n×n), rho (n)].
  void eval(const Eigen::MatrixXd& p, const Eigen::MatrixXd& pbar, const Eigen::VectorXd& rho,
            Eigen::MatrixXd& dp, Eigen::MatrixXd& dpbar, Eigen::VectorXd& drho) const {
    const auto& b1 = lq.b1;
    const auto& b2 = lq.b2;
    const auto& b3 = lq.b3;
    const auto& S = lq.S;
    const double K = lq.K;
    const Eigen::MatrixXd Spb3p = S + b3.transpose() * p;  // m×n
    dp = -lq.Q - b1.transpose() * p - p * b1 - 2.0 * K * p +
         (S.transpose() + p * b3) * Rinv * Spb3p;
    const Eigen::MatrixXd A1 = b1 - b3 * Rinv * Spb3p;
    const Eigen::MatrixXd A2 = b2 - b3 * Rinv * b3.transpose() * pbar;
    dpbar = -lq.Qbar - b2.transpose() * (p + pbar) - (b1.transpose() + 2.0 * K * Eigen::MatrixXd::Identity(p.rows(), p.cols())) * pbar +
            S.transpose() * Rinv * b3.transpose() * pbar - pbar * (A1 + A2) - p * A2;
    const Eigen::VectorXd c = lq.b0 - b3 * Rinv * b3.transpose() * rho;
    drho = -(b1.transpose() + b2.transpose()) * rho - 2.0 * K * rho +
           S.transpose() * Rinv * b3.transpose() * rho - (p + pbar) * c;
  }
};

void rk4_back(const RiccatiRhs& rhs, double h, Eigen::MatrixXd& p, Eigen::MatrixXd& pbar,
              Eigen::VectorXd& rho) {
  const auto n = p.rows();
  Eigen::MatrixXd k1p(n, n), k2p(n, n), k3p(n, n), k4p(n, n);
  Eigen::MatrixXd k1b(n, n), k2b(n, n), k3b(n, n), k4b(n, n);
  Eigen::VectorXd k1r(n), k2r(n), k3r(n), k4r(n);
  rhs.eval(p, pbar, rho, k1p, k1b, k1r);
  rhs.eval(p - 0.5 * h * k1p, pbar - 0.5 * h * k1b, rho - 0.5 * h * k1r, k2p, k2b, k2r);
  rhs.eval(p - 0.5 * h * k2p, pbar - 0.5 * h * k2b, rho - 0.5 * h * k2r, k3p, k3b, k3r);
  rhs.eval(p - h * k3p, pbar - h * k3b, rho - h * k3r, k4p, k4b, k4r);
  p -= (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  pbar -= (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
  rho -= (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
}

}  // namespace

RiccatiSolution riccati_lq(const LQSpec& lq, const TimeGrid& grid) {
  if (!lq.sigma1.isZero(0.0) || !lq.sigma2.isZero(0.0) || !lq.sigma3.isZero(0.0))
    throw Error(ErrorCode::MissingDerivative,
                "riccati_lq supports constant volatility only (sigma1=sigma2=sigma3=0)");
  if (!(lq.K < lq_gate_bound(lq)))
    throw Error(ErrorCode::GateViolated, "LQ gate K < bound fails in riccati_lq");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lq.R);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularR, "R singular in riccati_lq");

  const std::size_t n = lq.dims.n;
  RiccatiSolution sol;
  sol.grid = grid;
  sol.dims = lq.dims;
  sol.lq = lq;
  sol.p.assign(grid.levels() * n * n, 0.0);
  sol.pbar.assign(grid.levels() * n * n, 0.0);
  sol.rho.assign(grid.levels() * n, 0.0);

  RiccatiRhs rhs{lq, lu.inverse()};
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd pbar = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
  for (std::size_t i = grid.N; i-- > 0;) {
    rk4_back(rhs, grid.dt, p, pbar, rho);
    if (!p.allFinite() || p.norm() > 1e8)
      throw Error(ErrorCode::RiccatiBlowup, "Riccati trajectory exceeded 1e8");
    Eigen::Map<Eigen::MatrixXd>(sol.p.data() + i * n * n, n, n) = p;
    Eigen::Map<Eigen::MatrixXd>(sol.pbar.data() + i * n * n, n, n) = pbar;
    Eigen::Map<Eigen::VectorXd>(sol.rho.data() + i * n, n) = rho;
  }

  // Stationary reference: keep integrating backward (T doubled up to 4
  // times) until |p(0) − p(dt)|/dt < 1e−8.
  sol.stationary_p = p;
  double extra = grid.T;
  for (int doubling = 0; doubling <= 4; ++doubling) {
    Eigen::MatrixXd prev = sol.stationary_p;
    rk4_back(rhs, grid.dt, sol.stationary_p, pbar, rho);
    if ((sol.stationary_p - prev).norm() / grid.dt < 1e-8) {
      sol.stationary_converged = true;
      break;
    }
    if (doubling == 4) break;
    const std::size_t steps = static_cast<std::size_t>(extra / grid.dt);
    for (std::size_t s = 0; s < steps; ++s)
      rk4_back(rhs, grid.dt, sol.stationary_p, pbar, rho);
    extra *= 2.0;
  }
  return sol;
}

Eigen::MatrixXd RiccatiSolution::p_at(std::size_t i) const {
  const auto n = static_cast<Eigen::Index>(dims.n);
  return Eigen::Map<const Eigen::MatrixXd>(p.data() + i * dims.n * dims.n, n, n);
}

Eigen::MatrixXd RiccatiSolution::pbar_at(std::size_t i) const {
  const auto n = static_cast<Eigen::Index>(dims.n);
  return Eigen::Map<const Eigen::MatrixXd>(pbar.data() + i * dims.n * dims.n, n, n);
}

Eigen::VectorXd RiccatiSolution::rho_at(std::size_t i) const {
  const auto n = static_cast<Eigen::Index>(dims.n);
  return Eigen::Map<const Eigen::VectorXd>(rho.data() + i * dims.n, n);
}

Eigen::MatrixXd RiccatiSolution::gain_k(std::size_t i) const {
  return lq.R.fullPivLu().solve(lq.S + lq.b3.transpose() * p_at(i));
}

Eigen::MatrixXd RiccatiSolution::gain_kbar(std::size_t i) const {
  return lq.R.fullPivLu().solve(lq.b3.transpose() * pbar_at(i));
}

Eigen::VectorXd RiccatiSolution::gain_const(std::size_t i) const {
  return lq.R.fullPivLu().solve(lq.b3.transpose() * rho_at(i));
}

void RiccatiSolution::feedback(std::size_t i, const double* x, const double* mean,
                               double* alpha_out) const {
  const auto n = static_cast<Eigen::Index>(dims.n);
  const auto m = static_cast<Eigen::Index>(dims.m);
  Eigen::Map<const Eigen::VectorXd> xv(x, n);
  Eigen::Map<const Eigen::VectorXd> mv(mean, n);
  const Eigen::VectorXd y = p_at(i) * xv + pbar_at(i) * mv + rho_at(i);
  Eigen::Map<Eigen::VectorXd>(alpha_out, m) =
      -lq.R.fullPivLu().solve(lq.S * xv + lq.b3.transpose() * y);
}

double RiccatiSolution::value(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0) const {
  const auto n = static_cast<Eigen::Index>(dims.n);
  const Eigen::MatrixXd Rinv = lq.R.fullPivLu().inverse();
  Eigen::MatrixXd sig0(n, static_cast<Eigen::Index>(dims.d));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(dims.d); ++c)
      sig0(r, c) = lq.sigma0(r * static_cast<Eigen::Index>(dims.d) + c);
  const Eigen::MatrixXd Sigma = sig0 * sig0.transpose();

  Eigen::VectorXd m = mean0;
  Eigen::MatrixXd V = cov0;
  double j = 0.0;
  auto mean_cost = [&](std::size_t i, const Eigen::VectorXd& mm,
                       const Eigen::MatrixXd& VV) -> double {
    const Eigen::MatrixXd Md = Rinv * (lq.S + lq.b3.transpose() * p_at(i));
    const Eigen::VectorXd v =
        Rinv * ((lq.S + lq.b3.transpose() * (p_at(i) + pbar_at(i))) * mm +
                lq.b3.transpose() * rho_at(i));
    double ef = (lq.Q * VV).trace() + mm.dot(lq.Q * mm) + mm.dot(lq.Qbar * mm);
    ef += -2.0 * (Md.transpose() * lq.S * VV).trace() - 2.0 * v.dot(lq.S * mm);
    ef += (Md.transpose() * lq.R * Md * VV).trace() + v.dot(lq.R * v);
    return 0.5 * ef;
  };
  // Trapezoid in t with Euler-refined moments; p(t) is piecewise node data.
  for (std::size_t i = 0; i < grid.N; ++i) {
    const double w0 = grid.weight(i) * mean_cost(i, m, V);
    const Eigen::MatrixXd Md = Rinv * (lq.S + lq.b3.transpose() * p_at(i));
    const Eigen::MatrixXd A1 = lq.b1 - lq.b3 * Md;
    const Eigen::MatrixXd A2 = lq.b2 - lq.b3 * Rinv * lq.b3.transpose() * pbar_at(i);
    const Eigen::VectorXd c = lq.b0 - lq.b3 * Rinv * lq.b3.transpose() * rho_at(i);
    // Heun step for (m, V).
    const Eigen::VectorXd dm1 = (A1 + A2) * m + c;
    const Eigen::MatrixXd dV1 = A1 * V + V * A1.transpose() + Sigma;
    Eigen::VectorXd m_pred = m + grid.dt * dm1;
    Eigen::MatrixXd V_pred = V + grid.dt * dV1;
    const Eigen::MatrixXd Md2 = Rinv * (lq.S + lq.b3.transpose() * p_at(i + 1));
    const Eigen::MatrixXd A1b = lq.b1 - lq.b3 * Md2;
    const Eigen::MatrixXd A2b = lq.b2 - lq.b3 * Rinv * lq.b3.transpose() * pbar_at(i + 1);
    const Eigen::VectorXd cb = lq.b0 - lq.b3 * Rinv * lq.b3.transpose() * rho_at(i + 1);
    const Eigen::VectorXd dm2 = (A1b + A2b) * m_pred + cb;
    const Eigen::MatrixXd dV2 = A1b * V_pred + V_pred * A1b.transpose() + Sigma;
    m += 0.5 * grid.dt * (dm1 + dm2);
    V += 0.5 * grid.dt * (dV1 + dV2);
    const double w1 = grid.weight(i + 1) * mean_cost(i + 1, m, V);
    j += 0.5 * grid.dt * (w0 + w1);
  }
  return j;
}

double RiccatiSolution::value_deterministic(const Eigen::VectorXd& x0) const {
  return value(x0, Eigen::MatrixXd::Zero(x0.size(), x0.size()));
}

double scalar_stationary_riccati(const LQSpec& lq) {
  if (lq.dims.n != 1 || lq.dims.m != 1)
    throw Error(ErrorCode::DimensionMismatch, "scalar_stationary_riccati needs n = m = 1");
  const double a = lq.b1(0, 0), b = lq.b3(0, 0), q = lq.Q(0, 0), s = lq.S(0, 0),
               r = lq.R(0, 0), K = lq.K;
  auto g = [&](double p) { return (s + b * p) * (s + b * p) / r - 2.0 * (a + K) * p - q; };
  double lo = 0.0, hi = 1.0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorCode::RiccatiBlowup, "no stationary root below 1e12");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
}  // namespace mvfbsde
