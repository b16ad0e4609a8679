#include "mvfbsde/bsde.hpp"

#include <cmath>

#include "mvfbsde/errors.hpp"
#include "mvfbsde/parallel.hpp"
#include "mvfbsde/rng.hpp"
#include "regression.hpp"

namespace mvfbsde {

BsdeResult solve_bsde(const DriverFn& driver, Dims dims, const BsdeRunConfig& cfg) {
  const TimeGrid& grid = cfg.grid;
  const std::size_t M = cfg.particles;
  const std::size_t m = dims.m;
  const std::size_t d = dims.d;
  const std::size_t zw = m * d;
  if (M < 2) throw Error(ErrorCode::ShapeMismatch, "M >= 2 required");
  const bool conditioned = !cfg.conditioning.empty();
  if (conditioned && cfg.conditioning.levels != grid.N + 1)
    throw Error(ErrorCode::ShapeMismatch, "conditioning path must have N+1 levels");
  if (!cfg.terminal.empty() && cfg.terminal.size() != m)
    throw Error(ErrorCode::ShapeMismatch, "terminal condition has wrong dimension");

  NoiseCache cache;
  cache.build(cfg.seed, M, grid.N, d, cfg.noise_cache_budget);

  BsdeResult out;
  out.paths = PathEnsemble(dims, grid, M, cfg.seed);
  if (cfg.store_paths) {
    out.paths.allocate_y();
    out.paths.allocate_z();
  }
  out.y_norm.contributions.assign(grid.levels(), 0.0);
  out.z_norm.contributions.assign(grid.N, 0.0);
  out.residual_zscores.assign(grid.N, 0.0);

  std::vector<double> y_next(M * m, 0.0);
  if (!cfg.terminal.empty())
    for (std::size_t p = 0; p < M; ++p)
      for (std::size_t c = 0; c < m; ++c) y_next[p * m + c] = cfg.terminal[c];
  {
    double tsq = 0.0;
    for (std::size_t c = 0; c < m; ++c) tsq += y_next[c] * y_next[c];
    out.y_norm.contributions[grid.N] = grid.weight(grid.N) * tsq;
  }
  if (cfg.store_paths) std::copy(y_next.begin(), y_next.end(), out.paths.y_level(grid.N));

  std::vector<double> proj(M * m), z_fit(M * zw), g(M * m), y_cur(M * m);
  const double sqrt_dt = std::sqrt(grid.dt);
  const int degree = cfg.basis == BasisKind::SampleMean ? 0 : cfg.poly_degree;
  detail::Regression reg(conditioned ? cfg.conditioning.width : 1, conditioned ? degree : 0);

  for (std::size_t i = grid.N; i-- > 0;) {
    reg.prepare(conditioned ? cfg.conditioning.level(i) : nullptr, M);
    Eigen::MatrixXd beta;
    reg.fit(m + zw, [&](std::size_t p, double* tgt) {
      for (std::size_t c = 0; c < m; ++c) tgt[c] = y_next[p * m + c];
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < d; ++j)
          tgt[m + r * d + j] = y_next[p * m + r] * sqrt_dt *
                               cache.get(cfg.seed, p, i, j) / grid.dt;
    }, beta);
    parallel_chunks(M, [&](std::size_t b, std::size_t e, std::size_t) {
      std::array<double, detail::kMaxBasis> row;
      (void)row;
      std::vector<double> vals(m + zw);
      for (std::size_t p = b; p < e; ++p) {
        reg.apply(p, beta, vals.data());
        for (std::size_t c = 0; c < m; ++c) proj[p * m + c] = vals[c];
        for (std::size_t c = 0; c < zw; ++c) z_fit[p * zw + c] = vals[m + c];
      }
    });

    // Martingale diagnostic: projection residuals should be centered.
    {
      std::vector<double> sums(2, 0.0);
      chunked_sum_vec(M, 2, sums.data(), [&](std::size_t p, double* acc) {
        double r = 0.0;
        for (std::size_t c = 0; c < m; ++c) r += y_next[p * m + c] - proj[p * m + c];
        acc[0] += r;
        acc[1] += r * r;
      });
      const double mean = sums[0] / static_cast<double>(M);
      const double var = std::max(0.0, sums[1] / static_cast<double>(M) - mean * mean);
      out.residual_zscores[i] =
          std::abs(mean) / (std::sqrt(var / static_cast<double>(M)) + 1e-300);
    }

    EmpiricalLaw law_y(y_next.data(), M, m);
    EmpiricalLaw law_z(z_fit.data(), M, zw);
    DriverArgs args;
    args.t = grid.node(i);
    args.count = M;
    args.y_proj = proj.data();
    args.z = z_fit.data();
    args.law_y = &law_y;
    args.law_z = &law_z;
    driver(args, g.data());

    parallel_chunks(M, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t p = b; p < e; ++p)
        for (std::size_t c = 0; c < m; ++c)
          y_cur[p * m + c] = proj[p * m + c] - grid.dt * g[p * m + c];
    });

    out.y_norm.contributions[i] =
        grid.weight(i) * chunked_sum(M, [&](std::size_t p) {
          double s = 0.0;
          for (std::size_t c = 0; c < m; ++c) s += y_cur[p * m + c] * y_cur[p * m + c];
          return s;
        }) / static_cast<double>(M);
    out.z_norm.contributions[i] =
        grid.weight(i) * chunked_sum(M, [&](std::size_t p) {
          double s = 0.0;
          for (std::size_t c = 0; c < zw; ++c) s += z_fit[p * zw + c] * z_fit[p * zw + c];
          return s;
        }) / static_cast<double>(M);

    if (cfg.store_paths) {
      std::copy(y_cur.begin(), y_cur.end(), out.paths.y_level(i));
      std::copy(z_fit.begin(), z_fit.end(), out.paths.z_level(i));
    }
    std::swap(y_next, y_cur);
  }

  for (std::size_t i = 0; i < grid.N; ++i) {
    out.y_norm.value += out.y_norm.contributions[i];
    out.z_norm.value += out.z_norm.contributions[i];
  }
  out.y_norm.value *= grid.dt;
  out.z_norm.value *= grid.dt;

  out.y0_mean.assign(m, 0.0);
  chunked_sum_vec(M, m, out.y0_mean.data(), [&](std::size_t p, double* acc) {
    for (std::size_t c = 0; c < m; ++c) acc[c] += y_next[p * m + c];
  });
  for (std::size_t c = 0; c < m; ++c) out.y0_mean[c] /= static_cast<double>(M);
  out.y0_second_moment = chunked_sum(M, [&](std::size_t p) {
                           double s = 0.0;
                           for (std::size_t c = 0; c < m; ++c)
                             s += y_next[p * m + c] * y_next[p * m + c];
                           return s;
                         }) /
                         static_cast<double>(M);
  return out;
}

BsdeAuditReport audit_bsde_apriori(const BsdeAuditData& data, double y0_second_moment,
                                   const WeightedNormReport& y_norm,
                                   const WeightedNormReport& z_norm, const TimeGrid& grid,
                                   std::size_t particles, double eps, double slack) {
  if (!(data.K > data.kappa_y + data.l_mu_y + data.l_z * data.l_z + data.l_mu_z * data.l_mu_z))
    throw Error(ErrorCode::GateViolated, "BSDE gate K > ky + lmy + lz^2 + lmz^2 fails");
  BsdeAuditReport rep;
  rep.eps = eps;
  rep.y_coef = 2.0 * data.K - 2.0 * data.kappa_y - 2.0 * data.l_z * data.l_z -
               2.0 * data.l_mu_z * data.l_mu_z - 2.0 * data.l_mu_y - 3.0 * eps;
  rep.z_coef = eps / (data.l_z * data.l_z + data.l_mu_z * data.l_mu_z + eps);
  rep.slack = slack >= 0.0 ? slack
                           : 5.0 * grid.dt + 3.0 / std::sqrt(static_cast<double>(particles));
  rep.lhs = y0_second_moment + rep.y_coef * y_norm.value + rep.z_coef * z_norm.value;
  double integral = 0.0;
  for (std::size_t i = 0; i < grid.N; ++i)
    integral += grid.weight(i) * (data.f0_sq ? data.f0_sq(grid.node(i)) : 0.0);
  rep.rhs = grid.dt * integral / eps;
  rep.flag = rep.lhs <= rep.rhs * (1.0 + rep.slack);
  return rep;
}

}  // namespace mvfbsde
