#include "mvfbsde/sde.hpp"

#include <cmath>
#include <string>

#include "mvfbsde/errors.hpp"
#include "mvfbsde/parallel.hpp"
#include "mvfbsde/rng.hpp"

namespace mvfbsde {

SdeResult solve_sde(const CoefficientSet& coeffs, const SdeRunConfig& cfg,
                    const InitialSampler& initial) {
  const TimeGrid& grid = cfg.grid;
  const std::size_t M = cfg.particles;
  const std::size_t n = coeffs.dims.n;
  const std::size_t d = coeffs.dims.d;
  const std::size_t nd = n * d;
  if (M < 2) throw Error(ErrorCode::ShapeMismatch, "M >= 2 required");
  const bool frozen = !cfg.frozen_y.empty();
  if (frozen && (cfg.frozen_y.levels < grid.N || (!cfg.frozen_z.empty() && cfg.frozen_z.levels < grid.N)))
    throw Error(ErrorCode::ShapeMismatch, "frozen (Y,Z) paths shorter than grid");

  NoiseCache cache;
  cache.build(cfg.seed, M, grid.N, d, cfg.noise_cache_budget);

  SdeResult out;
  out.paths = PathEnsemble(coeffs.dims, grid, M, cfg.seed);
  if (cfg.store_paths) out.paths.allocate_x();
  out.norm.contributions.resize(grid.levels(), 0.0);
  out.mean_path.resize(grid.levels() * n, 0.0);

  std::vector<double> ping(M * n), pong(M * n);
  double* cur = ping.data();
  double* nxt = pong.data();
  parallel_chunks(M, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t p = b; p < e; ++p) initial(cfg.seed, p, cur + p * n);
  });
  if (cfg.store_paths) std::copy(cur, cur + M * n, out.paths.x_level(0));

  std::vector<double> buf_b(M * n), buf_s(M * nd);
  const double sqrt_dt = std::sqrt(grid.dt);

  for (std::size_t i = 0; i <= grid.N; ++i) {
    EmpiricalLaw law =
        frozen ? EmpiricalLaw::joint(cur, n, cfg.frozen_y.data ? cfg.frozen_y.level(std::min(i, cfg.frozen_y.levels - 1)) : nullptr,
                                     cfg.frozen_y.width,
                                     (!cfg.frozen_z.empty() && i < cfg.frozen_z.levels)
                                         ? cfg.frozen_z.level(i)
                                         : nullptr,
                                     cfg.frozen_z.width, M)
               : EmpiricalLaw(cur, M, n);
    const double msq = law.second_moment_block(0, n);
    out.norm.contributions[i] = grid.weight(i) * msq;
    if (i == 0) out.initial_second_moment = msq;
    for (std::size_t c = 0; c < n; ++c) out.mean_path[i * n + c] = law.mean(c);
    if (i == grid.N) break;

    CoeffArgs args;
    args.t = grid.node(i);
    args.count = M;
    args.x = cur;
    args.y = frozen ? cfg.frozen_y.level(i) : nullptr;
    args.z = (frozen && !cfg.frozen_z.empty()) ? cfg.frozen_z.level(i) : nullptr;
    args.law = &law;
    coeffs.drift(args, buf_b.data());
    coeffs.vol(args, buf_s.data());

    std::vector<double> chunk_max(num_chunks(M), 0.0);
    parallel_chunks(M, [&](std::size_t b, std::size_t e, std::size_t ci) {
      double mx = 0.0;
      for (std::size_t p = b; p < e; ++p) {
        for (std::size_t c = 0; c < n; ++c) {
          double v = cur[p * n + c] + grid.dt * buf_b[p * n + c];
          for (std::size_t j = 0; j < d; ++j)
            v += buf_s[p * nd + c * d + j] * sqrt_dt * cache.get(cfg.seed, p, i, j);
          nxt[p * n + c] = v;
          mx = std::max(mx, std::abs(v));
        }
      }
      chunk_max[ci] = mx;
    });
    for (double mx : chunk_max)
      if (!(mx <= cfg.blowup_threshold))
        throw Error(ErrorCode::NonFiniteState,
                    "|X| exceeded " + std::to_string(cfg.blowup_threshold) + " at t=" +
                        std::to_string(grid.node(i + 1)));

    if (cfg.store_paths) std::copy(nxt, nxt + M * n, out.paths.x_level(i + 1));
    std::swap(cur, nxt);
  }

  for (std::size_t i = 0; i < grid.N; ++i) out.norm.value += out.norm.contributions[i];
  out.norm.value *= grid.dt;

  // Tail profile from the accumulated level statistics.
  out.tail.profile = out.norm.contributions;
  out.tail.terminal = out.tail.profile.back();
  {
    const std::size_t L = out.tail.profile.size();
    const std::size_t q0 = (3 * L) / 4;
    const std::size_t span = L - q0;
    if (span >= 2) {
      const std::size_t bucket = std::max<std::size_t>(1, span / 4);
      double first = 0.0, last = 0.0;
      const std::size_t fe = std::min(q0 + bucket, L);
      for (std::size_t i = q0; i < fe; ++i) first += out.tail.profile[i];
      first /= static_cast<double>(fe - q0);
      for (std::size_t i = L - bucket; i < L; ++i) last += out.tail.profile[i];
      last /= static_cast<double>(bucket);
      out.tail.decreasing_final_quarter = last <= 0.9 * first + 1e-300;
    } else {
      out.tail.decreasing_final_quarter = true;
    }
    out.tail.flag = out.tail.decreasing_final_quarter && out.tail.terminal < out.tail.tail_tol;
  }
  return out;
}

SdeAuditReport audit_sde_apriori(const SdeAuditData& data, double x_norm_sq,
                                 double initial_second_moment, const TimeGrid& grid,
                                 std::size_t particles, double eps, double slack) {
  SdeAuditReport rep;
  const double lsum = data.l_sigma_x + data.l_sigma_mu;
  const double gap = data.kappa_x - data.K - 0.5 * lsum * lsum - data.l_b_mu;
  rep.eps = eps > 0.0 ? eps : gap / 6.0;
  rep.coef = 2.0 * data.kappa_x - 2.0 * data.K - 2.0 * data.l_b_mu - lsum * lsum - 3.0 * rep.eps;
  if (!(rep.coef > 0.0))
    throw Error(ErrorCode::GateViolated,
                "audit precondition 2kx-2K-2lbmu-(lsx+lsmu)^2-3eps > 0 fails (coef = " +
                    std::to_string(rep.coef) + ")");
  rep.slack = slack >= 0.0 ? slack
                           : 5.0 * grid.dt + 3.0 / std::sqrt(static_cast<double>(particles));
  rep.lhs = rep.coef * x_norm_sq;
  const double sig_factor =
      1.0 + (data.l_sigma_x * data.l_sigma_x + data.l_sigma_mu * data.l_sigma_mu) / rep.eps;
  double integral = 0.0;
  for (std::size_t i = 0; i < grid.N; ++i) {
    const double t = grid.node(i);
    const double b0 = data.b0_sq ? data.b0_sq(t) : 0.0;
    const double s0 = data.sigma0_sq ? data.sigma0_sq(t) : 0.0;
    integral += grid.weight(i) * (b0 / rep.eps + sig_factor * s0);
  }
  rep.rhs = initial_second_moment + grid.dt * integral;
  rep.flag = rep.lhs <= rep.rhs * (1.0 + rep.slack);
  return rep;
}

}  // namespace mvfbsde
