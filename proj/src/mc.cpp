#include "siq/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace siq::mc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_pow2(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

/// Runs work(i) for i in [0, n) across at most `threads` workers with
/// contiguous index ranges. Results must be written by index (or reduced
/// per worker and combined in worker order) to stay order-independent.
template <class Work>
void parallel_replicates(std::size_t n, unsigned threads, Work&& work) {
  unsigned t = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
  if (t <= 1) {
    work(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::size_t chunk = (n + t - 1) / t;
  for (unsigned w = 0; w < t; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&work, begin, end] { work(begin, end); });
  }
  for (auto& th : pool) th.join();
}

MCEstimate make_estimate(std::size_t k, std::size_t n, double level, BiasNote note) {
  MCEstimate e;
  e.k = k;
  e.n = n;
  e.p_hat = static_cast<double>(k) / static_cast<double>(n);
  const Interval ci = wilson_ci(k, n, level);
  e.ci_lo = ci.lo;
  e.ci_hi = ci.hi;
  e.bias_note = note;
  return e;
}

std::size_t count_leq(const std::vector<double>& stats, double threshold) {
  std::size_t k = 0;
  for (double s : stats) k += (s <= threshold);
  return k;
}

/// Per-replicate deviation statistic of the chosen mode.
double pick(const process::DeviationStat& s, process::DeviationMode mode) {
  return mode == process::DeviationMode::kOneSided ? s.one_sided : s.two_sided;
}

std::size_t grid_points_for(double q, std::size_t refine_m, std::size_t cap) {
  const double dt = q / static_cast<double>(refine_m);
  const double npts = std::floor(1.0 / dt + 1e-9);
  if (npts + 1.0 > static_cast<double>(cap))
    throw ResourceError(
        "path length exceeds the configured cap; raise epsilon or lower refine_m");
  return static_cast<std::size_t>(std::max(1.0, npts));
}

}  // namespace

void MCConfig::validate() const {
  if (n_paths < 1) throw std::invalid_argument("MCConfig: n_paths must be >= 1");
  if (refine_m < 1 || !is_pow2(refine_m))
    throw std::invalid_argument("MCConfig: refine_m must be a power of 2");
  if (!(ci_level > 0.0) || !(ci_level < 1.0))
    throw std::invalid_argument("MCConfig: ci_level must lie in (0, 1)");
}

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Newton step against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Interval wilson_ci(std::size_t k, std::size_t n, double level) {
  if (n < 1 || k > n) throw std::domain_error("wilson_ci: need 0 <= k <= n, n >= 1");
  if (!(level > 0.0) || !(level < 1.0))
    throw std::domain_error("wilson_ci: level must lie in (0, 1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double z2n = z * z / nn;
  const double denom = 1.0 + z2n;
  const double center = ph + 0.5 * z2n;
  const double rad = z * std::sqrt(ph * (1.0 - ph) / nn + 0.25 * z2n / nn);
  return {std::max(0.0, (center - rad) / denom), std::min(1.0, (center + rad) / denom)};
}

const char* to_string(BiasNote note) {
  switch (note) {
    case BiasNote::kExactBlockMax: return "exact-block-max";
    case BiasNote::kGridUnderstated: return "grid-understated";
    default: return "none";
  }
}

std::vector<process::DeviationStat> grid_deviation_ensemble(
    const process::ProcessSpec& spec, double q, std::size_t refine_m,
    const MCConfig& cfg) {
  cfg.validate();
  if (!is_pow2(refine_m))
    throw std::invalid_argument("grid_deviation_ensemble: refine_m must be a power of 2");
  const std::size_t n_points = grid_points_for(q, refine_m, cfg.path_point_cap);
  const double dt = q / static_cast<double>(refine_m);
  std::vector<process::DeviationStat> stats(cfg.n_paths);

  if (const auto* lf = std::get_if<process::Lfsm>(&spec)) {
    parallel_replicates(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
      process::LfsmEngine engine(n_points, dt, *lf);
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(cfg.seed, i);
        stats[i] = process::sup_deviation(engine.simulate(rng), q);
      }
    });
    return stats;
  }

  parallel_replicates(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng = Rng::substream(cfg.seed, i);
      process::GridPath path;
      if (const auto* bm = std::get_if<process::BrownianMotion>(&spec))
        path = process::simulate_bm(n_points, dt, bm->var_rate, rng);
      else
        path = process::simulate_stable_levy(
            n_points, dt, std::get<process::StableLevy>(spec).params, rng);
      stats[i] = process::sup_deviation(path, q);
    }
  });
  return stats;
}

std::vector<double> bm_blockmax_ensemble(const process::BrownianMotion& bm, double q,
                                         const MCConfig& cfg) {
  cfg.validate();
  const auto bc = process::blocks_in_unit(q);
  const double sd_full = std::sqrt(bm.var_rate * q);
  const double sd_res = bc.residual > 0.0 ? std::sqrt(bm.var_rate * bc.residual) : 0.0;
  std::vector<double> stats(cfg.n_paths);
  parallel_replicates(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng = Rng::substream(cfg.seed, i);
      double mx = 0.0;
      for (long blk = 0; blk < bc.full; ++blk) {
        const double w_end = sd_full * rng.normal();
        mx = std::max(mx, process::bm_block_max_exact(w_end, q, bm.var_rate, rng));
      }
      if (bc.residual > 0.0) {
        const double w_end = sd_res * rng.normal();
        mx = std::max(mx,
                      process::bm_block_max_exact(w_end, bc.residual, bm.var_rate, rng));
      }
      stats[i] = mx;
    }
  });
  return stats;
}

std::vector<MCEstimate> estimate_deviation_prob_xgrid(
    const process::ProcessSpec& spec, double epsilon, std::span<const double> xs,
    process::DeviationMode mode, const MCConfig& cfg) {
  cfg.validate();
  const calib::SamplingScales scales = calib::calibrate(spec, epsilon, mode);
  const bool is_bm = std::holds_alternative<process::BrownianMotion>(spec);
  if (is_bm) {
    for (double x : xs)
      if (x != 0.0)
        throw std::domain_error(
            "estimate_deviation_prob: Brownian runs expose the limit at x = 0 only");
  }

  std::vector<MCEstimate> out;
  out.reserve(xs.size());
  if (is_bm && mode == process::DeviationMode::kOneSided) {
    const auto stats =
        bm_blockmax_ensemble(std::get<process::BrownianMotion>(spec), scales.q, cfg);
    for (double x : xs) {
      const double threshold = epsilon + x * scales.w;
      out.push_back(make_estimate(count_leq(stats, threshold), cfg.n_paths,
                                  cfg.ci_level, BiasNote::kExactBlockMax));
    }
    return out;
  }

  const auto stats = grid_deviation_ensemble(spec, scales.q, cfg.refine_m, cfg);
  for (double x : xs) {
    const double threshold = epsilon + x * scales.w;
    std::size_t k = 0;
    for (const auto& s : stats) k += (pick(s, mode) <= threshold);
    out.push_back(make_estimate(k, cfg.n_paths, cfg.ci_level, BiasNote::kGridUnderstated));
  }
  return out;
}

MCEstimate estimate_deviation_prob(const process::ProcessSpec& spec, double epsilon,
                                   double x, process::DeviationMode mode,
                                   const MCConfig& cfg) {
  const double xs[1] = {x};
  return estimate_deviation_prob_xgrid(spec, epsilon, xs, mode, cfg).front();
}

MCEstimate estimate_deviation_prob_at_q(const process::ProcessSpec& spec,
                                        double epsilon, double q,
                                        process::DeviationMode mode,
                                        const MCConfig& cfg) {
  cfg.validate();
  if (!(q > 0.0) || q > 1.0)
    throw std::domain_error("estimate_deviation_prob_at_q: q must lie in (0, 1]");
  if (const auto* bm = std::get_if<process::BrownianMotion>(&spec);
      bm != nullptr && mode == process::DeviationMode::kOneSided) {
    const auto stats = bm_blockmax_ensemble(*bm, q, cfg);
    return make_estimate(count_leq(stats, epsilon), cfg.n_paths, cfg.ci_level,
                         BiasNote::kExactBlockMax);
  }
  const auto stats = grid_deviation_ensemble(spec, q, cfg.refine_m, cfg);
  std::size_t k = 0;
  for (const auto& s : stats) k += (pick(s, mode) <= epsilon);
  return make_estimate(k, cfg.n_paths, cfg.ci_level, BiasNote::kGridUnderstated);
}

MCEstimate block_product_estimator(const process::ProcessSpec& spec, double epsilon,
                                   double q, process::DeviationMode mode,
                                   const MCConfig& cfg) {
  cfg.validate();
  if (std::holds_alternative<process::Lfsm>(spec))
    throw std::invalid_argument(
        "block_product_estimator: needs independent increments (stable Levy or "
        "Brownian motion)");
  if (!(q > 0.0) || q > 1.0)
    throw std::domain_error("block_product_estimator: q must lie in (0, 1]");
  const auto bc = process::blocks_in_unit(q);
  const double dt = q / static_cast<double>(cfg.refine_m);

  // One block of length L is a single-block deviation run on [0, L].
  const auto block_stats = [&](double len, std::size_t stream_offset) {
    const auto n_points = static_cast<std::size_t>(
        std::max(1.0, std::floor(len / dt + 1e-9)));
    if (n_points + 1 > cfg.path_point_cap)
      throw ResourceError("block_product_estimator: block grid exceeds the path cap");
    std::vector<double> stats(cfg.n_paths);
    parallel_replicates(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(cfg.seed, stream_offset + i);
        process::GridPath path;
        if (const auto* bm = std::get_if<process::BrownianMotion>(&spec))
          path = process::simulate_bm(n_points, dt, bm->var_rate, rng);
        else
          path = process::simulate_stable_levy(
              n_points, dt, std::get<process::StableLevy>(spec).params, rng);
        double one = 0.0, two = 0.0;
        for (Eigen::Index j = 0; j < path.values.size(); ++j) {
          one = std::max(one, path.values[j]);
          two = std::max(two, std::fabs(path.values[j]));
        }
        stats[i] = mode == process::DeviationMode::kOneSided ? one : two;
      }
    });
    return stats;
  };

  const auto main_stats = block_stats(q, 0);
  const std::size_t kb = count_leq(main_stats, epsilon);
  const double pb = static_cast<double>(kb) / static_cast<double>(cfg.n_paths);

  std::size_t kr = cfg.n_paths;
  double pr = 1.0;
  if (bc.residual > 0.0) {
    const auto res_stats = block_stats(bc.residual, cfg.n_paths);
    kr = count_leq(res_stats, epsilon);
    pr = static_cast<double>(kr) / static_cast<double>(cfg.n_paths);
  }

  const double nb = static_cast<double>(bc.full);
  MCEstimate e;
  e.n = cfg.n_paths;
  e.k = kb;
  e.bias_note = BiasNote::kGridUnderstated;
  e.p_hat = std::pow(pb, nb) * pr;
  const double z = normal_quantile(0.5 * (1.0 + cfg.ci_level));
  const double n_d = static_cast<double>(cfg.n_paths);
  if (pb > 0.0 && pb < 1.0 && pr > 0.0 && (bc.residual == 0.0 || pr < 1.0)) {
    const double var_log = nb * nb * (1.0 - pb) / (n_d * pb) +
                           (bc.residual > 0.0 ? (1.0 - pr) / (n_d * pr) : 0.0);
    const double half = z * std::sqrt(var_log);
    e.ci_lo = std::max(0.0, e.p_hat * std::exp(-half));
    e.ci_hi = std::min(1.0, e.p_hat * std::exp(half));
  } else {
    // Degenerate block estimate: conservative product of Wilson bounds.
    const Interval wb = wilson_ci(kb, cfg.n_paths, cfg.ci_level);
    const Interval wr = bc.residual > 0.0 ? wilson_ci(kr, cfg.n_paths, cfg.ci_level)
                                          : Interval{1.0, 1.0};
    e.ci_lo = std::pow(wb.lo, nb) * wr.lo;
    e.ci_hi = std::pow(wb.hi, nb) * wr.hi;
  }
  return e;
}

std::vector<RefinementRow> refinement_study(const process::ProcessSpec& spec,
                                            double epsilon, double x,
                                            process::DeviationMode mode,
                                            std::span<const std::size_t> m_schedule,
                                            const MCConfig& cfg) {
  cfg.validate();
  if (m_schedule.empty())
    throw std::invalid_argument("refinement_study: empty m schedule");
  for (std::size_t j = 0; j < m_schedule.size(); ++j) {
    if (!is_pow2(m_schedule[j]))
      throw std::invalid_argument("refinement_study: schedule must be powers of 2");
    if (j > 0 && m_schedule[j] <= m_schedule[j - 1])
      throw std::invalid_argument("refinement_study: schedule must be increasing");
  }
  const calib::SamplingScales scales = calib::calibrate(spec, epsilon, mode);
  const bool is_bm = std::holds_alternative<process::BrownianMotion>(spec);
  if (is_bm && x != 0.0)
    throw std::domain_error("refinement_study: Brownian runs expose x = 0 only");
  const double threshold = epsilon + x * scales.w;
  const std::size_t levels = m_schedule.size();

  std::vector<std::vector<std::size_t>> counts(levels);
  for (auto& c : counts) c.assign(1, 0);

  if (is_bm) {
    const double var_rate = std::get<process::BrownianMotion>(spec).var_rate;
    // Per-replicate coupled refinement by bridge midpoint insertion.
    grid_points_for(scales.q, m_schedule.back(), cfg.path_point_cap);  // cap check
    std::vector<std::vector<std::size_t>> local(levels,
                                                std::vector<std::size_t>(cfg.n_paths, 0));
    parallel_replicates(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
      std::vector<double> cur, next;
      for (std::size_t i = b; i < e; ++i) {
        Rng rng = Rng::substream(cfg.seed, i);
        double dt = scales.q / static_cast<double>(m_schedule[0]);
        std::size_t n_points = grid_points_for(scales.q, m_schedule[0], cfg.path_point_cap);
        process::GridPath path = process::simulate_bm(n_points, dt, var_rate, rng);
        cur.assign(path.values.data(), path.values.data() + path.values.size());
        for (std::size_t lev = 0; lev < levels; ++lev) {
          if (lev > 0) {
            std::size_t factor = m_schedule[lev] / m_schedule[lev - 1];
            while (factor > 1) {
              dt *= 0.5;
              next.resize(2 * cur.size() - 1);
              // Bridge midpoint over spacing 2 dt: N(mean, C dt / 2).
              const double sd = std::sqrt(var_rate * dt * 0.5);
              for (std::size_t jj = 0; jj + 1 < cur.size(); ++jj) {
                next[2 * jj] = cur[jj];
                next[2 * jj + 1] = 0.5 * (cur[jj] + cur[jj + 1]) + sd * rng.normal();
              }
              next.back() = cur.back();
              cur.swap(next);
              factor /= 2;
            }
          }
          // Deviation statistic on the current level (left-limit anchor,
          // matching sup_deviation).
          const auto mb = static_cast<std::size_t>(m_schedule[lev]);
          double one = 0.0, two = 0.0;
          for (std::size_t jj = 1; jj < cur.size(); ++jj) {
            const std::size_t anchor = ((jj - 1) / mb) * mb;
            const double dev = cur[jj] - cur[anchor];
            one = std::max(one, dev);
            two = std::max(two, std::fabs(dev));
          }
          const double stat = mode == process::DeviationMode::kOneSided ? one : two;
          local[lev][i] = (stat <= threshold) ? 1 : 0;
        }
      }
    });
    std::vector<RefinementRow> rows(levels);
    for (std::size_t lev = 0; lev < levels; ++lev) {
      std::size_t k = 0;
      for (auto v : local[lev]) k += v;
      rows[lev] = {m_schedule[lev],
                   make_estimate(k, cfg.n_paths, cfg.ci_level, BiasNote::kGridUnderstated),
                   true};
    }
    return rows;
  }

  // Stable / LFSM: regenerate per level from the replicate substream.
  std::vector<RefinementRow> rows;
  rows.reserve(levels);
  for (std::size_t lev = 0; lev < levels; ++lev) {
    MCConfig level_cfg = cfg;
    level_cfg.refine_m = m_schedule[lev];
    const auto stats = grid_deviation_ensemble(spec, scales.q, m_schedule[lev], level_cfg);
    std::size_t k = 0;
    for (const auto& s : stats) k += (pick(s, mode) <= threshold);
    rows.push_back({m_schedule[lev],
                    make_estimate(k, cfg.n_paths, cfg.ci_level, BiasNote::kGridUnderstated),
                    false});
  }
  return rows;
}

std::size_t converged_m(std::span<const RefinementRow> rows) {
  for (std::size_t j = 1; j < rows.size(); ++j) {
    const double width = rows[j].est.ci_hi - rows[j].est.ci_lo;
    if (std::fabs(rows[j].est.p_hat - rows[j - 1].est.p_hat) < 0.5 * width)
      return rows[j].m;
  }
  return 0;
}

std::vector<ConvergenceRow> convergence_to_limit(const process::ProcessSpec& spec,
                                                 std::span<const double> eps_schedule,
                                                 double x, process::DeviationMode mode,
                                                 const MCConfig& cfg) {
  std::vector<ConvergenceRow> rows;
  if (eps_schedule.empty()) return rows;
  const calib::LimitLaw law = calib::limit_law(spec, mode);
  rows.reserve(eps_schedule.size());
  for (double eps : eps_schedule) {
    const MCEstimate est = estimate_deviation_prob(spec, eps, x, mode, cfg);
    const double p_limit = law.prob_at(x);
    rows.push_back({eps, est, p_limit,
                    std::isnan(p_limit) ? kNaN : est.p_hat - p_limit});
  }
  return rows;
}

KappaFit fit_kappa_gumbel(std::span<const std::pair<double, MCEstimate>> points,
                          double level) {
  double szz = 0.0, szy = 0.0, svar = 0.0;
  std::vector<double> zs, ys, vys;
  for (const auto& [x, est] : points) {
    if (!(est.p_hat > 0.0) || !(est.p_hat < 1.0)) continue;
    const double z = std::exp(-x);
    const double y = -std::log(est.p_hat);
    const double vy = (1.0 - est.p_hat) /
                      (static_cast<double>(est.n) * est.p_hat);
    zs.push_back(z);
    ys.push_back(y);
    vys.push_back(vy);
    szz += z * z;
    szy += z * y;
  }
  if (zs.size() < 3)
    throw std::runtime_error(
        "fit_kappa_gumbel: fewer than 3 usable (non-degenerate) points");
  KappaFit fit;
  fit.n_used = zs.size();
  fit.kappa = szy / szz;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    svar += zs[i] * zs[i] * vys[i];
    fit.residuals.push_back(ys[i] - fit.kappa * zs[i]);
  }
  fit.se = std::sqrt(svar) / szz;
  const double zq = normal_quantile(0.5 * (1.0 + level));
  fit.ci_lo = fit.kappa - zq * fit.se;
  fit.ci_hi = fit.kappa + zq * fit.se;
  return fit;
}

std::vector<InequalityReport> check_sup_tail_inequality(double alpha, double beta,
                                                      double h,
                                                      std::span<const double> us,
                                                      const MCConfig& cfg,
                                                      std::size_t grid_points) {
  cfg.validate();
  if (!(h > 0.0)) throw std::domain_error("check_sup_tail_inequality: h must be positive");
  for (double u : us)
    if (!(u > 0.0)) throw std::domain_error("check_sup_tail_inequality: u must be positive");
  const stable::StableParams params{alpha, beta, 1.0};
  params.validate();
  const double dt = h / static_cast<double>(grid_points);

  // Per-replicate fine/coarse grid maxima and the endpoint value.
  struct PathStat {
    double fine_max;
    double coarse_max;
    double endpoint;
  };
  std::vector<PathStat> stats(cfg.n_paths);
  parallel_replicates(cfg.n_paths, cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng = Rng::substream(cfg.seed, i);
      const process::GridPath path =
          process::simulate_stable_levy(grid_points, dt, params, rng);
      double fine = 0.0, coarse = 0.0;
      for (Eigen::Index j = 0; j < path.values.size(); ++j) {
        fine = std::max(fine, path.values[j]);
        if (j % 2 == 0) coarse = std::max(coarse, path.values[j]);
      }
      stats[i] = {fine, coarse, path.values[path.values.size() - 1]};
    }
  });

  std::size_t k_pos = 0;
  for (const auto& s : stats) k_pos += (s.endpoint > 0.0);
  const double n_d = static_cast<double>(cfg.n_paths);
  const double pb = static_cast<double>(k_pos) / n_d;

  std::vector<InequalityReport> reports;
  reports.reserve(us.size());
  for (double u : us) {
    std::size_t k_left = 0, k_coarse = 0, k_end = 0;
    for (const auto& s : stats) {
      k_left += (s.fine_max > u);
      k_coarse += (s.coarse_max > u);
      k_end += (s.endpoint > u);
    }
    InequalityReport r;
    r.h = h;
    r.u = u;
    r.n = cfg.n_paths;
    r.left = static_cast<double>(k_left) / n_d;
    r.left_coarse = static_cast<double>(k_coarse) / n_d;
    r.left_se = std::sqrt(r.left * (1.0 - r.left) / n_d);
    const double pa = static_cast<double>(k_end) / n_d;
    r.right = pb > 0.0 ? pa / pb : kNaN;
    // Delta method for the ratio of nested-event frequencies:
    // Var(a/b) ~ (a/b)^2 [ (1-a)/(n a) - (1-b)/(n b) ].
    r.right_se = (pa > 0.0 && pb > 0.0)
                     ? r.right * std::sqrt(std::max(0.0, (1.0 - pa) / (n_d * pa) -
                                                             (1.0 - pb) / (n_d * pb)))
                     : 0.0;
    const double slack = 3.0 * std::sqrt(r.left_se * r.left_se + r.right_se * r.right_se);
    r.margin = r.right + slack - r.left;
    r.holds = r.margin >= 0.0;
    reports.push_back(r);
  }
  return reports;
}

InequalityReport check_sup_tail_inequality(double alpha, double beta, double h, double u,
                                         const MCConfig& cfg, std::size_t grid_points) {
  const double us[1] = {u};
  return check_sup_tail_inequality(alpha, beta, h, us, cfg, grid_points).front();
}

}  // namespace siq::mc
