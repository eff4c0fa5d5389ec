#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "siq/calibrate.hpp"
#include "siq/process.hpp"

namespace siq::mc {

/// Path-length (or similar) resource cap exceeded; fail fast with guidance.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MCConfig {
  std::size_t n_paths = 10000;
  std::size_t refine_m = 64;  ///< inner grid points per sampling block; power of 2
  std::uint64_t seed = 1;
  double ci_level = 0.95;
  std::size_t path_point_cap = std::size_t{1} << 24;
  unsigned threads = 0;  ///< worker cap; 0 = hardware concurrency; never affects results

  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Phi^{-1}(p) for p in (0, 1); rational approximation polished with one
/// Newton step on erfc, good to ~1e-15.
double normal_quantile(double p);

/// Wilson score interval for k successes out of n at the given level.
Interval wilson_ci(std::size_t k, std::size_t n, double level);

enum class BiasNote { kExactBlockMax, kGridUnderstated, kNone };
const char* to_string(BiasNote note);

struct MCEstimate {
  double p_hat = 0.0;
  std::size_t k = 0;  ///< replicates in the event {deviation <= threshold}
  std::size_t n = 0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  BiasNote bias_note = BiasNote::kNone;
};

/// Per-replicate deviation statistics over [0, 1] at sampling interval q,
/// grid step q / refine_m. Deterministic in cfg.seed; replicate i draws
/// from Rng::substream(cfg.seed, i).
std::vector<process::DeviationStat> grid_deviation_ensemble(
    const process::ProcessSpec& spec, double q, std::size_t refine_m,
    const MCConfig& cfg);

/// Per-replicate one-sided deviation suprema for Brownian motion via the
/// exact block-maximum sampler (no grid bias).
std::vector<double> bm_blockmax_ensemble(const process::BrownianMotion& bm,
                                         double q, const MCConfig& cfg);

/// P{ sup deviation <= eps + x w(eps) } at the calibrated q(eps).
/// Brownian one-sided runs use exact block maxima; everything else runs
/// on the refine_m grid (grid-understated).
MCEstimate estimate_deviation_prob(const process::ProcessSpec& spec, double epsilon,
                                   double x, process::DeviationMode mode,
                                   const MCConfig& cfg);

/// Same run evaluated at several x thresholds over one shared ensemble.
std::vector<MCEstimate> estimate_deviation_prob_xgrid(
    const process::ProcessSpec& spec, double epsilon, std::span<const double> xs,
    process::DeviationMode mode, const MCConfig& cfg);

/// Fixed-eps protocol: explicit sampling interval q, threshold eps itself.
MCEstimate estimate_deviation_prob_at_q(const process::ProcessSpec& spec,
                                        double epsilon, double q,
                                        process::DeviationMode mode,
                                        const MCConfig& cfg);

/// Single-block probability raised to the block count (independent
/// increments only): p_b^{floor(1/q)} times the residual-block factor,
/// with a delta-method interval on the log scale.
MCEstimate block_product_estimator(const process::ProcessSpec& spec, double epsilon,
                                   double q, process::DeviationMode mode,
                                   const MCConfig& cfg);

struct RefinementRow {
  std::size_t m;
  MCEstimate est;
  bool coupled;
};

/// Nested-grid refinement study across an increasing power-of-2 schedule.
/// Brownian paths are refined by conditional (bridge) insertion, so the
/// per-path supremum is non-decreasing in m; stable and LFSM paths are
/// regenerated from the replicate's substream and flagged non-coupled.
std::vector<RefinementRow> refinement_study(const process::ProcessSpec& spec,
                                            double epsilon, double x,
                                            process::DeviationMode mode,
                                            std::span<const std::size_t> m_schedule,
                                            const MCConfig& cfg);

/// First m in the study whose estimate moved by less than half its Wilson
/// width relative to the previous level; 0 when never converged.
std::size_t converged_m(std::span<const RefinementRow> rows);

struct ConvergenceRow {
  double epsilon;
  MCEstimate est;
  double p_limit;  ///< NaN when the law leaves kappa unstated
  double gap;      ///< p_hat - p_limit
};

std::vector<ConvergenceRow> convergence_to_limit(const process::ProcessSpec& spec,
                                                 std::span<const double> eps_schedule,
                                                 double x, process::DeviationMode mode,
                                                 const MCConfig& cfg);

struct KappaFit {
  double kappa = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_used = 0;
  std::vector<double> residuals;  ///< y_i - kappa e^{-x_i}
};

/// Least-squares fit of -ln p_hat against e^{-x} through the origin;
/// degenerate estimates (p_hat 0 or 1) are excluded.
KappaFit fit_kappa_gumbel(std::span<const std::pair<double, MCEstimate>> points,
                          double level = 0.95);

struct InequalityReport {
  double h = 0.0;
  double u = 0.0;
  double left = 0.0;       ///< MC estimate of P{ sup_{[0,h]} L > u } on the grid
  double left_se = 0.0;
  double left_coarse = 0.0;  ///< same statistic on the half-resolution grid
  double right = 0.0;      ///< P{L(h) > u} / P{L(h) > 0}
  double right_se = 0.0;
  double margin = 0.0;     ///< right + 3 (combined se) - left
  bool holds = false;
  std::size_t n = 0;
};

/// Checks P{ sup_{[0,h]} L(t) > u } <= P{L(h) > u} / P{L(h) > 0} by
/// simulation, one report per requested level; all levels share the
/// path ensemble.
std::vector<InequalityReport> check_sup_tail_inequality(double alpha, double beta,
                                                      double h,
                                                      std::span<const double> us,
                                                      const MCConfig& cfg,
                                                      std::size_t grid_points = 256);

InequalityReport check_sup_tail_inequality(double alpha, double beta, double h,
                                         double u, const MCConfig& cfg,
                                         std::size_t grid_points = 256);

}  // namespace siq::mc
