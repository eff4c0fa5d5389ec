#include "siq/risk.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

namespace siq::risk {

namespace {

/// Grid-anchor maxima max_k xi(k q), k = 0..floor(1/q), one per replicate.
std::vector<double> anchor_maxima(const process::ProcessSpec& spec, double q,
                                  const mc::MCConfig& cfg) {
  const auto bc = process::blocks_in_unit(q);
  const auto n_anchors = static_cast<std::size_t>(bc.full);
  if (n_anchors + 1 > cfg.path_point_cap)
    throw mc::ResourceError("quantile_sim: anchor count exceeds the path cap");
  std::vector<double> maxima(cfg.n_paths);

  unsigned t = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  t = static_cast<unsigned>(std::min<std::size_t>(t, cfg.n_paths));
  const std::size_t chunk = (cfg.n_paths + t - 1) / t;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < t; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    const std::size_t end = std::min<std::size_t>(cfg.n_paths, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      std::optional<process::LfsmEngine> engine;
      if (const auto* lf = std::get_if<process::Lfsm>(&spec))
        engine.emplace(n_anchors, q, *lf);
      for (std::size_t i = begin; i < end; ++i) {
        Rng rng = Rng::substream(cfg.seed, i);
        process::GridPath path;
        if (const auto* bm = std::get_if<process::BrownianMotion>(&spec))
          path = process::simulate_bm(n_anchors, q, bm->var_rate, rng);
        else if (const auto* sl = std::get_if<process::StableLevy>(&spec))
          path = process::simulate_stable_levy(n_anchors, q, sl->params, rng);
        else
          path = engine->simulate(rng);
        maxima[i] = path.values.maxCoeff();
      }
    });
  }
  for (auto& th : pool) th.join();
  return maxima;
}

}  // namespace

double x_from_p(double p, const calib::LimitLaw& law) {
  if (law.shape != calib::LimitShape::kGumbel)
    throw std::domain_error(
        "x_from_p: law is a point evaluation; pass x directly instead");
  if (!law.kappa)
    throw std::domain_error("x_from_p: law has no stated kappa");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("x_from_p: p must lie in (0, 1)");
  return -std::log(-std::log(1.0 - p) / *law.kappa);
}

QuantileSimResult quantile_sim(const process::ProcessSpec& spec, double p,
                               double epsilon, double x, const mc::MCConfig& cfg) {
  cfg.validate();
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("quantile_sim: p must lie in (0, 1)");
  if (p < 10.0 / static_cast<double>(cfg.n_paths))
    throw std::runtime_error(
        "quantile_sim: p below 10/n_paths; raise n_paths for this quantile");
  const calib::SamplingScales scales =
      calib::calibrate(spec, epsilon, process::DeviationMode::kOneSided);
  if (std::holds_alternative<process::BrownianMotion>(spec) && x != 0.0)
    throw std::domain_error("quantile_sim: Brownian runs expose x = 0 only");
  const double d = epsilon + x * scales.w;

  std::vector<double> maxima = anchor_maxima(spec, scales.q, cfg);
  std::vector<double> sorted = maxima;
  std::sort(sorted.begin(), sorted.end());
  const double n_d = static_cast<double>(cfg.n_paths);
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - p) * n_d)) - 1;
  idx = std::min<std::size_t>(idx, cfg.n_paths - 1);
  const double quantile = sorted[idx];

  std::size_t k_exceed = 0;
  for (double m : maxima) k_exceed += (m > quantile);

  QuantileSimResult out;
  out.query = {p, epsilon, x, d, quantile + d};
  out.n = cfg.n_paths;
  out.p_empirical = static_cast<double>(k_exceed) / n_d;
  out.coverage_ci = mc::wilson_ci(k_exceed, cfg.n_paths, cfg.ci_level);
  return out;
}

StationaryTailModel StationaryTailModel::exponential() {
  StationaryTailModel m;
  m.marginal_tail = [](double u) { return std::exp(-u); };
  m.w_tilde = [](double) { return 1.0; };
  m.h_bar = [](double y) { return std::exp(-y); };
  return m;
}

StationaryTailModel StationaryTailModel::from_table(
    std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2)
    throw std::invalid_argument("StationaryTailModel: need at least 2 table points");
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].second > 0.0))
      throw std::invalid_argument("StationaryTailModel: tails must be positive");
    if (i > 0 && !(pts[i].second < pts[i - 1].second))
      throw std::invalid_argument("StationaryTailModel: tail must be strictly decreasing");
  }
  auto table = std::make_shared<std::vector<std::pair<double, double>>>(std::move(pts));
  StationaryTailModel m;
  m.marginal_tail = [table](double u) {
    const auto& t = *table;
    // Log-linear in u; end slopes extended outside the table.
    std::size_t hi = 1;
    while (hi + 1 < t.size() && t[hi].first < u) ++hi;
    const auto& [u0, p0] = t[hi - 1];
    const auto& [u1, p1] = t[hi];
    const double slope = (std::log(p1) - std::log(p0)) / (u1 - u0);
    return std::exp(std::log(p0) + slope * (u - u0));
  };
  m.w_tilde = [](double) { return 1.0; };
  m.h_bar = [](double y) { return std::exp(-y); };
  return m;
}

StationaryResult quantile_stationary(const StationaryTailModel& model, double p,
                                     double epsilon,
                                     const calib::SamplingScales& scales,
                                     const calib::LimitLaw& law) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("quantile_stationary: p must lie in (0, 1)");
  if (!model.marginal_tail || !model.w_tilde || !model.h_bar)
    throw std::invalid_argument("quantile_stationary: incomplete tail model");
  const double x = x_from_p(p, law);
  const double d = epsilon + x * scales.w;
  const double factor = 1.0 / scales.q + 1.0;

  const auto y_of = [&](double u) { return d / model.w_tilde(u); };
  const auto residual = [&](double u) {
    return factor * model.h_bar(-y_of(u)) * model.marginal_tail(u) - p;
  };

  // The residual decreases in u (marginal_tail strictly decreasing);
  // expand the bracket geometrically until the sign changes.
  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (residual(lo) < 0.0) {
    lo = 2.0 * lo - 1.0;
    if (++guard > 128)
      throw SolverError("quantile_stationary: no sign change expanding down (is the tail model monotone?)");
  }
  guard = 0;
  while (residual(hi) > 0.0) {
    hi = 2.0 * hi + 1.0;
    if (++guard > 128)
      throw SolverError("quantile_stationary: no sign change expanding up (tail does not reach p)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(mid))) break;
  }
  const double u = 0.5 * (lo + hi);
  const double res = residual(u);
  if (std::fabs(res) > 1e-9 * p) {
    std::ostringstream msg;
    msg << "quantile_stationary: residual " << res << " above tolerance at u = " << u;
    throw SolverError(msg.str());
  }
  const double y = y_of(u);
  if (!(-y > model.j_lo) || !(-y < model.j_hi))
    throw std::domain_error("quantile_stationary: -y falls outside the model's J interval");
  return {u, y, res};
}

}  // namespace siq::risk
