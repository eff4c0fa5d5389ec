#include "siq/calibrate.hpp"

#include <cmath>
#include <functional>

namespace siq::calib {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Largest epsilon in (lo, hi) at which `bracket` is still positive,
/// assuming positivity for all smaller epsilon. 200 bisection steps.
double admissible_threshold(const std::function<double(double)>& bracket,
                            double lo, double hi) {
  if (bracket(hi) > 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bracket(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

double bm_bracket(double epsilon, double var_rate, int i) {
  const double l = std::log(1.0 / epsilon);
  if (!(l > 0.0)) return -1.0;
  return 4.0 * l + std::log(4.0 * l) +
         2.0 * std::log(2.0 * var_rate * static_cast<double>(i) / std::sqrt(2.0 * kPi));
}

double stable_bracket(double epsilon, double alpha) {
  const double l = std::log(1.0 / epsilon);
  if (!(l > 0.0)) return -1.0;
  const double lam = stable::lambda_alpha(alpha);
  const double b_pow = std::pow(stable::b_alpha_sq(alpha), 0.5 * alpha / lam);
  return 2.0 * alpha * l - (3.0 - 2.0 * alpha) * std::log(2.0 * alpha * l) -
         2.0 * std::log(std::sqrt(2.0 * kPi * alpha) / b_pow);
}

double lfsm_bracket(double epsilon, double alpha, double hurst, double sigma1) {
  const double l = std::log(1.0 / epsilon);
  if (!(l > 0.0)) return -1.0;
  const double lam = stable::lambda_alpha(alpha);
  const double base = std::pow(stable::b_alpha_sq(alpha), 0.5 / lam) * sigma1;
  const double hl = hurst * lam;
  return (2.0 / hurst) * l - (hl - 1.0) / hl * std::log((2.0 / hurst) * l) -
         2.0 * std::log(std::sqrt(2.0 * kPi * alpha) / std::pow(base, 1.0 / hurst));
}

}  // namespace

double q_bm(double epsilon, double var_rate, int i) {
  if (!(var_rate > 0.0)) throw std::domain_error("q_bm: var_rate must be positive");
  if (i != 1 && i != 2) throw std::domain_error("q_bm: i must be 1 or 2");
  if (!(epsilon > 0.0)) throw std::domain_error("q_bm: epsilon must be positive");
  const double br = bm_bracket(epsilon, var_rate, i);
  if (!(br > 0.0))
    throw CalibrationError("q_bm: bracket non-positive at this epsilon",
                           q_bm_admissible_epsilon(var_rate, i));
  return epsilon * epsilon / var_rate / br;
}

double q_bm_admissible_epsilon(double var_rate, int i) {
  return admissible_threshold(
      [var_rate, i](double e) { return bm_bracket(e, var_rate, i); }, 1e-12, 1.0);
}

SamplingScales calib_stable_skewed(double epsilon, double alpha) {
  if (!(alpha > 1.0) || !(alpha < 2.0))
    throw std::domain_error("calib_stable_skewed: alpha must lie in (1, 2)");
  if (!(epsilon > 0.0))
    throw std::domain_error("calib_stable_skewed: epsilon must be positive");
  const double br = stable_bracket(epsilon, alpha);
  if (!(br > 0.0))
    throw CalibrationError("calib_stable_skewed: bracket non-positive at this epsilon",
                           stable_admissible_epsilon(alpha));
  const double lam = stable::lambda_alpha(alpha);
  const double b_pow = std::pow(stable::b_alpha_sq(alpha), 0.5 * alpha / lam);
  const double l = std::log(1.0 / epsilon);
  SamplingScales s;
  s.epsilon = epsilon;
  s.q = std::pow(epsilon, alpha) / b_pow * std::pow(br, -0.5 * alpha / lam);
  s.w = epsilon / (2.0 * alpha * lam * l);
  s.q_tilde = s.q_hat = alpha * s.w / epsilon;
  return s;
}

double stable_admissible_epsilon(double alpha) {
  return admissible_threshold(
      [alpha](double e) { return stable_bracket(e, alpha); }, 1e-12, 1.0);
}

SamplingScales calib_lfsm(double epsilon, double alpha, double hurst, double sigma1) {
  if (!(alpha > 1.0) || !(alpha < 2.0))
    throw std::domain_error("calib_lfsm: alpha must lie in (1, 2)");
  if (!(hurst > 1.0 / alpha) || !(hurst < 1.0))
    throw std::domain_error("calib_lfsm: requires 1/alpha < H < 1");
  if (!(sigma1 > 0.0)) throw std::domain_error("calib_lfsm: sigma1 must be positive");
  if (!(epsilon > 0.0)) throw std::domain_error("calib_lfsm: epsilon must be positive");
  const double br = lfsm_bracket(epsilon, alpha, hurst, sigma1);
  if (!(br > 0.0))
    throw CalibrationError("calib_lfsm: bracket non-positive at this epsilon",
                           lfsm_admissible_epsilon(alpha, hurst, sigma1));
  const double lam = stable::lambda_alpha(alpha);
  const double base = std::pow(stable::b_alpha_sq(alpha), 0.5 / lam) * sigma1;
  const double l = std::log(1.0 / epsilon);
  SamplingScales s;
  s.epsilon = epsilon;
  s.q = std::pow(epsilon / base, 1.0 / hurst) *
        std::pow(br, -0.5 / (hurst * lam));
  s.w = hurst * epsilon / (2.0 * lam * l);
  s.q_tilde = s.q_hat = s.w / (hurst * epsilon);
  return s;
}

double lfsm_admissible_epsilon(double alpha, double hurst, double sigma1) {
  return admissible_threshold(
      [=](double e) { return lfsm_bracket(e, alpha, hurst, sigma1); }, 1e-12, 1.0);
}

SamplingScales calibrate(const process::ProcessSpec& spec, double epsilon,
                         process::DeviationMode mode) {
  return std::visit(
      [&](const auto& p) -> SamplingScales {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, process::BrownianMotion>) {
          SamplingScales s;
          s.epsilon = epsilon;
          s.q = q_bm(epsilon, p.var_rate,
                     mode == process::DeviationMode::kOneSided ? 1 : 2);
          return s;
        } else if constexpr (std::is_same_v<T, process::StableLevy>) {
          if (!(p.params.alpha > 1.0) || !(p.params.alpha < 2.0))
            throw std::domain_error(
                "calibrate: the closed-form stable rate requires alpha in (1, 2)");
          p.params.validate();
          if (p.params.beta != -1.0)
            throw std::domain_error(
                "calibrate: the closed-form stable rate requires beta = -1; "
                "with jumps in the monitored direction use the fixed-eps law "
                "(explicit q) instead");
          const double sigma = p.params.sigma;
          SamplingScales s = calib_stable_skewed(epsilon / sigma, p.params.alpha);
          s.epsilon = epsilon;
          s.w *= sigma;
          return s;
        } else {
          const double s1 = p.noise_scale * process::lfsm_scale_sigma1(p.hurst, p.alpha);
          return calib_lfsm(epsilon, p.alpha, p.hurst, s1);
        }
      },
      spec);
}

double LimitLaw::fbar(double x) const {
  if (shape == LimitShape::kGumbel) return std::exp(-x);
  return x == 0.0 ? 1.0 : kNaN;
}

double LimitLaw::prob_at(double x) const {
  if (!kappa) return kNaN;
  const double f = fbar(x);
  return std::isnan(f) ? kNaN : std::exp(-*kappa * f);
}

LimitLaw limit_law(const process::ProcessSpec& spec, process::DeviationMode mode) {
  return std::visit(
      [&](const auto& p) -> LimitLaw {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, process::BrownianMotion>) {
          // Exact-product limit at q_1; exposed at x = 0 only.
          return {LimitShape::kPointAtZero, LimitKind::kAsymptoticEps, 2.0};
        } else if constexpr (std::is_same_v<T, process::StableLevy>) {
          p.params.validate();
          const bool skewed_up_free =
              p.params.beta == -1.0 && p.params.alpha > 1.0;
          if (mode == process::DeviationMode::kOneSided && skewed_up_free)
            return {LimitShape::kGumbel, LimitKind::kAsymptoticEps, std::nullopt};
          throw std::domain_error(
              "limit_law: the asymptotic-in-eps sampling law degenerates for "
              "a Levy motion with jumps in the monitored direction (the "
              "statistic converges to the largest such jump); use "
              "fixed_eps_levy_limit for the fixed-eps law");
        } else {
          p.validate();
          if (mode == process::DeviationMode::kTwoSided)
            throw std::domain_error(
                "limit_law: the two-sided deviation at this rate is dominated "
                "by the heavy lower tail of the driving noise (the expected "
                "count of downward block exceedances diverges as eps -> 0); "
                "only the one-sided law is exposed");
          return {LimitShape::kGumbel, LimitKind::kAsymptoticEps, 1.0};
        }
      },
      spec);
}

double fixed_eps_levy_limit(double alpha, double beta, double epsilon,
                            process::DeviationMode mode) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("fixed_eps_levy_limit: alpha must lie in (0, 2)");
  if (!(beta >= -1.0) || !(beta <= 1.0))
    throw std::domain_error("fixed_eps_levy_limit: beta must lie in [-1, 1]");
  if (!(epsilon > 0.0))
    throw std::domain_error("fixed_eps_levy_limit: epsilon must be positive");
  const double c = stable::c_alpha(alpha);
  const double mass = std::pow(epsilon, -alpha) * c;
  if (mode == process::DeviationMode::kOneSided)
    return std::exp(-0.5 * (1.0 + beta) * mass);
  return std::exp(-mass);
}

ConditionRatios probe_condition_ratios(const process::ProcessSpec& spec,
                                       double epsilon, double x, double r) {
  if (!(r >= 0.0)) throw std::domain_error("probe_condition_ratios: r must be >= 0");
  double alpha = 0.0;
  // Marginal scale map sigma(t) of the asymptotic tail evaluator.
  std::function<double(double)> scale_at;
  SamplingScales s;
  if (const auto* sl = std::get_if<process::StableLevy>(&spec)) {
    sl->params.validate();
    if (sl->params.beta != -1.0 || !(sl->params.alpha > 1.0))
      throw std::domain_error(
          "probe_condition_ratios: needs a totally skewed stable Levy (beta = -1, alpha > 1)");
    alpha = sl->params.alpha;
    const double sigma = sl->params.sigma;
    scale_at = [alpha, sigma](double t) { return sigma * std::pow(t, 1.0 / alpha); };
    s = calibrate(spec, epsilon, process::DeviationMode::kOneSided);
  } else if (const auto* lf = std::get_if<process::Lfsm>(&spec)) {
    lf->validate();
    alpha = lf->alpha;
    const double s1 = lf->noise_scale * process::lfsm_scale_sigma1(lf->hurst, lf->alpha);
    const double h = lf->hurst;
    scale_at = [s1, h](double t) { return s1 * std::pow(t, h); };
    s = calibrate(spec, epsilon, process::DeviationMode::kOneSided);
  } else {
    throw std::domain_error("probe_condition_ratios: process must be stable or lfsm");
  }

  const double tail_q = stable::stable_tail_skewed(alpha, scale_at(s.q), epsilon);
  ConditionRatios out;
  out.ratio31 = tail_q / s.q;
  out.ratio32 =
      stable::stable_tail_skewed(alpha, scale_at(s.q), epsilon + x * s.w) / tail_q;
  const double t_shrunk = s.q * (1.0 - s.q_tilde * r);
  out.ratio33 =
      stable::stable_tail_skewed(alpha, scale_at(t_shrunk), epsilon + x * s.w) / tail_q;
  return out;
}

}  // namespace siq::calib
