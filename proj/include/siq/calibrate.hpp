#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "siq/process.hpp"

namespace siq::calib {

/// The sampling bracket went non-positive: epsilon is too large for the
/// closed-form rate. Carries the admissible threshold found by bisection.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double admissible_epsilon)
      : std::runtime_error(what), admissible_epsilon_(admissible_epsilon) {}
  /// Largest epsilon for which the calibration formula is defined.
  double admissible_epsilon() const { return admissible_epsilon_; }

 private:
  double admissible_epsilon_;
};

/// Calibrated tuple (eps, q, w, q-tilde, q-hat) with regime descriptors.
/// For every process implemented here q_tilde = q_hat, Q2 = 1, Q1 = inf.
/// Brownian calibration carries no deviation scale (w = 0 marks that the
/// limit is exposed at x = 0 only).
struct SamplingScales {
  double epsilon = 0.0;
  double q = 0.0;
  double w = 0.0;
  double q_tilde = 0.0;
  double q_hat = 0.0;
  double Q1 = std::numeric_limits<double>::infinity();
  double Q2 = 1.0;
};

/// Brownian sampling interval q_i(eps) =
/// (eps^2 / C) [4 ln(1/eps) + ln(4 ln(1/eps)) + 2 ln(2 C i / sqrt(2 pi))]^{-1}.
double q_bm(double epsilon, double var_rate, int i);

/// Threshold below which the q_bm bracket stays positive.
double q_bm_admissible_epsilon(double var_rate, int i);

/// Totally skewed stable Levy calibration (unit scale), alpha in (1, 2):
/// q = (eps^alpha / b^{alpha/lambda}) bracket^{-alpha/(2 lambda)},
/// w = eps / (2 alpha lambda ln(1/eps)), q_tilde = q_hat = alpha w / eps.
SamplingScales calib_stable_skewed(double epsilon, double alpha);

double stable_admissible_epsilon(double alpha);

/// LFSM calibration with sigma1 = sigma(xi(1)):
/// q = (eps / (b^{1/lambda} sigma1))^{1/H} bracket^{-1/(2 H lambda)},
/// w = H eps / (2 lambda ln(1/eps)), q_tilde = q_hat = w / (H eps).
SamplingScales calib_lfsm(double epsilon, double alpha, double hurst, double sigma1);

double lfsm_admissible_epsilon(double alpha, double hurst, double sigma1);

/// Calibration dispatcher. For Brownian specs `i` selects q_1/q_2 from
/// the deviation mode; for stable specs with sigma != 1 the scales are
/// obtained from the unit-scale formulas via eps -> eps/sigma.
SamplingScales calibrate(const process::ProcessSpec& spec, double epsilon,
                         process::DeviationMode mode);

enum class LimitShape { kGumbel, kPointAtZero };
enum class LimitKind { kAsymptoticEps, kFixedEps };

/// Limit law of the normalized deviation statistic. `kappa` is empty
/// when the theory guarantees existence without a value (skewed stable
/// Levy, one-sided).
struct LimitLaw {
  LimitShape shape = LimitShape::kGumbel;
  LimitKind kind = LimitKind::kAsymptoticEps;
  std::optional<double> kappa;

  /// F-bar tail shape: e^{-x} on all of R for the Gumbel case,
  /// defined only at x = 0 (value 1) for the point-evaluation case.
  double fbar(double x) const;

  /// Limit probability exp(-kappa fbar(x)); NaN when kappa is unstated
  /// or x is outside the law's domain.
  double prob_at(double x) const;
};

LimitLaw limit_law(const process::ProcessSpec& spec, process::DeviationMode mode);

/// Fixed-eps limits of the largest-jump regime:
/// one-sided -> exp(-0.5 C_alpha (1+beta) eps^-alpha),
/// two-sided -> exp(-C_alpha eps^-alpha).
double fixed_eps_levy_limit(double alpha, double beta, double epsilon,
                            process::DeviationMode mode);

/// Deterministic calibration probes built from the asymptotic marginal
/// tail: ratio31 -> 1, ratio32 -> e^{-x}, ratio33 -> e^{-x-r}.
struct ConditionRatios {
  double ratio31;
  double ratio32;
  double ratio33;
};

ConditionRatios probe_condition_ratios(const process::ProcessSpec& spec,
                                       double epsilon, double x, double r);

}  // namespace siq::calib
