#pragma once

#include <stdexcept>

#include "siq/rng.hpp"

namespace siq::stable {

/// Parameters of the stable law S_alpha(sigma, beta, 0) in the
/// Samorodnitsky-Taqqu 1-parametrization. The shift is fixed at zero
/// throughout the toolkit.
struct StableParams {
  double alpha = 2.0;  ///< stability index, in (0, 2]
  double beta = 0.0;   ///< skewness, in [-1, 1]; irrelevant at alpha = 2
  double sigma = 1.0;  ///< scale, > 0

  void validate() const;
};

/// lambda_alpha = alpha / (2 (alpha - 1)); requires alpha > 1.
double lambda_alpha(double alpha);

/// b_alpha^2 = alpha^{2 lambda} / (2 (alpha-1) |cos(pi alpha / 2)|^{2 lambda - 1});
/// requires alpha in (1, 2).
double b_alpha_sq(double alpha);

/// Tail constant C_alpha = ( int_0^inf x^{-alpha} sin x dx )^{-1} for
/// alpha in (0, 2), evaluated by quadrature: power series on (0, 1],
/// adaptive Gauss-Kronrod on [1, pi], and an accelerated alternating
/// series over half-period cells on (pi, inf). Relative error <= 1e-8.
double c_alpha(double alpha);

/// P{ N(0,1) > z } via the complementary error function.
double gaussian_tail(double z);

/// Asymptotic right tail of the totally skewed stable law,
/// P{ S_alpha(sigma, -1, 0) > u } ~ gaussian_tail((u/sigma)^lambda / b_alpha) / sqrt(alpha).
/// Valid for large u/sigma; this is an asymptotic evaluation, not an
/// exact CDF (at moderate u it sits a near-constant factor below the
/// exact tail). The calibration brackets use the same form, so ratios of
/// this evaluation cancel the factor. Requires alpha in (1, 2),
/// sigma > 0, u > 0.
double stable_tail_skewed(double alpha, double sigma, double u);

/// One-draw variate generator for S_alpha(sigma, beta, 0) using the
/// Chambers-Mallows-Stuck transform. Precomputes the angle/scale
/// constants once so hot loops pay only the per-draw trigonometry.
class StableSampler {
 public:
  explicit StableSampler(const StableParams& params);

  double operator()(Rng& rng) const;

  const StableParams& params() const { return params_; }

 private:
  StableParams params_;
  double b_angle_ = 0.0;   // atan(beta tan(pi alpha/2)) / alpha
  double s_scale_ = 1.0;   // (1 + beta^2 tan^2(pi alpha/2))^{1/(2 alpha)}
  double inv_alpha_ = 0.5;
  double cms_exp_ = 0.0;   // (1 - alpha) / alpha
  double shift1_ = 0.0;    // alpha = 1 scale-shift correction
};

/// Single variate of S_alpha(sigma, beta, 0).
double sample_stable(const StableParams& params, Rng& rng);

}  // namespace siq::stable
