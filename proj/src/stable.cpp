#include "siq/stable.hpp"

#include <cmath>
#include <vector>

#include "siq/integrate.hpp"

namespace siq::stable {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void StableParams::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::domain_error("StableParams: alpha must lie in (0, 2]");
  if (!(beta >= -1.0) || !(beta <= 1.0))
    throw std::domain_error("StableParams: beta must lie in [-1, 1]");
  if (!(sigma > 0.0))
    throw std::domain_error("StableParams: sigma must be positive");
}

double lambda_alpha(double alpha) {
  if (!(alpha > 1.0))
    throw std::domain_error("lambda_alpha: requires alpha > 1");
  if (!(alpha <= 2.0))
    throw std::domain_error("lambda_alpha: requires alpha <= 2");
  return alpha / (2.0 * (alpha - 1.0));
}

double b_alpha_sq(double alpha) {
  if (!(alpha > 1.0) || !(alpha < 2.0))
    throw std::domain_error("b_alpha_sq: requires alpha in (1, 2)");
  const double lam = lambda_alpha(alpha);
  const double cosa = std::fabs(std::cos(kPi * alpha / 2.0));
  return std::pow(alpha, 2.0 * lam) /
         (2.0 * (alpha - 1.0) * std::pow(cosa, 2.0 * lam - 1.0));
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("c_alpha: integral diverges outside (0, 2)");

  // (0, 1]: termwise integration of the sine series,
  // int_0^1 x^{-a} sin x dx = sum_k (-1)^k / ((2k+1)! (2k+2-a)).
  double head = 0.0;
  double fact = 1.0;  // (2k+1)!
  for (int k = 0; k < 24; ++k) {
    const int m = 2 * k + 1;
    if (k > 0) fact *= static_cast<double>(m - 1) * static_cast<double>(m);
    const double term = 1.0 / (fact * (m + 1.0 - alpha));
    head += (k % 2 == 0) ? term : -term;
    if (term < 1e-18) break;
  }

  const auto f = [alpha](double x) { return std::pow(x, -alpha) * std::sin(x); };

  // [1, pi]: smooth, plain adaptive panel.
  const double mid = quad::adaptive(f, 1.0, kPi, 1e-13);

  // (pi, inf): alternating half-period cells, accelerated.
  std::vector<double> cells(48);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double a = kPi * static_cast<double>(k + 1);
    cells[k] = std::fabs(quad::gauss_legendre_16(f, a, a + kPi));
  }
  const double tail = quad::alternating_sum(cells, -1.0);

  return 1.0 / (head + mid + tail);
}

double gaussian_tail(double z) {
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double stable_tail_skewed(double alpha, double sigma, double u) {
  if (!(sigma > 0.0)) throw std::domain_error("stable_tail_skewed: sigma > 0");
  if (!(u > 0.0))
    throw std::domain_error("stable_tail_skewed: asymptotic regime needs u > 0");
  const double lam = lambda_alpha(alpha);
  if (!(alpha < 2.0))
    throw std::domain_error("stable_tail_skewed: requires alpha in (1, 2)");
  const double z = std::pow(u / sigma, lam) / std::sqrt(b_alpha_sq(alpha));
  return gaussian_tail(z) / std::sqrt(alpha);
}

StableSampler::StableSampler(const StableParams& params) : params_(params) {
  params_.validate();
  const double a = params_.alpha;
  const double b = params_.beta;
  if (a == 2.0 || a == 1.0) return;
  const double t = b * std::tan(kPi * a / 2.0);
  b_angle_ = std::atan(t) / a;
  s_scale_ = std::pow(1.0 + t * t, 0.5 / a);
  inv_alpha_ = 1.0 / a;
  cms_exp_ = (1.0 - a) / a;
}

double StableSampler::operator()(Rng& rng) const {
  const double a = params_.alpha;
  const double sigma = params_.sigma;
  if (a == 2.0) {
    // S_2(sigma, ., 0) = N(0, 2 sigma^2)
    return sigma * std::sqrt(2.0) * rng.normal();
  }
  const double v = rng.uniform_angle();
  const double e = rng.exponential();
  if (a == 1.0) {
    const double b = params_.beta;
    const double g = kPi / 2.0 + b * v;
    const double x = (2.0 / kPi) *
                     (g * std::tan(v) -
                      b * std::log((kPi / 2.0) * e * std::cos(v) / g));
    // sigma X ~ S_1(sigma, beta, -(2/pi) beta sigma ln sigma); re-center.
    return sigma * x + (2.0 / kPi) * b * sigma * std::log(sigma);
  }
  const double av = a * (v + b_angle_);
  const double x = s_scale_ * std::sin(av) /
                   std::pow(std::cos(v), inv_alpha_) *
                   std::pow(std::cos(v - av) / e, cms_exp_);
  return sigma * x;
}

double sample_stable(const StableParams& params, Rng& rng) {
  return StableSampler(params)(rng);
}

}  // namespace siq::stable
