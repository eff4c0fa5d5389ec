#include "siq/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "siq/integrate.hpp"

namespace siq::process {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void Lfsm::validate() const {
  if (!(alpha > 1.0) || !(alpha < 2.0))
    throw std::domain_error("Lfsm: alpha must lie in (1, 2)");
  if (!(hurst > 1.0 / alpha) || !(hurst < 1.0))
    throw std::domain_error("Lfsm: requires 1/alpha < H < 1");
  if (!(noise_scale > 0.0))
    throw std::domain_error("Lfsm: noise_scale must be positive");
  if (disc.noise_step < 0.0 || !(disc.trunc_right > 0.0) ||
      !(disc.alpha_norm_tol > 0.0))
    throw std::invalid_argument("Lfsm: bad discretization parameters");
}

BlockCount blocks_in_unit(double q) {
  if (!(q > 0.0)) throw std::domain_error("blocks_in_unit: q must be positive");
  long full = static_cast<long>(std::floor(1.0 / q + 1e-9));
  double residual = 1.0 - static_cast<double>(full) * q;
  if (residual < 1e-12) residual = 0.0;
  return {full, residual};
}

GridPath simulate_bm(std::size_t n_steps, double dt, double var_rate, Rng& rng) {
  if (n_steps < 1 || !(dt > 0.0) || !(var_rate > 0.0))
    throw std::invalid_argument("simulate_bm: need n_steps >= 1, dt > 0, var_rate > 0");
  GridPath path{0.0, dt, Eigen::ArrayXd(n_steps + 1)};
  const double sd = std::sqrt(var_rate * dt);
  double acc = 0.0;
  path.values[0] = 0.0;
  for (std::size_t j = 1; j <= n_steps; ++j) {
    acc += sd * rng.normal();
    path.values[static_cast<Eigen::Index>(j)] = acc;
  }
  return path;
}

GridPath simulate_stable_levy(std::size_t n_steps, double dt,
                              const stable::StableParams& params, Rng& rng) {
  if (n_steps < 1 || !(dt > 0.0))
    throw std::invalid_argument("simulate_stable_levy: need n_steps >= 1, dt > 0");
  params.validate();
  const stable::StableSampler sampler(params);
  const double step_scale = std::pow(dt, 1.0 / params.alpha);
  GridPath path{0.0, dt, Eigen::ArrayXd(n_steps + 1)};
  double acc = 0.0;
  path.values[0] = 0.0;
  for (std::size_t j = 1; j <= n_steps; ++j) {
    acc += step_scale * sampler(rng);
    path.values[static_cast<Eigen::Index>(j)] = acc;
  }
  return path;
}

double lfsm_kernel(double t, double r, double hurst, double alpha) {
  const double d = hurst - 1.0 / alpha;
  const auto plus_pow = [d](double x) { return x > 0.0 ? std::pow(x, d) : 0.0; };
  return plus_pow(t + r) - plus_pow(r);
}

double lfsm_scale_sigma1(double hurst, double alpha, double quad_tol) {
  if (!(alpha > 1.0) || !(alpha < 2.0) || !(hurst > 1.0 / alpha) || !(hurst < 1.0))
    throw std::domain_error("lfsm_scale_sigma1: requires alpha in (1,2), H in (1/alpha, 1)");
  if (!(quad_tol > 0.0))
    throw std::invalid_argument("lfsm_scale_sigma1: quad_tol must be positive");
  const double d = hurst - 1.0 / alpha;
  // (-1, 0]: kernel is (1+r)^d alone; exact.
  const double head = 1.0 / (alpha * d + 1.0);
  const auto g = [d, alpha](double r) {
    return std::pow(std::pow(1.0 + r, d) - std::pow(r, d), alpha);
  };
  // On (0, 1) the integrand has an r^d cusp at 0; substituting r = s^{1/d}
  // makes it smooth.
  const auto g_sub = [d, alpha](double s) {
    if (s <= 0.0) return 0.0;
    const double r = std::pow(s, 1.0 / d);
    const double val = std::pow(std::pow(1.0 + r, d) - s, alpha);
    return val * (1.0 / d) * std::pow(s, 1.0 / d - 1.0);
  };
  double body = quad::adaptive(g_sub, 0.0, 1.0, 0.1 * quad_tol) +
                quad::adaptive(g, 1.0, 512.0, 0.1 * quad_tol);
  // Far tail: g(r)^alpha = d^alpha r^{alpha(d-1)} (1 + k2/r + k3/r^2 + ...);
  // integrate the first two terms analytically and grow the cutoff until
  // the third-order term is negligible.
  const double c = alpha * (d - 1.0);
  const double da = std::pow(d, alpha);
  const double k2 = alpha * (d - 1.0) / 2.0;
  const double k3 = alpha * (d - 1.0) * (d - 2.0) / 6.0 +
                    alpha * (alpha - 1.0) * (d - 1.0) * (d - 1.0) / 8.0;
  double r_cut = 512.0;
  for (int iter = 0; iter < 32; ++iter) {
    const double t3 = std::fabs(da * k3 * std::pow(r_cut, c - 1.0) / (1.0 - c));
    if (t3 <= 0.1 * quad_tol * (head + body)) break;
    body += quad::adaptive(g, r_cut, 2.0 * r_cut, 0.1 * quad_tol);
    r_cut *= 2.0;
  }
  const double tail1 = da * std::pow(r_cut, c + 1.0) / (-c - 1.0);
  const double tail2 = da * k2 * std::pow(r_cut, c) / (-c);
  const double mass = head + body + tail1 + tail2;
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::runtime_error("lfsm_scale_sigma1: quadrature failed");
  return std::pow(mass, 1.0 / alpha);
}

LfsmEngine::LfsmEngine(std::size_t n_steps, double dt, const Lfsm& spec)
    : n_steps_(n_steps),
      dt_(dt),
      spec_(spec),
      noise_sampler_(stable::StableParams{spec.alpha, -1.0, 1.0}) {
  spec_.validate();
  if (n_steps < 1 || !(dt > 0.0))
    throw std::invalid_argument("LfsmEngine: need n_steps >= 1, dt > 0");
  noise_step_ = spec_.disc.noise_step > 0.0 ? spec_.disc.noise_step : dt;
  const double ratio = dt / noise_step_;
  ratio_ = static_cast<std::size_t>(std::llround(ratio));
  if (ratio_ < 1 || std::fabs(ratio - static_cast<double>(ratio_)) > 1e-9)
    throw std::invalid_argument("LfsmEngine: dt must be an integer multiple of noise_step");

  const double alpha = spec_.alpha;
  const double d = spec_.hurst - 1.0 / alpha;
  const double horizon = static_cast<double>(n_steps_) * dt_;
  const double r_right = spec_.disc.trunc_right;

  // Residual alpha-mass after linear tail compensation (second-order
  // kernel remainder), relative to the full alpha-mass at t = horizon.
  const double k2 = std::fabs(d * (d - 1.0)) / 2.0;
  const double resid = std::pow(k2, alpha) * std::pow(horizon, 2.0 * alpha) *
                       std::pow(r_right, alpha * (d - 2.0) + 1.0) /
                       (alpha * (2.0 - d) - 1.0);
  const double full = std::pow(lfsm_scale_sigma1(spec_.hurst, alpha, 1e-8), alpha) *
                      std::pow(horizon, alpha * spec_.hurst);
  residual_fraction_ = resid / full;
  if (residual_fraction_ > spec_.disc.alpha_norm_tol)
    throw std::invalid_argument(
        "LfsmEngine: truncated kernel residual exceeds alpha_norm_tol; "
        "raise trunc_right");

  k_left_ = n_steps_ * ratio_;
  const std::size_t k_right =
      static_cast<std::size_t>(std::ceil(r_right / noise_step_));
  n_noise_ = k_left_ + k_right;

  // Tail-compensation variate scale: sigma_Y^alpha = int_R^inf (d r^{d-1})^alpha dr.
  const double c = alpha * (d - 1.0);
  comp_scale_ = std::pow(std::pow(d, alpha) * std::pow(r_right, c + 1.0) / (-c - 1.0),
                         1.0 / alpha);

  // Kernel samples on the midpoint grid, indexed so that
  // xi(t_j) = sum_k A[j*ratio + k] dL[k] - sum_k A[k] dL[k].
  const std::size_t a_len = n_steps_ * ratio_ + n_noise_;
  fft_len_ = next_pow2(a_len);
  std::vector<std::complex<double>> a(fft_len_, 0.0);
  for (std::size_t i = 0; i < a_len; ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(k_left_) + 0.5) *
                     noise_step_;
    a[i] = x > 0.0 ? std::pow(x, d) : 0.0;
  }
  Eigen::FFT<double> fft;
  kernel_fft_.resize(fft_len_);
  fft.fwd(kernel_fft_, a);
  work_.resize(fft_len_);
  work2_.resize(fft_len_);
  noise_.resize(n_noise_);
}

GridPath LfsmEngine::simulate(Rng& rng) {
  const double alpha = spec_.alpha;
  const double noise_amp = std::pow(noise_step_, 1.0 / alpha);
  for (std::size_t k = 0; k < n_noise_; ++k)
    noise_[k] = noise_amp * noise_sampler_(rng);
  const double comp = comp_scale_ * noise_sampler_(rng);

  std::fill(work_.begin(), work_.end(), std::complex<double>(0.0, 0.0));
  for (std::size_t k = 0; k < n_noise_; ++k) work_[k] = noise_[k];

  Eigen::FFT<double> fft;
  fft.fwd(work2_, work_);
  for (std::size_t i = 0; i < fft_len_; ++i)
    work2_[i] = kernel_fft_[i] * std::conj(work2_[i]);
  fft.inv(work_, work2_);

  GridPath path{0.0, dt_, Eigen::ArrayXd(n_steps_ + 1)};
  const double s0 = work_[0].real();
  path.values[0] = 0.0;
  for (std::size_t j = 1; j <= n_steps_; ++j) {
    const double t = static_cast<double>(j) * dt_;
    path.values[static_cast<Eigen::Index>(j)] =
        spec_.noise_scale * (work_[j * ratio_].real() - s0 + t * comp);
  }
  return path;
}

GridPath simulate_lfsm(std::size_t n_steps, double dt, const Lfsm& spec, Rng& rng) {
  LfsmEngine engine(n_steps, dt, spec);
  return engine.simulate(rng);
}

DeviationStat sup_deviation(const GridPath& path, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("sup_deviation: q must be positive");
  if (path.values.size() < 2)
    throw std::invalid_argument("sup_deviation: path needs at least 2 points");
  const double ratio = q / path.dt;
  const auto mb = static_cast<Eigen::Index>(std::llround(ratio));
  if (mb < 1 || std::fabs(ratio - static_cast<double>(mb)) > 1e-9 * ratio)
    throw std::invalid_argument("sup_deviation: q must be an integer multiple of dt");
  // Left-limit anchor: a point sitting exactly on a block boundary
  // belongs to the block it closes, so t = kq anchors at (k-1)q.
  DeviationStat stat;
  const Eigen::Index n = path.values.size();
  for (Eigen::Index j = 1; j < n; ++j) {
    const Eigen::Index anchor = ((j - 1) / mb) * mb;
    const double dev = path.values[j] - path.values[anchor];
    stat.one_sided = std::max(stat.one_sided, dev);
    stat.two_sided = std::max(stat.two_sided, std::fabs(dev));
  }
  return stat;
}

double bm_block_max_exact(double w_end, double q, double var_rate, Rng& rng) {
  const double u = rng.uniform();
  const double disc = w_end * w_end - 2.0 * var_rate * q * std::log(u);
  return 0.5 * (w_end + std::sqrt(disc));
}

double bm_exact_deviation_prob(double epsilon, double q, double var_rate) {
  if (!(epsilon > 0.0) || !(q > 0.0) || q > 1.0 || !(var_rate > 0.0))
    throw std::domain_error("bm_exact_deviation_prob: need eps > 0, q in (0,1], var_rate > 0");
  const auto bc = blocks_in_unit(q);
  // Work in logs via log1p: the per-block exceedance can sit near 1e-14
  // while the block count is ~1e14, so 1 - x must never be rounded first.
  const double exceed = 2.0 * stable::gaussian_tail(epsilon / std::sqrt(var_rate * q));
  if (exceed >= 1.0) return 0.0;  // negative base clamped
  double log_p = static_cast<double>(bc.full) * std::log1p(-exceed);
  if (bc.residual > 0.0) {
    const double exceed_res =
        2.0 * stable::gaussian_tail(epsilon / std::sqrt(var_rate * bc.residual));
    if (exceed_res >= 1.0) return 0.0;
    log_p += std::log1p(-exceed_res);
  }
  return std::exp(log_p);
}

namespace {

/// log P{ sup_{[0,1]} |W| <= a } for a standard Brownian motion, split so
/// no precision is lost on either side: for a >= 1 the exceedance series
/// 4 [Phibar(a) - Phibar(3a) + Phibar(5a) - ...] feeds log1p; for a < 1
/// the theta series for the (tiny) probability itself is logged directly.
double bm_two_sided_log_block_prob(double a) {
  if (a >= 1.0) {
    double exceed = 0.0;
    for (int m = 1; m <= 24; m += 1) {
      const double term = 4.0 * stable::gaussian_tail((2.0 * m - 1.0) * a);
      exceed += (m % 2 == 1) ? term : -term;
      if (term < 1e-22) break;
    }
    if (exceed >= 1.0) return -std::numeric_limits<double>::infinity();
    return std::log1p(-std::max(0.0, exceed));
  }
  double p = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double m = 2.0 * j + 1.0;
    const double term = std::exp(-m * m * kPi * kPi / (8.0 * a * a)) / m;
    p += (j % 2 == 0) ? term : -term;
    if (term < 1e-18) break;
  }
  p *= 4.0 / kPi;
  if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(std::min(p, 1.0));
}

}  // namespace

double bm_two_sided_block_prob(double epsilon, double len, double var_rate) {
  if (!(epsilon > 0.0) || !(len > 0.0) || !(var_rate > 0.0))
    throw std::domain_error("bm_two_sided_block_prob: bad arguments");
  return std::exp(bm_two_sided_log_block_prob(epsilon / std::sqrt(var_rate * len)));
}

double bm_exact_deviation_prob_two_sided(double epsilon, double q, double var_rate) {
  if (!(epsilon > 0.0) || !(q > 0.0) || q > 1.0 || !(var_rate > 0.0))
    throw std::domain_error("bm_exact_deviation_prob_two_sided: bad arguments");
  const auto bc = blocks_in_unit(q);
  double log_p = static_cast<double>(bc.full) *
                 bm_two_sided_log_block_prob(epsilon / std::sqrt(var_rate * q));
  if (bc.residual > 0.0)
    log_p += bm_two_sided_log_block_prob(epsilon / std::sqrt(var_rate * bc.residual));
  return std::exp(log_p);
}

}  // namespace siq::process
