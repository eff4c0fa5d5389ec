#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "siq/rng.hpp"
#include "siq/stable.hpp"

namespace siq::process {

struct BrownianMotion {
  double var_rate = 1.0;  ///< variance per unit time, > 0
};

struct StableLevy {
  stable::StableParams params;
};

/// Discretization controls for the LFSM moving-average synthesis.
struct LfsmDiscretization {
  double noise_step = 0.0;      ///< driving-noise grid step; 0 = use the path dt
  double trunc_right = 8.0;     ///< kernel truncation point R (time units)
  double alpha_norm_tol = 1e-3; ///< admissible residual alpha-mass fraction
};

struct Lfsm {
  double alpha = 1.5;        ///< stability index, in (1, 2)
  double hurst = 0.8;        ///< H, must satisfy H > 1/alpha strictly
  double noise_scale = 1.0;  ///< scale multiplier on the driving noise
  LfsmDiscretization disc;

  void validate() const;
};

using ProcessSpec = std::variant<BrownianMotion, StableLevy, Lfsm>;

/// Path sampled on the uniform grid t0 + j*dt, j = 0..n; values[0] = 0.
struct GridPath {
  double t0 = 0.0;
  double dt = 0.0;
  Eigen::ArrayXd values;
};

struct DeviationStat {
  double one_sided = 0.0;  ///< sup over the grid of xi(t) - xi(floor(t/q) q)
  double two_sided = 0.0;  ///< sup of the absolute deviation
};

enum class DeviationMode { kOneSided, kTwoSided };

/// Number of full sampling blocks in [0, 1] and the residual length,
/// with a 1e-9 snap so that near-integer 1/q does not produce a
/// spurious sliver block.
struct BlockCount {
  long full;
  double residual;
};
BlockCount blocks_in_unit(double q);

GridPath simulate_bm(std::size_t n_steps, double dt, double var_rate, Rng& rng);

GridPath simulate_stable_levy(std::size_t n_steps, double dt,
                              const stable::StableParams& params, Rng& rng);

/// Moving-average kernel of the LFSM integral,
/// ((t+r)^+)^{H-1/alpha} - ((r)^+)^{H-1/alpha}.
double lfsm_kernel(double t, double r, double hurst, double alpha);

/// sigma(xi(1)) = ( int_{-1}^{inf} |lfsm_kernel(1, r)|^alpha dr )^{1/alpha}
/// by adaptive quadrature with an analytic power-law tail correction.
double lfsm_scale_sigma1(double hurst, double alpha, double quad_tol = 1e-10);

/// One LFSM synthesis configuration: kernel grid, cached kernel FFT and
/// the tail-compensation scale. Reusable across replicates; one engine
/// per thread (simulate() uses internal buffers).
class LfsmEngine {
 public:
  LfsmEngine(std::size_t n_steps, double dt, const Lfsm& spec);

  GridPath simulate(Rng& rng);

  /// Residual alpha-mass fraction left after linear tail compensation,
  /// bounded analytically; checked against disc.alpha_norm_tol.
  double residual_tail_fraction() const { return residual_fraction_; }

  std::size_t noise_draws_per_path() const { return n_noise_; }

 private:
  std::size_t n_steps_;
  double dt_;
  Lfsm spec_;
  double noise_step_;
  std::size_t ratio_;      // dt / noise_step
  std::size_t k_left_, n_noise_;
  std::size_t fft_len_;
  double comp_scale_;      // sigma of the tail-compensation variate
  double residual_fraction_;
  stable::StableSampler noise_sampler_;
  std::vector<std::complex<double>> kernel_fft_;
  std::vector<std::complex<double>> work_, work2_;
  std::vector<double> noise_;
};

GridPath simulate_lfsm(std::size_t n_steps, double dt, const Lfsm& spec, Rng& rng);

/// Sup over all grid points of the deviation from the block anchor, with
/// the left-limit convention: a point exactly on a block boundary closes
/// the previous block. q must be an integer multiple of dt so anchors lie
/// on the grid.
DeviationStat sup_deviation(const GridPath& path, double q);

/// Exact Brownian block maximum given the endpoint increment, via the
/// bridge reflection law P{M >= m | W(q) = w} = exp(-2 m (m - w) / (C q)),
/// m >= max(w, 0), sampled by inverse transform.
double bm_block_max_exact(double w_end, double q, double var_rate, Rng& rng);

/// Exact product evaluation of
/// P{ sup_{t in [0,1]} [B(t) - B(floor(t/q) q)] <= eps }
/// = (1 - 2 P{W(q) > eps})^{floor(1/q)} * (residual-block factor),
/// negative bases clamped to 0.
double bm_exact_deviation_prob(double epsilon, double q, double var_rate);

/// Same product with the exact two-sided block law
/// P{ sup_{[0,len]} |W| <= eps } (theta-function series).
double bm_exact_deviation_prob_two_sided(double epsilon, double q, double var_rate);

/// Two-sided single-block probability P{ sup_{[0,len]} |W| <= eps }.
double bm_two_sided_block_prob(double epsilon, double len, double var_rate);

}  // namespace siq::process
