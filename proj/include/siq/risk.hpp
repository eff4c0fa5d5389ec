#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "siq/calibrate.hpp"
#include "siq/mc.hpp"

namespace siq::risk {

/// Root search for the stationary quantile failed; carries diagnostics.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deviation-quantile coordinate from the exceedance budget,
/// x = -ln(-ln(1-p)/kappa). Requires a Gumbel law with stated kappa.
double x_from_p(double p, const calib::LimitLaw& law);

struct RiskQuery {
  double p = 0.0;        ///< target exceedance budget, in (0, 1)
  double epsilon = 0.0;  ///< deviation tolerance
  double x = 0.0;        ///< deviation quantile coordinate
  double d = 0.0;        ///< total deviation allowance eps + x w(eps)
  double u = 0.0;        ///< resulting level
};

struct QuantileSimResult {
  RiskQuery query;
  double p_empirical = 0.0;  ///< empirical P{M > u - d}; at most p by construction
  mc::Interval coverage_ci;  ///< Wilson interval of the empirical coverage
  std::size_t n = 0;
};

/// Example-1 workflow: simulate the grid maximum M = max_k xi(k q) over
/// one unit of time, set u = (empirical (1-p)-quantile of M) + d with
/// d = eps + x w(eps). Certificate: P{sup xi > u} <= 2p modulo MC and
/// finite-eps error, both reported.
QuantileSimResult quantile_sim(const process::ProcessSpec& spec, double p,
                               double epsilon, double x, const mc::MCConfig& cfg);

/// Tail model of a stationary process in a domain of attraction:
/// marginal_tail strictly decreasing to 0, w_tilde > 0, h_bar the limit
/// shape with h_bar(0) = 1 on the open interval (j_lo, j_hi) around 0.
struct StationaryTailModel {
  std::function<double(double)> marginal_tail;
  std::function<double(double)> w_tilde;
  std::function<double(double)> h_bar;
  double j_lo = -std::numeric_limits<double>::infinity();
  double j_hi = std::numeric_limits<double>::infinity();

  /// marginal_tail = e^{-u}, w_tilde = 1, h_bar = e^{-y}.
  static StationaryTailModel exponential();

  /// Tabulated strictly decreasing (u, tail) pairs; log-linear
  /// interpolation in u, end slopes extended beyond the table.
  /// w_tilde = 1 and h_bar = e^{-y}.
  static StationaryTailModel from_table(std::vector<std::pair<double, double>> pts);
};

struct StationaryResult {
  double u = 0.0;
  double y = 0.0;
  double residual = 0.0;  ///< value of the second equation at the root
};

/// Example-2 workflow: solve
///   y w_tilde(u) = eps + x w(eps)  and  (1/q + 1) h_bar(-y) tail(u) = p
/// by outer bisection on u (bracket grown geometrically), x taken from
/// x_from_p(p, law). Errors when -y falls outside J.
StationaryResult quantile_stationary(const StationaryTailModel& model, double p,
                                     double epsilon,
                                     const calib::SamplingScales& scales,
                                     const calib::LimitLaw& law);

}  // namespace siq::risk
