#include <doctest.h>

#include <cmath>

#include "siq/risk.hpp"
#include "test_util.hpp"

using namespace siq;
using namespace siq::risk;
using process::DeviationMode;

TEST_SUITE("risk") {

TEST_CASE("x_from_p identities") {
  calib::LimitLaw gumbel1{calib::LimitShape::kGumbel, calib::LimitKind::kAsymptoticEps, 1.0};
  calib::LimitLaw gumbel2{calib::LimitShape::kGumbel, calib::LimitKind::kAsymptoticEps, 2.0};

  CHECK(x_from_p(1.0 - std::exp(-2.0), gumbel2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(x_from_p(0.1, gumbel1) == doctest::Approx(2.25036732731).epsilon(1e-10));

  for (double p : {0.01, 0.1, 0.5, 0.9}) {
    const double x = x_from_p(p, gumbel2);
    CHECK(1.0 - std::exp(-2.0 * std::exp(-x)) == doctest::Approx(p).epsilon(1e-12));
  }

  calib::LimitLaw point{calib::LimitShape::kPointAtZero, calib::LimitKind::kAsymptoticEps, 2.0};
  CHECK_THROWS_AS(x_from_p(0.1, point), std::domain_error);
  calib::LimitLaw unstated{calib::LimitShape::kGumbel, calib::LimitKind::kAsymptoticEps,
                           std::nullopt};
  CHECK_THROWS_AS(x_from_p(0.1, unstated), std::domain_error);
  CHECK_THROWS_AS(x_from_p(0.0, gumbel1), std::domain_error);
  CHECK_THROWS_AS(x_from_p(1.0, gumbel1), std::domain_error);
}

TEST_CASE("quantile_sim certificate against the reflection oracle") {
  const process::ProcessSpec bm = process::BrownianMotion{1.0};
  mc::MCConfig cfg;
  cfg.n_paths = 20000;
  cfg.seed = 7;
  const double p = 0.05, eps = 0.1;
  const QuantileSimResult r = quantile_sim(bm, p, eps, 0.0, cfg);
  CHECK(r.query.d == eps);
  CHECK(r.p_empirical <= p + 1e-12);
  // P{sup_{[0,1]} W > u} = 2 gaussian_tail(u); certificate is near-tight.
  const double oracle = 2.0 * stable::gaussian_tail(r.query.u);
  CHECK(oracle <= 2.0 * p * 1.1);
  CHECK(oracle >= 0.2 * p);
}

TEST_CASE("quantile_sim input validation") {
  const process::ProcessSpec bm = process::BrownianMotion{1.0};
  mc::MCConfig cfg;
  cfg.n_paths = 1000;
  CHECK_THROWS_AS(quantile_sim(bm, 1.0, 0.1, 0.0, cfg), std::domain_error);
  CHECK_THROWS_AS(quantile_sim(bm, -0.1, 0.1, 0.0, cfg), std::domain_error);
  CHECK_THROWS_AS(quantile_sim(bm, 1e-4, 0.1, 0.0, cfg), std::runtime_error);
  CHECK_THROWS_AS(quantile_sim(bm, 0.05, 0.1, 1.0, cfg), std::domain_error);
}

TEST_CASE("quantile_sim u is non-increasing in p on coupled maxima") {
  const process::ProcessSpec bm = process::BrownianMotion{1.0};
  mc::MCConfig cfg;
  cfg.n_paths = 5000;
  cfg.seed = 11;
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {0.02, 0.05, 0.1, 0.2}) {
    const double u = quantile_sim(bm, p, 0.1, 0.0, cfg).query.u;
    CHECK(u <= prev);
    prev = u;
  }
}

TEST_CASE("quantile_sim round trip through x_from_p is bit-identical") {
  const process::ProcessSpec lf = process::Lfsm{};
  const calib::LimitLaw law = calib::limit_law(lf, DeviationMode::kOneSided);
  mc::MCConfig cfg;
  cfg.n_paths = 500;
  cfg.seed = 3;
  const double p = 0.1;
  const double x = x_from_p(p, law);
  const QuantileSimResult a = quantile_sim(lf, p, 0.2, x, cfg);
  const QuantileSimResult b = quantile_sim(lf, p, 0.2, x, cfg);
  CHECK(a.query.u == b.query.u);
  CHECK(a.query.d == b.query.d);
  CHECK(a.p_empirical == b.p_empirical);
}

TEST_CASE("quantile_stationary matches the exponential closed form") {
  const StationaryTailModel model = StationaryTailModel::exponential();
  const calib::LimitLaw law{calib::LimitShape::kGumbel,
                            calib::LimitKind::kAsymptoticEps, 1.0};
  calib::SamplingScales scales = calib::calib_stable_skewed(0.05, 1.5);
  const double p = 0.02;
  const StationaryResult r = quantile_stationary(model, p, 0.05, scales, law);
  const double x = x_from_p(p, law);
  const double d = 0.05 + x * scales.w;
  const double u_closed = d + std::log((1.0 / scales.q + 1.0) / p);
  CHECK(testutil::close_rel(r.u, u_closed, 1e-9));
  CHECK(r.y == doctest::Approx(d).epsilon(1e-12));
  CHECK(std::fabs(r.residual) <= 1e-9 * p);
  CHECK(model.h_bar(0.0) == 1.0);
  CHECK_THROWS_AS(quantile_stationary(model, 1.0, 0.05, scales, law), std::domain_error);
}

TEST_CASE("quantile_stationary tabulated model reproduces the closed form") {
  // e^{-u} sampled on a grid: log-linear interpolation is exact here.
  std::vector<std::pair<double, double>> pts;
  for (double u = -5.0; u <= 40.0; u += 0.5) pts.emplace_back(u, std::exp(-u));
  const StationaryTailModel model = StationaryTailModel::from_table(std::move(pts));
  const calib::LimitLaw law{calib::LimitShape::kGumbel,
                            calib::LimitKind::kAsymptoticEps, 1.0};
  calib::SamplingScales scales = calib::calib_stable_skewed(0.05, 1.5);
  const double p = 0.05;
  const StationaryResult r = quantile_stationary(model, p, 0.05, scales, law);
  const double d = 0.05 + x_from_p(p, law) * scales.w;
  CHECK(testutil::close_rel(r.u, d + std::log((1.0 / scales.q + 1.0) / p), 1e-9));
}

TEST_CASE("quantile_stationary flags -y outside J") {
  StationaryTailModel model = StationaryTailModel::exponential();
  model.j_lo = -0.5;  // forces -y < j_lo for any sizable allowance
  model.j_hi = 0.5;
  const calib::LimitLaw law{calib::LimitShape::kGumbel,
                            calib::LimitKind::kAsymptoticEps, 1.0};
  calib::SamplingScales scales = calib::calib_stable_skewed(0.05, 1.5);
  CHECK_THROWS_AS(quantile_stationary(model, 0.02, 2.0, scales, law), std::domain_error);
}

TEST_CASE("tabulated model validation") {
  CHECK_THROWS_AS(StationaryTailModel::from_table({{0.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(StationaryTailModel::from_table({{0.0, 0.5}, {1.0, 0.6}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(StationaryTailModel::from_table({{0.0, 0.5}, {1.0, -0.1}}),
                  std::invalid_argument);
}

}  // TEST_SUITE
