#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "siq/mc.hpp"
#include "test_util.hpp"

using namespace siq;
using namespace siq::mc;
using process::DeviationMode;

namespace {
const process::ProcessSpec kBm = process::BrownianMotion{1.0};
const process::ProcessSpec kSkewedStable =
    process::StableLevy{stable::StableParams{1.5, -1.0, 1.0}};
}  // namespace

TEST_SUITE("mc") {

TEST_CASE("normal_quantile inverts the tail") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.95996398454).epsilon(1e-10));
  for (double p : {1e-6, 0.01, 0.3, 0.8, 0.999}) {
    const double z = normal_quantile(p);
    CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
}

TEST_CASE("wilson_ci boundaries and golden value") {
  CHECK(wilson_ci(0, 100, 0.95).lo == 0.0);
  CHECK(wilson_ci(100, 100, 0.95).hi == 1.0);
  const Interval w = wilson_ci(50, 100, 0.95);
  CHECK(w.lo == doctest::Approx(0.403831530366).epsilon(1e-9));
  CHECK(w.hi == doctest::Approx(0.596168469634).epsilon(1e-9));
  CHECK_THROWS_AS(wilson_ci(5, 4, 0.95), std::domain_error);
}

TEST_CASE("estimate p_hat = 1 above any simulated deviation") {
  MCConfig cfg;
  cfg.n_paths = 200;
  cfg.seed = 1;
  const MCEstimate e =
      estimate_deviation_prob(kSkewedStable, 0.1, 50.0, DeviationMode::kOneSided, cfg);
  CHECK(e.p_hat == 1.0);
  CHECK(e.k == e.n);
}

TEST_CASE("determinism across repeat runs and thread counts") {
  MCConfig cfg;
  cfg.n_paths = 400;
  cfg.refine_m = 8;
  cfg.seed = 99;
  cfg.threads = 1;
  const MCEstimate a =
      estimate_deviation_prob(kSkewedStable, 0.05, 0.0, DeviationMode::kOneSided, cfg);
  cfg.threads = 2;
  const MCEstimate b =
      estimate_deviation_prob(kSkewedStable, 0.05, 0.0, DeviationMode::kOneSided, cfg);
  cfg.threads = 7;
  const MCEstimate c =
      estimate_deviation_prob(kSkewedStable, 0.05, 0.0, DeviationMode::kOneSided, cfg);
  CHECK(a.k == b.k);
  CHECK(a.k == c.k);
  CHECK(a.p_hat == b.p_hat);
  const MCEstimate a2 =
      estimate_deviation_prob(kSkewedStable, 0.05, 0.0, DeviationMode::kOneSided, cfg);
  CHECK(a2.k == a.k);
  CHECK(a2.p_hat == a.p_hat);
}

TEST_CASE("Brownian one-sided estimate hits the exact product oracle") {
  MCConfig cfg;
  cfg.n_paths = 5000;
  cfg.seed = 2024;
  cfg.ci_level = 0.99;
  const MCEstimate e =
      estimate_deviation_prob(kBm, 0.05, 0.0, DeviationMode::kOneSided, cfg);
  CHECK(e.bias_note == BiasNote::kExactBlockMax);
  const double exact = 0.361750094851;  // bm_exact_deviation_prob at q_bm(0.05,1,1)
  CHECK(e.ci_lo <= exact);
  CHECK(exact <= e.ci_hi);
  CHECK_THROWS_AS(
      estimate_deviation_prob(kBm, 0.05, 1.0, DeviationMode::kOneSided, cfg),
      std::domain_error);
}

TEST_CASE("xgrid run shares one ensemble and is monotone in x") {
  MCConfig cfg;
  cfg.n_paths = 2000;
  cfg.seed = 5;
  const std::array<double, 4> xs{-1.0, 0.0, 1.0, 2.0};
  const auto ests = estimate_deviation_prob_xgrid(kSkewedStable, 0.05, xs,
                                                  DeviationMode::kOneSided, cfg);
  REQUIRE(ests.size() == 4);
  for (std::size_t i = 1; i < ests.size(); ++i)
    CHECK(ests[i].p_hat >= ests[i - 1].p_hat);
  const MCEstimate single =
      estimate_deviation_prob(kSkewedStable, 0.05, 1.0, DeviationMode::kOneSided, cfg);
  CHECK(single.k == ests[2].k);
}

TEST_CASE("path cap produces a resource error") {
  MCConfig cfg;
  cfg.n_paths = 10;
  cfg.path_point_cap = 1 << 10;
  CHECK_THROWS_AS(
      estimate_deviation_prob(kSkewedStable, 1e-3, 0.0, DeviationMode::kOneSided, cfg),
      ResourceError);
}

TEST_CASE("block_product_estimator trivial cases") {
  MCConfig cfg;
  cfg.n_paths = 500;
  cfg.refine_m = 16;
  cfg.seed = 31;
  // floor(1/q) = 1, residual 0: equals the single-block estimate.
  const MCEstimate whole =
      block_product_estimator(kSkewedStable, 0.8, 1.0, DeviationMode::kOneSided, cfg);
  const MCEstimate direct = estimate_deviation_prob_at_q(
      kSkewedStable, 0.8, 1.0, DeviationMode::kOneSided, cfg);
  CHECK(whole.p_hat == doctest::Approx(static_cast<double>(whole.k) / whole.n));
  CHECK(whole.k == direct.k);
  // Certain single-block event: product is exactly 1.
  const MCEstimate one =
      block_product_estimator(kSkewedStable, 1e9, 0.25, DeviationMode::kOneSided, cfg);
  CHECK(one.p_hat == 1.0);
  CHECK_THROWS_AS(block_product_estimator(process::Lfsm{}, 0.1, 0.25,
                                          DeviationMode::kOneSided, cfg),
                  std::invalid_argument);
}

TEST_CASE("block product and direct estimator agree (99% intervals overlap)") {
  MCConfig cfg;
  cfg.n_paths = 3000;
  cfg.refine_m = 32;
  cfg.seed = 8;
  cfg.ci_level = 0.99;
  const process::ProcessSpec sym =
      process::StableLevy{stable::StableParams{1.2, 0.0, 1.0}};
  const double eps = 1.0, q = 1.0 / 64.0;
  const MCEstimate direct =
      estimate_deviation_prob_at_q(sym, eps, q, DeviationMode::kOneSided, cfg);
  const MCEstimate product =
      block_product_estimator(sym, eps, q, DeviationMode::kOneSided, cfg);
  CHECK(direct.ci_lo <= product.ci_hi);
  CHECK(product.ci_lo <= direct.ci_hi);
}

TEST_CASE("refinement_study coupled Brownian run is monotone") {
  MCConfig cfg;
  cfg.n_paths = 1000;
  cfg.seed = 13;
  const std::array<std::size_t, 3> schedule{8, 16, 32};
  const auto rows =
      refinement_study(kBm, 0.1, 0.0, DeviationMode::kOneSided, schedule, cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.coupled);
  CHECK(rows[1].est.p_hat <= rows[0].est.p_hat);
  CHECK(rows[2].est.p_hat <= rows[1].est.p_hat);

  const std::array<std::size_t, 2> bad{12, 24};
  CHECK_THROWS_AS(
      refinement_study(kBm, 0.1, 0.0, DeviationMode::kOneSided, bad, cfg),
      std::invalid_argument);
}

TEST_CASE("doubling protocol reports a converged m") {
  // The grid bias drifts like 1/sqrt(m); the protocol terminates once the
  // per-doubling drift falls below half the Wilson width at this n.
  MCConfig cfg;
  cfg.n_paths = 200;
  cfg.seed = 13;
  const std::array<std::size_t, 6> schedule{8, 16, 32, 64, 128, 256};
  const auto rows =
      refinement_study(kBm, 0.1, 0.0, DeviationMode::kOneSided, schedule, cfg);
  CHECK(converged_m(rows) > 0);

  // Selector semantics on synthetic rows.
  std::vector<RefinementRow> synth(3);
  synth[0] = {8, MCEstimate{0.50, 50, 100, 0.40, 0.60, BiasNote::kGridUnderstated}, true};
  synth[1] = {16, MCEstimate{0.30, 30, 100, 0.21, 0.39, BiasNote::kGridUnderstated}, true};
  synth[2] = {32, MCEstimate{0.28, 28, 100, 0.19, 0.37, BiasNote::kGridUnderstated}, true};
  CHECK(converged_m(synth) == 32);
  synth[2].est.p_hat = 0.10;
  CHECK(converged_m(synth) == 0);
}

TEST_CASE("refinement_study single entry equals the plain estimator") {
  MCConfig cfg;
  cfg.n_paths = 800;
  cfg.refine_m = 16;
  cfg.seed = 17;
  const std::array<std::size_t, 1> schedule{16};
  const auto rows = refinement_study(kSkewedStable, 0.05, 0.0,
                                     DeviationMode::kOneSided, schedule, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(!rows[0].coupled);
  const MCEstimate direct =
      estimate_deviation_prob(kSkewedStable, 0.05, 0.0, DeviationMode::kOneSided, cfg);
  CHECK(rows[0].est.k == direct.k);
  CHECK(rows[0].est.p_hat == direct.p_hat);
}

TEST_CASE("convergence_to_limit shapes") {
  MCConfig cfg;
  cfg.n_paths = 300;
  cfg.refine_m = 8;
  cfg.seed = 23;
  CHECK(convergence_to_limit(kBm, {}, 0.0, DeviationMode::kOneSided, cfg).empty());

  const std::array<double, 2> schedule{0.3, 0.2};
  const auto rows = convergence_to_limit(process::Lfsm{}, schedule, 0.0,
                                         DeviationMode::kOneSided, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows)
    CHECK(r.p_limit == doctest::Approx(0.367879441171).epsilon(1e-10));
  CHECK(rows[0].gap == doctest::Approx(rows[0].est.p_hat - rows[0].p_limit));
}

TEST_CASE("Brownian convergence rows track the exact product values") {
  // The tabulated p_limit is e^-2 (the published arrow); the estimates
  // themselves must match the exact product evaluation at each eps.
  MCConfig cfg;
  cfg.n_paths = 4000;
  cfg.seed = 29;
  cfg.ci_level = 0.99;
  const std::array<double, 2> schedule{0.2, 0.1};
  const auto rows =
      convergence_to_limit(kBm, schedule, 0.0, DeviationMode::kOneSided, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.p_limit == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    const double exact = process::bm_exact_deviation_prob(
        r.epsilon, calib::q_bm(r.epsilon, 1.0, 1), 1.0);
    CHECK(r.est.ci_lo <= exact);
    CHECK(exact <= r.est.ci_hi);
    CHECK(r.gap == doctest::Approx(r.est.p_hat - r.p_limit));
  }
}

TEST_CASE("fit_kappa_gumbel recovers exact synthetic slopes") {
  for (double kappa : {2.0, 1.0}) {
    std::vector<std::pair<double, MCEstimate>> pts;
    for (double x : {-1.0, 0.0, 1.0, 2.0}) {
      MCEstimate e;
      e.p_hat = std::exp(-kappa * std::exp(-x));
      e.n = 1000000;
      e.k = static_cast<std::size_t>(e.p_hat * 1e6);
      pts.emplace_back(x, e);
    }
    const KappaFit fit = fit_kappa_gumbel(pts);
    CHECK(fit.kappa == doctest::Approx(kappa).epsilon(1e-12));
    CHECK(fit.n_used == 4);
    for (double r : fit.residuals) CHECK(std::fabs(r) < 1e-12);
  }
}

TEST_CASE("fit_kappa_gumbel excludes degenerate points and needs three") {
  std::vector<std::pair<double, MCEstimate>> pts;
  MCEstimate zero;
  zero.p_hat = 0.0;
  zero.n = 100;
  pts.emplace_back(-1.0, zero);
  MCEstimate one;
  one.p_hat = 1.0;
  one.n = 100;
  pts.emplace_back(3.0, one);
  MCEstimate mid;
  mid.p_hat = 0.5;
  mid.n = 100;
  pts.emplace_back(0.0, mid);
  pts.emplace_back(1.0, mid);
  CHECK_THROWS_AS(fit_kappa_gumbel(pts), std::runtime_error);
}

TEST_CASE("fit_kappa_gumbel interval covers a known kappa under binomial noise") {
  // 200 repetitions, kappa = 1.5, binomial n = 1e4 per point; the 99%
  // interval should cover in at least 95% of repetitions.
  const double kappa = 1.5;
  const std::size_t n = 10000;
  Rng rng = Rng::substream(314, 0);
  int covered = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::pair<double, MCEstimate>> pts;
    for (double x : {-1.0, 0.0, 1.0, 2.0}) {
      const double p = std::exp(-kappa * std::exp(-x));
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) k += (rng.uniform() < p);
      MCEstimate e;
      e.n = n;
      e.k = k;
      e.p_hat = static_cast<double>(k) / static_cast<double>(n);
      pts.emplace_back(x, e);
    }
    const KappaFit fit = fit_kappa_gumbel(pts, 0.99);
    covered += (fit.ci_lo <= kappa && kappa <= fit.ci_hi);
  }
  CHECK(covered >= 190);
}

TEST_CASE("inequality check: trivial at huge u, pilot at u = 2") {
  MCConfig cfg;
  cfg.n_paths = 100000;
  cfg.seed = 99;
  const auto trivial = check_sup_tail_inequality(1.5, -1.0, 1.0, 50.0, cfg, 64);
  CHECK(trivial.left == 0.0);
  CHECK(trivial.holds);

  const auto rep = check_sup_tail_inequality(1.5, -1.0, 1.0, 2.0, cfg, 256);
  CHECK(rep.holds);
  CHECK(rep.margin >= 0.0);
  CHECK(rep.left_coarse <= rep.left);
  CHECK(rep.right > rep.left - 3.0 * rep.left_se);
  CHECK_THROWS_AS(check_sup_tail_inequality(1.5, -1.0, -1.0, 2.0, cfg), std::domain_error);
}

}  // TEST_SUITE
