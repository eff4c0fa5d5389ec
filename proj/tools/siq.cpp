// siq: sampling-interval calibration and verification for
// stationary-increment processes (Brownian motion, totally skewed stable
// Levy motion, linear fractional stable motion).
//
// Subcommands: calibrate, verify, probe, quantile {sim, stationary}.
// Exit codes: 0 success, 1 usage/validation, 2 numerical/calibration/
// resource failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siq/calibrate.hpp"
#include "siq/mc.hpp"
#include "siq/process.hpp"
#include "siq/results_io.hpp"
#include "siq/risk.hpp"
#include "siq/version.hpp"

namespace fs = std::filesystem;
using siq::process::DeviationMode;

namespace {

struct ProcessFlags {
  std::string process;
  double var_rate = 1.0;
  double alpha = 1.5;
  double beta = -1.0;
  double sigma = 1.0;
  double hurst = 0.8;
  double noise_scale = 1.0;
  double trunc_right = 8.0;

  void attach(CLI::App* cmd, bool lfsm_and_stable_only = false) {
    auto* p = cmd->add_option("--process", process, "process: bm | stable | lfsm")
                  ->required();
    if (lfsm_and_stable_only)
      p->check(CLI::IsMember({"stable", "lfsm"}));
    else
      p->check(CLI::IsMember({"bm", "stable", "lfsm"}));
    cmd->add_option("--var", var_rate, "variance rate of Brownian motion")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", alpha, "stability index");
    cmd->add_option("--beta", beta, "skewness (stable process)");
    cmd->add_option("--sigma", sigma, "scale of the stable law")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--hurst", hurst, "Hurst index (lfsm)");
    cmd->add_option("--noise-scale", noise_scale, "driving-noise scale (lfsm)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--trunc-right", trunc_right, "lfsm kernel truncation point")
        ->check(CLI::PositiveNumber);
  }

  siq::process::ProcessSpec spec() const {
    if (process == "bm") return siq::process::BrownianMotion{var_rate};
    if (process == "stable")
      return siq::process::StableLevy{siq::stable::StableParams{alpha, beta, sigma}};
    siq::process::Lfsm lf;
    lf.alpha = alpha;
    lf.hurst = hurst;
    lf.noise_scale = noise_scale;
    lf.disc.trunc_right = trunc_right;
    return lf;
  }
};

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

DeviationMode parse_mode(const std::string& mode) {
  return mode == "two" ? DeviationMode::kTwoSided : DeviationMode::kOneSided;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
}

/// Refuses to overwrite existing outputs unless --force was given.
void check_overwrite(const fs::path& dir, const std::vector<std::string>& names,
                     bool force) {
  if (force) return;
  for (const auto& n : names)
    if (fs::exists(dir / n))
      throw CLI::ValidationError("output", (dir / n).string() +
                                               " exists; pass --force to overwrite");
}

// ---------------------------------------------------------------- calibrate

int run_calibrate(const ProcessFlags& pf, double epsilon, int sided) {
  if (pf.process == "bm") {
    const double q = siq::calib::q_bm(epsilon, pf.var_rate, sided);
    std::cout << "process = bm\n"
              << "epsilon = " << fmt6(epsilon) << "\n"
              << "q = " << fmt6(q) << "\n"
              << "admissible_epsilon = "
              << fmt6(siq::calib::q_bm_admissible_epsilon(pf.var_rate, sided)) << "\n";
    return 0;
  }
  siq::calib::SamplingScales s;
  double threshold = 0.0;
  if (pf.process == "stable") {
    s = siq::calib::calibrate(pf.spec(), epsilon, DeviationMode::kOneSided);
    threshold = pf.sigma * siq::calib::stable_admissible_epsilon(pf.alpha);
  } else {
    const double s1 =
        pf.noise_scale * siq::process::lfsm_scale_sigma1(pf.hurst, pf.alpha);
    s = siq::calib::calib_lfsm(epsilon, pf.alpha, pf.hurst, s1);
    threshold = siq::calib::lfsm_admissible_epsilon(pf.alpha, pf.hurst, s1);
  }
  std::cout << "process = " << pf.process << "\n"
            << "epsilon = " << fmt6(epsilon) << "\n"
            << "q = " << fmt6(s.q) << "\n"
            << "w = " << fmt6(s.w) << "\n"
            << "q_tilde = " << fmt6(s.q_tilde) << "\n"
            << "admissible_epsilon = " << fmt6(threshold) << "\n";
  return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
  ProcessFlags pf;
  std::vector<double> epsilons;
  double fixed_epsilon = 0.0;
  std::vector<double> qs;
  std::vector<double> xs{0.0};
  std::string mode = "one";
  std::uint64_t n_paths = 10000;
  std::uint64_t refine_m = 64;
  double ci_level = 0.95;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out;
  bool force = false;
};

int run_verify(const VerifyArgs& a) {
  const DeviationMode mode = parse_mode(a.mode);
  const std::uint64_t master_seed = resolve_seed(a.seed);
  siq::mc::MCConfig cfg;
  cfg.n_paths = a.n_paths;
  cfg.refine_m = a.refine_m;
  cfg.seed = master_seed;
  cfg.ci_level = a.ci_level;
  cfg.threads = a.threads;

  const siq::process::ProcessSpec spec = a.pf.spec();
  const bool fixed_q_mode = !a.qs.empty();
  if (!fixed_q_mode && a.epsilons.empty())
    throw CLI::ValidationError("verify", "need --epsilons or (--epsilon and --qs)");

  std::vector<siq::io::VerifyRow> rows;
  const auto base_row = [&](double eps, double x, double q,
                            std::optional<double> w) {
    siq::io::VerifyRow r;
    r.process = a.pf.process;
    if (a.pf.process != "bm") r.alpha = a.pf.alpha;
    if (a.pf.process == "stable") r.beta = a.pf.beta;
    if (a.pf.process == "lfsm") {
      r.beta = -1.0;
      r.hurst = a.pf.hurst;
    }
    r.epsilon = eps;
    r.x = x;
    r.q = q;
    r.w = w;
    r.mode = a.mode;
    r.n_paths = a.n_paths;
    r.refine_m = a.refine_m;
    r.seed = master_seed;
    return r;
  };

  if (fixed_q_mode) {
    for (double q : a.qs) {
      const auto est =
          siq::mc::estimate_deviation_prob_at_q(spec, a.fixed_epsilon, q, mode, cfg);
      siq::io::VerifyRow r = base_row(a.fixed_epsilon, 0.0, q, std::nullopt);
      r.k = est.k;
      r.p_hat = est.p_hat;
      r.ci_lo = est.ci_lo;
      r.ci_hi = est.ci_hi;
      r.bias_note = siq::mc::to_string(est.bias_note);
      if (a.pf.process == "stable") {
        r.p_limit =
            siq::calib::fixed_eps_levy_limit(a.pf.alpha, a.pf.beta, a.fixed_epsilon, mode);
        r.gap = r.p_hat - *r.p_limit;
      }
      rows.push_back(std::move(r));
    }
  } else {
    // Resolve the limit law first: degenerate process/mode combinations
    // are rejected before any simulation runs.
    const siq::calib::LimitLaw law = siq::calib::limit_law(spec, mode);
    for (double eps : a.epsilons) {
      const siq::calib::SamplingScales scales = siq::calib::calibrate(spec, eps, mode);
      const auto ests = siq::mc::estimate_deviation_prob_xgrid(spec, eps, a.xs, mode, cfg);
      for (std::size_t i = 0; i < a.xs.size(); ++i) {
        siq::io::VerifyRow r = base_row(
            eps, a.xs[i], scales.q,
            a.pf.process == "bm" ? std::nullopt : std::optional<double>(scales.w));
        r.k = ests[i].k;
        r.p_hat = ests[i].p_hat;
        r.ci_lo = ests[i].ci_lo;
        r.ci_hi = ests[i].ci_hi;
        r.bias_note = siq::mc::to_string(ests[i].bias_note);
        const double pl = law.prob_at(a.xs[i]);
        if (!std::isnan(pl)) {
          r.p_limit = pl;
          r.gap = r.p_hat - pl;
        }
        rows.push_back(std::move(r));
      }
    }
  }

  const fs::path out_dir(a.out);
  fs::create_directories(out_dir);
  check_overwrite(out_dir, {"verify.csv", "manifest.json"}, a.force);

  std::ostringstream csv;
  siq::io::write_verify_csv(csv, rows);
  write_text_file(out_dir / "verify.csv", csv.str());

  std::map<std::string, std::string> config;
  config["process"] = a.pf.process;
  config["mode"] = a.mode;
  config["n_paths"] = std::to_string(a.n_paths);
  config["refine_m"] = std::to_string(a.refine_m);
  config["ci_level"] = siq::io::format_double(a.ci_level);
  config["threads"] = std::to_string(a.threads);
  if (a.pf.process != "bm") config["alpha"] = siq::io::format_double(a.pf.alpha);
  if (a.pf.process == "bm") config["var"] = siq::io::format_double(a.pf.var_rate);
  if (a.pf.process == "stable") {
    config["beta"] = siq::io::format_double(a.pf.beta);
    config["sigma"] = siq::io::format_double(a.pf.sigma);
  }
  if (a.pf.process == "lfsm") {
    config["hurst"] = siq::io::format_double(a.pf.hurst);
    config["noise_scale"] = siq::io::format_double(a.pf.noise_scale);
  }
  std::string sched;
  if (fixed_q_mode) {
    config["epsilon"] = siq::io::format_double(a.fixed_epsilon);
    for (double q : a.qs) sched += (sched.empty() ? "" : ";") + siq::io::format_double(q);
    config["qs"] = sched;
  } else {
    for (double e : a.epsilons)
      sched += (sched.empty() ? "" : ";") + siq::io::format_double(e);
    config["epsilons"] = sched;
  }
  std::string xs;
  for (double x : a.xs) xs += (xs.empty() ? "" : ";") + siq::io::format_double(x);
  config["xs"] = xs;

  write_text_file(out_dir / "manifest.json",
                  siq::io::render_manifest("verify", config, master_seed,
                                           {{"verify.csv", rows.size()}}));
  std::cout << "wrote " << (out_dir / "verify.csv").string() << " (" << rows.size()
            << " rows)\n";
  return 0;
}

// -------------------------------------------------------------------- probe

struct ProbeArgs {
  ProcessFlags pf;
  std::vector<double> epsilons;
  std::vector<double> xs{0.0};
  std::vector<double> rs{0.0};
  std::string out;
  bool force = false;
};

int run_probe(const ProbeArgs& a) {
  const siq::process::ProcessSpec spec = a.pf.spec();
  std::vector<siq::io::ProbeRow> rows;
  for (double eps : a.epsilons)
    for (double x : a.xs)
      for (double rr : a.rs) {
        const auto ratios = siq::calib::probe_condition_ratios(spec, eps, x, rr);
        siq::io::ProbeRow row;
        row.process = a.pf.process;
        row.epsilon = eps;
        row.x = x;
        row.r = rr;
        row.ratio31 = ratios.ratio31;
        row.ratio32 = ratios.ratio32;
        row.ratio33 = ratios.ratio33;
        row.target31 = 1.0;
        row.target32 = std::exp(-x);
        row.target33 = std::exp(-x - rr);
        rows.push_back(std::move(row));
      }

  const fs::path out_dir(a.out);
  fs::create_directories(out_dir);
  check_overwrite(out_dir, {"probe.csv", "manifest.json"}, a.force);
  std::ostringstream csv;
  siq::io::write_probe_csv(csv, rows);
  write_text_file(out_dir / "probe.csv", csv.str());

  std::map<std::string, std::string> config;
  config["process"] = a.pf.process;
  config["alpha"] = siq::io::format_double(a.pf.alpha);
  if (a.pf.process == "lfsm") config["hurst"] = siq::io::format_double(a.pf.hurst);
  std::string sched;
  for (double e : a.epsilons)
    sched += (sched.empty() ? "" : ";") + siq::io::format_double(e);
  config["epsilons"] = sched;
  write_text_file(out_dir / "manifest.json",
                  siq::io::render_manifest("probe", config, 0,
                                           {{"probe.csv", rows.size()}}));
  std::cout << "wrote " << (out_dir / "probe.csv").string() << " (" << rows.size()
            << " rows)\n";
  return 0;
}

// ----------------------------------------------------------------- quantile

int run_quantile_sim(const ProcessFlags& pf, double p, double epsilon, double x,
                     std::uint64_t n_paths, const std::optional<std::uint64_t>& seed,
                     unsigned threads) {
  siq::mc::MCConfig cfg;
  cfg.n_paths = n_paths;
  cfg.seed = resolve_seed(seed);
  cfg.threads = threads;
  const auto res = siq::risk::quantile_sim(pf.spec(), p, epsilon, x, cfg);
  std::cout << "u = " << siq::io::format_double(res.query.u) << "\n"
            << "d = " << siq::io::format_double(res.query.d) << "\n"
            << "p = " << siq::io::format_double(p) << "\n"
            << "x = " << siq::io::format_double(x) << "\n"
            << "seed = " << cfg.seed << "\n"
            << "certificate: P{sup > u} <= 2p = " << siq::io::format_double(2.0 * p)
            << " (modulo MC and finite-epsilon error)\n"
            << "empirical P{M > u - d} = " << siq::io::format_double(res.p_empirical)
            << " wilson = [" << siq::io::format_double(res.coverage_ci.lo) << ", "
            << siq::io::format_double(res.coverage_ci.hi) << "]\n";
  return 0;
}

std::vector<std::pair<double, double>> read_tail_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("table", "cannot open " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string cleaned;
    for (char c : line) cleaned.push_back(c == ',' ? ' ' : c);
    std::istringstream ls(cleaned);
    double u, tail;
    if (ls >> u >> tail) pts.emplace_back(u, tail);
  }
  if (pts.size() < 2)
    throw CLI::ValidationError("table", "need at least two (u, tail) rows");
  return pts;
}

int run_quantile_stationary(const std::string& table, double p, double epsilon,
                            double q, double w, double kappa) {
  siq::risk::StationaryTailModel model =
      siq::risk::StationaryTailModel::from_table(read_tail_table(table));
  siq::calib::SamplingScales scales;
  scales.epsilon = epsilon;
  scales.q = q;
  scales.w = w;
  const siq::calib::LimitLaw law{siq::calib::LimitShape::kGumbel,
                                 siq::calib::LimitKind::kAsymptoticEps, kappa};
  const auto res = siq::risk::quantile_stationary(model, p, epsilon, scales, law);
  const double x = siq::risk::x_from_p(p, law);
  std::cout << "u = " << siq::io::format_double(res.u) << "\n"
            << "y = " << siq::io::format_double(res.y) << "\n"
            << "d = " << siq::io::format_double(epsilon + x * w) << "\n"
            << "p = " << siq::io::format_double(p) << "\n"
            << "residual = " << siq::io::format_double(res.residual) << "\n"
            << "certificate: P{sup > u} <= 2p = " << siq::io::format_double(2.0 * p)
            << " (modulo limit accuracy)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sampling-interval calibration and verification for "
               "stationary-increment processes"};
  app.set_version_flag("--version", siq::kVersion);
  app.set_config("--config", "", "config file ([subcommand] sections, key=value lines)");
  app.require_subcommand(1);

  const auto in_unit_interval =
      CLI::Validator(
          [](std::string& s) -> std::string {
            const double v = std::strtod(s.c_str(), nullptr);
            if (!(v > 0.0) || !(v < 1.0)) return "value must lie strictly in (0, 1)";
            return {};
          },
          "IN_(0,1)");

  // calibrate
  ProcessFlags cal_pf;
  double cal_eps = 0.0;
  int cal_sided = 1;
  auto* cal = app.add_subcommand("calibrate", "print q(eps), w(eps) and the scales");
  cal->configurable();
  cal_pf.attach(cal);
  cal->add_option("--epsilon", cal_eps, "deviation tolerance")->required()
      ->check(CLI::PositiveNumber);
  cal->add_option("--sided", cal_sided, "1 (one-sided) or 2 (two-sided), bm only")
      ->check(CLI::IsMember({1, 2}));

  // verify
  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Monte Carlo deviation-probability runs");
  ver->configurable();
  va.pf.attach(ver);
  ver->add_option("--epsilons", va.epsilons, "epsilon schedule (calibrated mode)");
  ver->add_option("--epsilon", va.fixed_epsilon, "fixed epsilon (with --qs)");
  ver->add_option("--qs", va.qs, "explicit q schedule (fixed-epsilon mode)");
  ver->add_option("--xs", va.xs, "x grid for the threshold eps + x w(eps)");
  ver->add_option("--mode", va.mode, "one | two")->check(CLI::IsMember({"one", "two"}));
  ver->add_option("--n-paths", va.n_paths, "replicates")->check(CLI::PositiveNumber);
  ver->add_option("--refine-m", va.refine_m, "grid points per sampling block");
  ver->add_option("--ci-level", va.ci_level, "confidence level")->check(in_unit_interval);
  std::optional<std::uint64_t> ver_seed;
  ver->add_option("--seed", ver_seed, "master seed (entropy if omitted)");
  ver->add_option("--threads", va.threads, "worker cap (does not affect results)");
  ver->add_option("--out", va.out, "output directory")->required();
  ver->add_flag("--force", va.force, "overwrite existing outputs");

  // probe
  ProbeArgs pa;
  auto* prb = app.add_subcommand("probe", "deterministic condition-ratio probes");
  prb->configurable();
  pa.pf.attach(prb, /*lfsm_and_stable_only=*/true);
  prb->add_option("--epsilons", pa.epsilons, "epsilon schedule");
  prb->add_option("--xs", pa.xs, "x grid");
  prb->add_option("--rs", pa.rs, "r grid");
  prb->add_option("--out", pa.out, "output directory")->required();
  prb->add_flag("--force", pa.force, "overwrite existing outputs");

  // quantile
  auto* qnt = app.add_subcommand("quantile", "quantile certification workflows");
  qnt->configurable();
  qnt->require_subcommand(1);

  ProcessFlags qs_pf;
  double qs_p = 0.0, qs_eps = 0.0, qs_x = 0.0;
  std::uint64_t qs_n = 100000;
  std::optional<std::uint64_t> qs_seed;
  unsigned qs_threads = 0;
  auto* qsim = qnt->add_subcommand("sim", "simulation-based quantile certificate");
  qsim->configurable();
  qs_pf.attach(qsim);
  qsim->add_option("--p", qs_p, "exceedance budget")->required()->check(in_unit_interval);
  qsim->add_option("--epsilon", qs_eps, "deviation tolerance")->required()
      ->check(CLI::PositiveNumber);
  qsim->add_option("--x", qs_x, "deviation quantile coordinate");
  qsim->add_option("--n-paths", qs_n, "replicates")->check(CLI::PositiveNumber);
  qsim->add_option("--seed", qs_seed, "master seed");
  qsim->add_option("--threads", qs_threads, "worker cap");

  std::string qt_table;
  double qt_p = 0.0, qt_eps = 0.0, qt_q = 0.0, qt_w = 0.0, qt_kappa = 1.0;
  auto* qst = qnt->add_subcommand("stationary", "domain-of-attraction calculator");
  qst->configurable();
  qst->add_option("--table", qt_table, "tail table file (u,tail per line, # comments)")
      ->required();
  qst->add_option("--p", qt_p, "exceedance budget")->required()->check(in_unit_interval);
  qst->add_option("--epsilon", qt_eps, "deviation tolerance")->required()
      ->check(CLI::PositiveNumber);
  qst->add_option("--q", qt_q, "sampling interval q(eps)")->required()
      ->check(CLI::PositiveNumber);
  qst->add_option("--w", qt_w, "deviation scale w(eps)")
      ->check(CLI::NonNegativeNumber);
  qst->add_option("--kappa", qt_kappa, "limit-law kappa")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    if (cal->parsed()) return run_calibrate(cal_pf, cal_eps, cal_sided);
    if (ver->parsed()) {
      va.seed = ver_seed;
      return run_verify(va);
    }
    if (prb->parsed()) return run_probe(pa);
    if (qnt->parsed()) {
      if (qsim->parsed())
        return run_quantile_sim(qs_pf, qs_p, qs_eps, qs_x, qs_n, qs_seed, qs_threads);
      return run_quantile_stationary(qt_table, qt_p, qt_eps, qt_q, qt_w, qt_kappa);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const siq::calib::CalibrationError& e) {
    std::cerr << "calibration error: " << e.what()
              << " (admissible epsilon < " << fmt6(e.admissible_epsilon()) << ")\n";
    return 2;
  } catch (const siq::mc::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const siq::risk::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
