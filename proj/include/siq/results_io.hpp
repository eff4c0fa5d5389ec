#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace siq::io {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

/// Exact inverse of format_double.
double parse_double(const std::string& s);

inline constexpr const char* kVerifyHeader =
    "process,alpha,beta,hurst,epsilon,x,q,w,mode,n_paths,refine_m,k,p_hat,"
    "ci_lo,ci_hi,p_limit,gap,bias_note,seed";

struct VerifyRow {
  std::string process;  // bm | stable | lfsm
  std::optional<double> alpha, beta, hurst;
  double epsilon = 0.0;
  double x = 0.0;
  double q = 0.0;
  std::optional<double> w;
  std::string mode;  // one | two
  std::uint64_t n_paths = 0;
  std::uint64_t refine_m = 0;
  std::uint64_t k = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> p_limit, gap;
  std::string bias_note;
  std::uint64_t seed = 0;

  bool operator==(const VerifyRow&) const = default;
};

void write_verify_csv(std::ostream& os, const std::vector<VerifyRow>& rows);
std::vector<VerifyRow> read_verify_csv(std::istream& is);

inline constexpr const char* kProbeHeader =
    "process,epsilon,x,r,ratio31,ratio32,ratio33,target31,target32,target33";

struct ProbeRow {
  std::string process;
  double epsilon = 0.0;
  double x = 0.0;
  double r = 0.0;
  double ratio31 = 0.0, ratio32 = 0.0, ratio33 = 0.0;
  double target31 = 0.0, target32 = 0.0, target33 = 0.0;

  bool operator==(const ProbeRow&) const = default;
};

void write_probe_csv(std::ostream& os, const std::vector<ProbeRow>& rows);
std::vector<ProbeRow> read_probe_csv(std::istream& is);

struct ResultFile {
  std::string file;
  std::uint64_t rows = 0;
};

/// Serialized run manifest (JSON text, alphabetical keys, no timestamps,
/// so the bytes are stable for identical runs).
std::string render_manifest(const std::string& command,
                            const std::map<std::string, std::string>& config,
                            std::uint64_t master_seed,
                            const std::vector<ResultFile>& results);

}  // namespace siq::io
