#include "siq/results_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "siq/version.hpp"

namespace siq::io {

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

std::optional<double> opt_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("results_io: bad integer field '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("results_io: bad numeric field '" + s + "'");
  return v;
}

void write_verify_csv(std::ostream& os, const std::vector<VerifyRow>& rows) {
  os << kVerifyHeader << '\n';
  for (const auto& r : rows) {
    os << r.process << ',' << opt_str(r.alpha) << ',' << opt_str(r.beta) << ','
       << opt_str(r.hurst) << ',' << format_double(r.epsilon) << ','
       << format_double(r.x) << ',' << format_double(r.q) << ',' << opt_str(r.w) << ','
       << r.mode << ',' << r.n_paths << ',' << r.refine_m << ',' << r.k << ','
       << format_double(r.p_hat) << ',' << format_double(r.ci_lo) << ','
       << format_double(r.ci_hi) << ',' << opt_str(r.p_limit) << ','
       << opt_str(r.gap) << ',' << r.bias_note << ',' << r.seed << '\n';
  }
}

std::vector<VerifyRow> read_verify_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != split_csv_line(kVerifyHeader))
    throw std::runtime_error("read_verify_csv: bad or missing header");
  std::vector<VerifyRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 19) throw std::runtime_error("read_verify_csv: bad column count");
    VerifyRow r;
    r.process = f[0];
    r.alpha = opt_parse(f[1]);
    r.beta = opt_parse(f[2]);
    r.hurst = opt_parse(f[3]);
    r.epsilon = parse_double(f[4]);
    r.x = parse_double(f[5]);
    r.q = parse_double(f[6]);
    r.w = opt_parse(f[7]);
    r.mode = f[8];
    r.n_paths = parse_u64(f[9]);
    r.refine_m = parse_u64(f[10]);
    r.k = parse_u64(f[11]);
    r.p_hat = parse_double(f[12]);
    r.ci_lo = parse_double(f[13]);
    r.ci_hi = parse_double(f[14]);
    r.p_limit = opt_parse(f[15]);
    r.gap = opt_parse(f[16]);
    r.bias_note = f[17];
    r.seed = parse_u64(f[18]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_probe_csv(std::ostream& os, const std::vector<ProbeRow>& rows) {
  os << kProbeHeader << '\n';
  for (const auto& r : rows) {
    os << r.process << ',' << format_double(r.epsilon) << ',' << format_double(r.x)
       << ',' << format_double(r.r) << ',' << format_double(r.ratio31) << ','
       << format_double(r.ratio32) << ',' << format_double(r.ratio33) << ','
       << format_double(r.target31) << ',' << format_double(r.target32) << ','
       << format_double(r.target33) << '\n';
  }
}

std::vector<ProbeRow> read_probe_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != split_csv_line(kProbeHeader))
    throw std::runtime_error("read_probe_csv: bad or missing header");
  std::vector<ProbeRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw std::runtime_error("read_probe_csv: bad column count");
    ProbeRow r;
    r.process = f[0];
    r.epsilon = parse_double(f[1]);
    r.x = parse_double(f[2]);
    r.r = parse_double(f[3]);
    r.ratio31 = parse_double(f[4]);
    r.ratio32 = parse_double(f[5]);
    r.ratio33 = parse_double(f[6]);
    r.target31 = parse_double(f[7]);
    r.target32 = parse_double(f[8]);
    r.target33 = parse_double(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_manifest(const std::string& command,
                            const std::map<std::string, std::string>& config,
                            std::uint64_t master_seed,
                            const std::vector<ResultFile>& results) {
  nlohmann::json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["toolkit_version"] = kVersion;
  j["command"] = command;
  j["master_seed"] = master_seed;
  j["config"] = config;
  j["results"] = nlohmann::json::array();
  for (const auto& r : results)
    j["results"].push_back({{"file", r.file}, {"rows", r.rows}});
  return j.dump(2) + "\n";
}

}  // namespace siq::io
