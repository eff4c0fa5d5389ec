#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "siq/results_io.hpp"

using namespace siq::io;

TEST_SUITE("io") {

TEST_CASE("format_double is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 9.10822757994e-4, 0.0, -2.5, 1e17}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("verify csv header matches the wire contract") {
  CHECK(std::string(kVerifyHeader) ==
        "process,alpha,beta,hurst,epsilon,x,q,w,mode,n_paths,refine_m,k,p_hat,"
        "ci_lo,ci_hi,p_limit,gap,bias_note,seed");
}

TEST_CASE("verify rows round-trip structurally") {
  std::vector<VerifyRow> rows;
  VerifyRow bm;
  bm.process = "bm";
  bm.epsilon = 0.05;
  bm.x = 0.0;
  bm.q = 1.78382477564e-4;
  bm.mode = "one";
  bm.n_paths = 20000;
  bm.refine_m = 64;
  bm.k = 7231;
  bm.p_hat = 0.36155;
  bm.ci_lo = 0.355;
  bm.ci_hi = 0.368;
  bm.p_limit = 0.13533528323661271;
  bm.gap = bm.p_hat - *bm.p_limit;
  bm.bias_note = "exact-block-max";
  bm.seed = 42;
  rows.push_back(bm);

  VerifyRow st;
  st.process = "stable";
  st.alpha = 1.5;
  st.beta = -1.0;
  st.epsilon = 0.01;
  st.x = 1.0;
  st.q = 1.0482759178e-4;
  st.w = 4.82549424337e-4;
  st.mode = "one";
  st.n_paths = 1000;
  st.refine_m = 16;
  st.k = 400;
  st.p_hat = 0.4;
  st.ci_lo = 0.37;
  st.ci_hi = 0.43;
  st.bias_note = "grid-understated";
  st.seed = 7;
  rows.push_back(st);

  std::stringstream ss;
  write_verify_csv(ss, rows);
  const auto back = read_verify_csv(ss);
  REQUIRE(back.size() == rows.size());
  CHECK(back[0] == rows[0]);
  CHECK(back[1] == rows[1]);
}

TEST_CASE("probe rows round-trip structurally") {
  std::vector<ProbeRow> rows;
  ProbeRow r;
  r.process = "lfsm";
  r.epsilon = 1e-4;
  r.x = 1.0;
  r.r = 0.5;
  r.ratio31 = 0.963434204;
  r.ratio32 = 0.3604811795;
  r.ratio33 = 0.2;
  r.target31 = 1.0;
  r.target32 = 0.36787944117144233;
  r.target33 = 0.22313016014842982;
  rows.push_back(r);
  std::stringstream ss;
  write_probe_csv(ss, rows);
  const auto back = read_probe_csv(ss);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == rows[0]);
}

TEST_CASE("empty row sets still emit the exact header") {
  std::stringstream ss;
  write_probe_csv(ss, {});
  CHECK(ss.str() == std::string(kProbeHeader) + "\n");
}

TEST_CASE("manifest is stable json with the required fields") {
  const std::string a =
      render_manifest("verify", {{"epsilon", "0.05"}, {"process", "bm"}}, 42,
                      {{"verify.csv", 3}});
  const std::string b =
      render_manifest("verify", {{"process", "bm"}, {"epsilon", "0.05"}}, 42,
                      {{"verify.csv", 3}});
  CHECK(a == b);  // key order does not leak into the bytes
  const auto j = nlohmann::json::parse(a);
  CHECK(j["schema_version"].get<int>() == 1);
  CHECK(j["master_seed"].get<std::uint64_t>() == 42);
  CHECK(j["command"] == "verify");
  CHECK(j["results"][0]["file"] == "verify.csv");
  CHECK(j["results"][0]["rows"] == 3);
  CHECK(j.contains("toolkit_version"));
  CHECK(j["config"]["process"] == "bm");
}

}  // TEST_SUITE
