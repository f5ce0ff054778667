#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "anisotex/cli.hpp"
#include "anisotex/io.hpp"
#include "doctest.h"

using namespace anisotex;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "anisotex");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / "anisotex_cli_test";
  fs::create_directories(d);
  return (d / name).string();
}

}  // namespace

TEST_CASE("simulate writes a field and echoes the spec") {
  const auto a = scratch("a.anif"), b = scratch("b.anif");
  auto r = run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "64", "--seed", "7", "--out", a});
  REQUIRE(r.code == 0);
  const Json spec = Json::parse(r.out);
  CHECK(spec["alpha0"] == 0.6);
  CHECK(spec["seed"] == 7);
  const auto f = read_anif(a);
  CHECK(f.n == 64);
  CHECK(f.values.size() == 64 * 64);
  CHECK(f.values[0] == 0.0);
  REQUIRE(run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "64", "--seed", "7", "--out", b}).code == 0);
  CHECK(read_file(a) == read_file(b));
}

TEST_CASE("simulate rejects inadmissible parameters with the bound") {
  auto r = run({"simulate", "--alpha0", "0.6", "--hurst", "0.7", "--out", scratch("x.anif")});
  CHECK(r.code == 2);
  CHECK(r.err.find("min(0.6,1.4)=0.6") != std::string::npos);
  CHECK(run({"simulate", "--alpha0", "0.6", "--out", scratch("x.anif")}).code == 2);
  CHECK(run({"simulate", "--alpha0", "2.5", "--hurst", "0.1", "--out", scratch("x.anif")}).code == 2);
  CHECK(run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "100", "--out", scratch("x.anif")}).code == 2);
  CHECK(run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--bogus", "1", "--out", scratch("x.anif")}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("scan from files and from an in-memory spec") {
  const auto a = scratch("s1.anif"), b = scratch("s2.anif");
  run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "256", "--seed", "1", "--out", a});
  run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "256", "--seed", "2", "--out", b});
  const auto pre = scratch("scan");
  auto r = run({"scan", "--in", a, "--in", b, "--p", "2", "--alpha-grid", "0.2:1.8:0.1", "--out", pre});
  REQUIRE(r.code == 0);
  const auto csv = decode_csv(read_file(pre + ".csv"));
  CHECK(csv.header == std::vector<std::string>{"alpha", "exponent_mean", "exponent_stderr"});
  REQUIRE(csv.rows.size() == 17);
  CHECK(csv.number(16, "alpha") == doctest::Approx(1.8));
  const Json j = Json::parse(read_file(pre + ".json"));
  CHECK(j.contains("argmax_alpha"));
  CHECK(j.contains("peak"));
  CHECK(j.contains("tent_rms"));
  CHECK(Json::parse(r.out) == j);

  auto m = run({"scan", "--spec", "alpha0=0.6,hurst=0.4,n=256,seed=1", "--reps", "2", "--alpha-grid",
                "0.2:1.8:0.1", "--out", scratch("scan2")});
  REQUIRE(m.code == 0);
  CHECK(Json::parse(m.out)["argmax_alpha"] == j["argmax_alpha"]);
  auto u = run({"scan", "--spec", "α₀=0.6,H₀=0.4,n=256", "--reps", "1", "--out", scratch("scan3")});
  CHECK(u.code == 0);
  // 64 points leave too few lags for a fit
  CHECK(run({"scan", "--spec", "alpha0=0.6,hurst=0.4,n=64", "--reps", "1", "--out", scratch("scan5")}).code == 2);
  CHECK(run({"scan", "--spec", "alpha0=0.6,n=64", "--out", scratch("scan4")}).code == 2);
}

TEST_CASE("scan errors") {
  const auto a = scratch("e1.anif"), c = scratch("e2.anif");
  run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "64", "--seed", "1", "--out", a});
  run({"simulate", "--alpha0", "0.7", "--hurst", "0.4", "--size", "64", "--seed", "2", "--out", c});
  auto r = run({"scan", "--in", a, "--alpha-grid", "0.5:0.5:0.1", "--out", scratch("x")});
  CHECK(r.code == 2);
  CHECK(r.err.find("empty grid") != std::string::npos);
  CHECK(run({"scan", "--in", a, "--in", c, "--out", scratch("x")}).code == 2);
  CHECK(run({"scan", "--in", a, "--in", a, "--out", scratch("x")}).code == 2);
  CHECK(run({"scan", "--in", scratch("nope.anif"), "--out", scratch("x")}).code == 2);
  CHECK(run({"scan", "--in", a, "--p", "0.5", "--out", scratch("x")}).code == 2);
  CHECK(run({"scan", "--in", a, "--alpha-grid", "0.1:1.8:0.1", "--out", scratch("x")}).code == 2);
  CHECK(run({"scan", "--out", scratch("x")}).code == 2);
}

TEST_CASE("analyze reports exponents and degenerate directions") {
  const auto a = scratch("an.anif");
  run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "256", "--seed", "3", "--out", a});
  const auto pre = scratch("an");
  auto r = run({"analyze", "--in", a, "--p", "inf", "--direction", "1,0", "--direction", "1,2", "--out", pre});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(read_file(pre + ".json"));
  REQUIRE(j["directions"].size() == 2);
  CHECK(j["directions"][1]["direction_v"] == 2);
  CHECK(j["p"] == "inf");
  const auto csv = decode_csv(read_file(pre + ".csv"));
  CHECK(csv.header == std::vector<std::string>{"direction_u", "direction_v", "p", "t", "S"});
  CHECK(std::isinf(csv.number(0, "p")));

  SampledField flat;
  flat.n = 64;
  flat.spec = make_field_spec(0.6, 0.4, 64, 0);
  flat.values.assign(64 * 64, 1.0);
  const auto cf = scratch("flat.anif");
  write_anif(cf, flat);
  auto d = run({"analyze", "--in", cf, "--out", scratch("flat")});
  CHECK(d.code == 0);
  CHECK(d.err.find("warning") != std::string::npos);
  const Json dj = Json::parse(d.out);
  CHECK(dj["directions"][0].contains("error"));
  CHECK_FALSE(dj["directions"][0].contains("h"));
  CHECK(run({"analyze", "--in", cf, "--direction", "0,0", "--out", scratch("flat")}).code == 2);
}

TEST_CASE("hywave writes statistics, ratios and a summary") {
  const auto a = scratch("hw.anif");
  run({"simulate", "--alpha0", "0.6", "--hurst", "0.4", "--size", "128", "--seed", "4", "--out", a});
  const auto pre = scratch("hw");
  auto r = run({"hywave", "--in", a, "--filter", "haar", "--out", pre});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(read_file(pre + ".json"));
  const double br = j["best_ratio"];
  CHECK(j["implied_alpha0"].get<double>() == doctest::Approx(2 * br / (1 + br)));
  const auto st = decode_csv(read_file(pre + "_stats.csv"));
  CHECK(st.header == std::vector<std::string>{"j1", "j2", "p", "log2_stat"});
  CHECK(st.rows.size() == 49);
  const auto ra = decode_csv(read_file(pre + "_ratios.csv"));
  CHECK(ra.header == std::vector<std::string>{"ratio", "decay_rate"});
  CHECK(ra.rows.size() == 161);
  CHECK(run({"hywave", "--in", a, "--levels", "9,2", "--out", pre}).code == 2);
  CHECK(run({"hywave", "--in", a, "--filter", "sym8", "--out", pre}).code == 2);
}

TEST_CASE("selftest and the thread variable") {
  auto r = run({"selftest", "--quick"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS determinism") != std::string::npos);
  CHECK(r.out.find("SKIP tent") != std::string::npos);
  auto w = run({"selftest", "--quick", "--debug-wrong-seed-stream"});
  CHECK(w.code == 1);
  CHECK(w.out.find("FAIL determinism") != std::string::npos);

  ::setenv("ANISOTEX_THREADS", "zero", 1);
  CHECK(run({"selftest", "--quick"}).code == 2);
  ::setenv("ANISOTEX_THREADS", "0", 1);
  CHECK(run({"selftest", "--quick"}).code == 2);
  ::setenv("ANISOTEX_THREADS", "2", 1);
  CHECK(run({"selftest", "--quick"}).code == 0);
  ::unsetenv("ANISOTEX_THREADS");
}
