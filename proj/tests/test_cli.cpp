#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fls/cli.hpp"

using namespace fls;
using namespace fls::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fls_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("plan table for the 10 minute battery") {
  const auto bp = BatteryParams::from_minutes(10, 5);
  const auto t = plan_table(stag::plan_flocks(65321, bp, 1000), bp);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"109", "600", "300", "521", "1152", "261", "260.500", "32661", "50.0",
                                              "97982"});
  CHECK(t.csv().substr(0, 22) == "h,alpha_i,extra_per_fl");
  const auto empty = plan_table(stag::plan_flocks(0, bp, 1000), bp);
  CHECK(empty.rows[0].back() == "0");
}

TEST_CASE("analyze table") {
  const auto t = analyze_table(720, 1, {10, 20}, 65321);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][0] == "0");
  CHECK(std::stod(t.rows[0][6]) == doctest::Approx(39.681).epsilon(1e-4));
  CHECK(t.rows[1][1] == "6533");
  CHECK(t.rows[2][2] == "68588");
  CHECK(t.rows[1].back() == "2670");
  CHECK(t.rows[2].back() == "1399");
  CHECK(analyze_table(720, 1, {10}, 1000).rows[1].back().empty());

  const auto single = analyze_table(720, 1, {50}, 50);
  CHECK(single.rows[1][1] == "1");
  CHECK(single.rows[1][3] == "2.000");
}

TEST_CASE("table rendering") {
  Table t{{"a", "bb"}, {{"1", "22"}, {"333", "4"}}};
  CHECK(t.csv() == "a,bb\n1,22\n333,4\n");
  CHECK(t.text().find("333") != std::string::npos);
  CHECK(fixed(2.0 / 3.0, 3) == "0.667");
  CHECK(fixed(-0.0, 1) == "0.0");
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config("# comment\nexperiment = plan\n alpha=5 # inline\n\nbeta_min=15");
  CHECK(cfg.at("alpha") == "5");
  CHECK(cfg.at("beta_min") == "15");
  CHECK(cfg.size() == 3);
  CHECK_THROWS_AS(parse_config("colour=red\n"), FlsError);
  try {
    parse_config("alpha=1\nalpha=2\n");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
  try {
    parse_config("alpha 1\n");
  } catch (const FlsError& e) {
    CHECK(e.code() == ErrorCode::Parse);
  }
  CHECK_THROWS_AS(require_keys(parse_config("alpha=5\n"), "plan"), FlsError);
}

TEST_CASE("plan and analyze subcommands") {
  auto r = invoke({"plan", "--alpha", "12", "--beta-min", "0.2", "--omega-min", "0.1", "--s-threshold-ms", "3000"});
  CHECK(r.code == 0);
  CHECK(r.out.find("18") != std::string::npos);

  r = invoke({"analyze", "--alpha", "65321", "--mttf-hours", "720", "--mttr-seconds", "1", "--group-size", "10,20"});
  CHECK(r.code == 0);
  CHECK(r.out.find("2670") != std::string::npos);
  CHECK(r.out.find("note:") != std::string::npos);
}

TEST_CASE("errors carry a machine-parsable prefix") {
  auto r = invoke({"plan", "--alpha", "12"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("fls-error: config:", 0) == 0);

  r = invoke({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("fls-error: usage:", 0) == 0);

  const auto dir = scratch("nothing");
  r = invoke({"simulate", "--alpha", "5", "--beta-min", "15", "--omega-min", "5", "--s-threshold-ms", "180000",
           "--horizon-s", "60", "--replications", "0", "--out", dir.string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("nothing to run") != std::string::npos);

  r = invoke({"simulate", "/nonexistent/flsim.cfg"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("fls-error: io:", 0) == 0);
}

TEST_CASE("simulate writes identical files for identical runs") {
  const auto cfg_path = fs::temp_directory_path() / "fls_cli_example.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "experiment = simulate\nalpha = 20\nbeta_min = 15\nomega_min = 5\ns_threshold_ms = 60000\n"
           "horizon_s = 7200\nmttf_hours = 2\nreplications = 2\nseed = 9\n";
  }
  const auto a = scratch("a"), b = scratch("b");
  REQUIRE(invoke({"simulate", cfg_path.string(), "--out", a.string()}).code == 0);
  REQUIRE(invoke({"simulate", cfg_path.string(), "--out", b.string()}).code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(files >= 10);
  CHECK(fs::exists(a / "rep_10_failures.csv"));
  CHECK(slurp(a / "rep_9_failures.csv") != slurp(a / "rep_10_failures.csv"));
  fs::remove(cfg_path);
}

TEST_CASE("sim_config_from") {
  const auto c = sim_config_from(parse_config(
      "alpha=8\nbeta_min=15\nomega_min=5\ns_threshold_ms=60000\nhorizon_s=10\nmttf_hours=3\nmttr_seconds=5\n"
      "group_size=4\nscheme=replication\nseed=4\n"));
  CHECK(c.cloud.alpha() == 8);
  CHECK(c.horizon_ms == 10000);
  CHECK(c.seed == 4);
  CHECK(c.failure_injection);
  REQUIRE(c.reliability.has_value());
  CHECK(c.reliability->group_size == 4);
  CHECK(c.scheme == sim::Scheme::Replication);
}
