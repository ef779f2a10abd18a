#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "taxiq/cli.hpp"
#include "taxiq/experiments.hpp"
#include "taxiq/format.hpp"
#include "taxiq/strategy.hpp"
#include "support.hpp"

using namespace taxiq;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string cfg(const std::string& name) { return std::string(TAXIQ_SOURCE_DIR) + "/figs/" + name; }

std::string shell(const std::string& cmd) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, f)) out.append(buf, n);
  pclose(f);
  return out;
}

}  // namespace

TEST_CASE("equilibrium command") {
  const auto r = run({"equilibrium", "--config", cfg("fig5a.cfg"), "--lambda", "6", "--mu2", "5.5"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto e = strategy::equilibrium_q(testing::fig5a(6, 5.5));
  CHECK(j["regime"] == "mixed");
  CHECK(j["q_e"].get<double>() == round12(e.q_e));
  CHECK(j["l_po"].get<double>() == round12(e.l_po));
  CHECK(j["v_po"].get<double>() == round12(e.v_po));
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 4);
  CHECK(run({"nope"}).code == 4);
  CHECK(run({"validate", "--lambda", "3"}).code == 2);
  CHECK(run({"stationary", "--config", cfg("fig5a.cfg"), "--lambda", "4"}).code == 3);
  CHECK(run({"validate", "--config", cfg("fig5a.cfg")}).code == 0);
  CHECK(run({"validate", "--config", cfg("missing.cfg")}).code == 4);
  CHECK(run({"figure", "7a"}).code == 4);
  CHECK(run({"figure", "7a", "--cost_cmp", "1"}).code == 0);
}

TEST_CASE("flags override the parameter file") {
  const auto a = json::parse(run({"measures", "--config", cfg("fig5a.cfg"), "--q", "0.5"}).out);
  const auto b = json::parse(run({"measures", "--config", cfg("fig5a.cfg"), "--q", "0.5", "--lambda", "2"}).out);
  CHECK(a["measures"]["lambda_p_eff"] != b["measures"]["lambda_p_eff"]);
  CHECK(b["measures"]["lambda_p_eff"].get<double>() < 2.0);
}

TEST_CASE("figure csv equals the library table") {
  const auto r = run({"figure", "9", "--format", "csv", "--points", "4"});
  REQUIRE(r.code == 0);
  experiments::FigureOptions o;
  o.points = 4;
  CHECK(r.out == experiments::to_csv(experiments::run_figure("9", o)));
}

TEST_CASE("json output parses back to the printed numbers") {
  const auto r = run({"social", "--config", cfg("fig6a.cfg"), "--lambda", "5.3"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(json::parse(j.dump()) == j);
  CHECK(j["q_star"].is_number());
}

TEST_CASE("simulation seeds") {
  const std::vector<std::string> base{"simulate", "--config", cfg("fig5a.cfg"), "--q", "0.5", "--events", "20000",
                                      "--warmup", "1000", "--replications", "2"};
  auto with_seed = base;
  with_seed.insert(with_seed.end(), {"--seed", "42"});
  const auto a = run(with_seed);
  REQUIRE(a.code == 0);
  CHECK(a.out == run(with_seed).out);

  setenv("TAXIQ_SEED", "42", 1);
  const auto b = run(base);
  unsetenv("TAXIQ_SEED");
  CHECK(b.out == a.out);
  CHECK(run(base).out != a.out);
}

TEST_CASE("separate processes give identical bytes") {
  const std::string cmd = std::string(TAXIQ_CLI_PATH) + " simulate --config " + cfg("fig8a.cfg") +
                          " --regime observable --threshold 5 --events 20000 --warmup 1000 --seed 7";
  const auto a = shell(cmd);
  CHECK_FALSE(a.empty());
  CHECK(a == shell(cmd));
}
