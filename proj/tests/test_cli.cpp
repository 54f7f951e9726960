#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "indsum/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "indsum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = indsum::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("stats for ginibre") {
  const auto r = run({"stats", "--t", "100"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["model"] == "ginibre");
  CHECK(std::fabs(j["points"][0]["var_a"].get<double>() - j["points"][0]["var_exact"].get<double>()) < 1e-9);
}

TEST_CASE("stats for karlin in csv") {
  const auto r = run({"stats", "--model", "karlin", "--variant", "powerlaw", "--alpha", "0.5", "--j", "2", "--t",
                      "1000", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,mean_b,var_a", 0) == 0);
}

TEST_CASE("box family from a config file") {
  const std::string path = "cli_test_rho.cfg";
  std::ofstream(path) << "variant = dehaan_poly\nbeta = 1\n";
  const auto r = run({"stats", "--model", "karlin", "--config", path, "--t", "1e4", "--constants"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["constants"]["lil_regime"] == "log");
  std::ofstream(path) << "variant = dehaan_poly\ngamma = 1\n";
  CHECK(run({"stats", "--model", "karlin", "--config", path, "--t", "1e4"}).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"stats"}).code == 2);
  CHECK(run({"stats", "--t", "-1"}).code == 2);
  CHECK(run({"stats", "--model", "karlin", "--variant", "powerlaw", "--alpha", "1.5", "--t", "10"}).code == 2);
  CHECK(run({"validate", "clt", "--t", "1e4", "--n", "10000"}).code == 2);  // no seed
  CHECK(run({"validate", "expmoment", "--t", "1e4", "--n", "100000", "--seed", "1", "--theta", "3"}).code == 2);
  CHECK(run({"stats", "--t", "10", "--abs-tol", "0"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("numerical errors exit with 3") {
  CHECK(run({"stats", "--t", "1e6", "--max-terms", "10"}).code == 3);
}

TEST_CASE("validation failures exit with 4") {
  // at t = 0.5 the count is nearly Bernoulli, far from its normal limit
  const auto bad = run({"validate", "absmoment", "--t", "0.5", "--n", "100000", "--seed", "1", "--p", "4"});
  CHECK(bad.code == 4);
  CHECK(nlohmann::json::parse(bad.out)["verdict"] == "fail");
}

TEST_CASE("environment seed and worker overrides") {
  setenv("INDSUM_SEED", "5", 1);
  setenv("INDSUM_WORKERS", "2", 1);
  const auto a = run({"validate", "bounds", "--t", "100", "--n", "10000", "--theta", "1"});
  unsetenv("INDSUM_WORKERS");
  const auto b = run({"validate", "bounds", "--t", "100", "--n", "10000", "--theta", "1", "--seed", "5"});
  unsetenv("INDSUM_SEED");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  setenv("INDSUM_SEED", "x", 1);
  CHECK(run({"stats", "--t", "1"}).code == 2);
  unsetenv("INDSUM_SEED");
}

TEST_CASE("reports are identical across worker counts") {
  const auto a = run({"validate", "bounds", "--t", "300", "--n", "10000", "--theta", "-1", "--theta", "1", "--seed",
                      "9", "--workers", "1"});
  const auto b = run({"validate", "bounds", "--t", "300", "--n", "10000", "--theta", "-1", "--theta", "1", "--seed",
                      "9", "--workers", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("lil-trace writes csv and sidecar") {
  const std::string out = "cli_test_trace.csv";
  const auto r = run({"lil-trace", "--gamma", "0.1", "--n-max", "100", "--paths", "3", "--seed", "4", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(slurp(out).rfind("n,tau_n,value,running_max\n", 0) == 0);
  const auto side = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(side["paths"].size() == 3);
  std::remove(out.c_str());
  std::remove((out + ".json").c_str());
}

TEST_CASE("grid subcommand") {
  const auto r = run({"grid", "lower", "--gamma", "0.5", "--n-max", "5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n,level,time,at_lower_horizon\n", 0) == 0);
  CHECK(run({"grid", "sideways"}).code == 2);
}

TEST_CASE("the installed executable runs") {
  const std::string cmd = std::string(INDSUM_CLI_PATH) + " stats --t 1 > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
}
