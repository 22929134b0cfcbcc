#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "pcn_cli_test";
    fs::create_directories(d);
    std::ofstream(d / "tri.json") << R"({"nodes":["x","y","z"],"channels":[)"
                                  << R"({"id":"e","ends":["x","y"],"cap":3},)"
                                  << R"({"id":"f","ends":["y","z"],"cap":7},)"
                                  << R"({"id":"g","ends":["x","z"],"cap":11}]})";
    std::ofstream(d / "w.json") << R"({"x":5,"y":6,"z":10})";
    std::ofstream(d / "bad.json") << R"({"nodes":["x","x"],"channels":[]})";
    std::ofstream(d / "liq.json") << R"({"e":{"x":0,"y":3},"f":{"y":3,"z":4},"g":{"x":5,"z":6}})";
    return d;
  }();
  return dir;
}

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args, const std::string& name) {
  const auto out = workdir() / (name + ".out");
  const auto cmd = std::string(PCN_CLI) + " " + args + " > " + out.string() + " 2> " + (workdir() / (name + ".err")).string();
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream s;
  s << in.rdbuf();
  return {WEXITSTATUS(raw), s.str()};
}

std::string net() { return (workdir() / "tri.json").string(); }

}  // namespace

TEST_CASE("feasible on the triangle prints a witness") {
  auto r = run("feasible --network " + net() + " --wealth " + (workdir() / "w.json").string(), "feasible");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["feasible"] == true);
  CHECK(j.contains("witness"));
}

TEST_CASE("fiber count") {
  auto r = run("fiber --network " + net() + " --wealth " + (workdir() / "w.json").string() + " --enumerate", "fiber");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["count"] == 4);
  CHECK(j["states"].size() == 4);
}

TEST_CASE("validation errors exit nonzero") {
  CHECK(run("estimate-r --network " + net() + " --samples 0 --seed 1", "zero").status != 0);
  CHECK(run("feasible --network " + (workdir() / "bad.json").string() + " --wealth " + (workdir() / "w.json").string(), "bad")
            .status != 0);
  CHECK(run("feasible --network /nonexistent.json --wealth /nonexistent.json", "missing").status != 0);
  CHECK(run("estimate-r --network " + net() + " --samples 10", "noseed").status != 0);
}

TEST_CASE("infeasible verdicts are not errors") {
  std::ofstream(workdir() / "w_bad.json") << R"({"x":15,"y":4,"z":2})";
  auto r = run("feasible --network " + net() + " --wealth " + (workdir() / "w_bad.json").string(), "infeasible");
  CHECK(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["feasible"] == false);
}

TEST_CASE("stochastic commands are reproducible") {
  const std::vector<std::string> commands{
      "estimate-r --network " + net() + " --samples 3000 --seed 11",
      "estimate-rho --network " + net() + " --amount 4 --samples 3000 --seed 11",
      "throughput sweep --network " + net() + " --amounts 1:6 --samples 1000 --seed 2",
      "cutwidth --n 8 --m 6 --c 10 --k-range 2:4 --s-range 1:3 --samples 500 --seed 3",
      "depletion --n 10 --m 14 --trials 6 --seed 4",
      "convexsim --schedule quadratic --steps 1500 --seed 5",
      "convexsim --schedule linear --steps 1500 --seed 5 --demand uniform",
      "replenish --network " + net() + " --liquidity " + (workdir() / "liq.json").string(),
  };
  int i = 0;
  for (const auto& c : commands) {
    auto a = run(c, "det_a" + std::to_string(i));
    auto b = run("--threads 3 " + c, "det_b" + std::to_string(i));
    INFO(c);
    CHECK(a.status == 0);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);
    ++i;
  }
}
