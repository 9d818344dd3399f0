#include "catch_amalgamated.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BISMUT_LAB_CLI;
const fs::path kConfigs = BISMUT_LAB_CONFIGS;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bismut_lab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "case.ini";
  std::ofstream(p) << body;
  return p;
}

std::string with_config(const std::string& cmd, const fs::path& cfg, const fs::path& out) {
  return cmd + " --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"";
}

}  // namespace

TEST_CASE("identity suite command", "[cli]") {
  const fs::path out = scratch("identities");
  REQUIRE(run_cli(with_config("identities", kConfigs / "identities.ini", out)) == 0);
  const auto j = read_json(out / "report.json");
  CHECK(j["pass"].get<bool>());
  CHECK(j["count"].get<int>() == 100);
  for (const auto& [name, r] : j["identities"].items()) {
    INFO(name);
    CHECK(r["max_residual"].get<double>() < 1e-8);
  }
}

TEST_CASE("identity suite exit codes", "[cli][errors]") {
  const fs::path dir = scratch("identities_codes");
  const fs::path flip = write_config(dir, "[identities]\ncount = 5\ndims = 2\ninject_sign_flip = true\n");
  CHECK(run_cli(with_config("identities", flip, dir)) == 1);
  CHECK_FALSE(read_json(dir / "report.json")["pass"].get<bool>());

  const fs::path empty = write_config(dir, "[identities]\ncount = 0\n");
  CHECK(run_cli(with_config("identities", empty, dir)) == 0);
  const auto j = read_json(dir / "report.json");
  for (const auto& [name, r] : j["identities"].items()) CHECK(r["evaluated"].get<int>() == 0);

  const fs::path bad = write_config(dir, "[identities]\ncount = many\n");
  CHECK(run_cli(with_config("identities", bad, dir)) == 2);
  CHECK(run_cli("identities --config /nonexistent/cfg.ini") == 2);
  CHECK(run_cli("no_such_command") == 2);
  CHECK(run_cli("") == 2);
}

TEST_CASE("seeded runs produce identical reports", "[cli][property]") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  REQUIRE(run_cli(with_config("identities", kConfigs / "identities.ini", a) + " --seed 11") == 0);
  REQUIRE(run_cli(with_config("identities", kConfigs / "identities.ini", b) + " --seed 11") == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(read_json(a / "report.json")["seed"].get<std::uint64_t>() == 11);
}

TEST_CASE("tolerance override forces a tolerance failure", "[cli]") {
  const fs::path out = scratch("tol");
  CHECK(run_cli(with_config("oracle", kConfigs / "oracle.ini", out)) == 0);
  CHECK(run_cli(with_config("oracle", kConfigs / "oracle.ini", out) + " --tol 1e-20") == 1);
}

TEST_CASE("background commands", "[cli]") {
  for (const char* name : {"hopf_boothby.ini", "lie.ini", "kk_k0.ini"}) {
    INFO(name);
    const fs::path out = scratch("background");
    CHECK(run_cli(with_config("background", kConfigs / name, out)) == 0);
    CHECK(read_json(out / "report.json")["pass"].get<bool>());
  }
  const fs::path dir = scratch("background_bad");
  CHECK(run_cli(with_config("background", write_config(dir, "[background]\nkind = sphere\n"), dir)) == 2);
  CHECK(run_cli(with_config("background", write_config(dir, "[background]\nkind = kk\n[kk]\na0 = -1\n"), dir)) == 2);
}

TEST_CASE("flow command on a flat-base torus bundle", "[cli]") {
  const fs::path out = scratch("flow");
  REQUIRE(run_cli(with_config("flow", kConfigs / "kk_k0.ini", out)) == 0);
  const auto j = read_json(out / "summary.json");
  CHECK(j["termination"].get<std::string>() == "t_end");
  CHECK(std::abs(j["final_profile"]["a"].get<double>() - std::sqrt(21.0)) < 1e-8);
  const std::string csv = slurp(out / "series.csv");
  CHECK(csv.rfind("t,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 50);
}

TEST_CASE("obstruct command", "[cli]") {
  const fs::path out = scratch("obstruct");
  REQUIRE(run_cli(with_config("obstruct", kConfigs / "obstruct.ini", out)) == 0);
  const auto j = read_json(out / "report.json");
  bool saw_quintic = false;
  for (const auto& h : j["hypersurfaces"]) {
    if (h["d"].get<int>() != 5) continue;
    saw_quintic = true;
    CHECK(h["b2"].get<int>() == 53);
    CHECK(h["signature"].get<int>() == -35);
    CHECK(h["h11"].get<int>() == 45);
  }
  CHECK(saw_quintic);
}
