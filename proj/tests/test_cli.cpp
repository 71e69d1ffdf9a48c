#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(FLATSPIN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::path("cli_configs") / name;
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

const std::string kConfigs = FLATSPIN_CONFIGS;

}  // namespace

TEST_CASE("identical configs give identical bytes") {
  fs::remove_all("cli_a");
  fs::remove_all("cli_b");
  REQUIRE(run("torus --config " + kConfigs + "/torus_constant.json --out cli_a") == 0);
  REQUIRE(run("torus --config " + kConfigs + "/torus_constant.json --out cli_b") == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator("cli_a")) {
    ++files;
    CHECK(slurp(e.path()) == slurp(fs::path("cli_b") / e.path().filename()));
  }
  CHECK(files == 5);  // torus.csv, gauss1.csv, gauss2.csv, torus.obj, diagnostics.json
}

TEST_CASE("exit codes") {
  CHECK(run("selftest --out cli_self") == 0);
  const std::string torus = R"({"command": "torus", "psi": {"psi1": {"mean": 4.71238898038469}, "psi2": {"mean": 0.0}}, "resolution": 128)";
  CHECK(run("torus --config " + write_config("tight.json", torus + R"(, "tolerances": {"metric": 1e-12}})") + " --out cli_tight") == 1);
  CHECK(slurp("cli_tight/diagnostics.json").find("\"passed\": false") != std::string::npos);
  CHECK(run("torus --config " + write_config("bad.json", torus + R"(, "resolution": 100})") + " --out cli_bad") == 2);
  const std::string typo = write_config("typo.json", torus + R"(, "resolutoin": 64})");
  CHECK(run("torus --config " + typo + " --out cli_typo") == 2);
  CHECK(run("torus --config " + typo + " --out cli_typo --no-strict") == 0);
  CHECK(run("lift --config " + typo + " --out cli_typo") == 2);
  CHECK(run("torus --config " + write_config("ok.json", torus + "}") + " --resolution 100 --out cli_res") == 2);
  CHECK(run("torus --config " + write_config("ok.json", torus + "}") + " --resolution 32 --out cli_res") == 1);
  const std::string misaligned = R"({"command": "patch", "psi": {"psi1": {"mean": 4.71238898038469}, "psi2": {"mean": 0}},
    "cauchy": {"h": 0.1, "periodic": true, "lambda0": [-1.4, -1.4, -1.4], "mu0": [-1.4, -1.4, -1.4]}, "domain": {"nx": 2, "ny": 2}})";
  CHECK(run("patch --config " + write_config("misaligned.json", misaligned) + " --out cli_err") == 3);
  CHECK(slurp("cli_err/diagnostics.json").find("GridMismatch") != std::string::npos);
  CHECK(run("torus") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("torus --config missing.json") == 2);
}
