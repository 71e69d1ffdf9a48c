#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "flatspin/flatspin.h"

namespace {

enum Exit { kPass = 0, kChecksFailed = 1, kConfigError = 2, kRuntimeError = 3 };

void print_checks(const char* diagnostics) {
  const auto d = nlohmann::json::parse(diagnostics, nullptr, false);
  if (d.is_discarded() || !d.contains("checks")) return;
  for (auto it = d["checks"].begin(); it != d["checks"].end(); ++it) {
    const auto& c = it.value();
    std::string line = (c["passed"].get<bool>() ? "  ok    " : "  FAIL  ") + it.key();
    if (c.contains("value")) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %.3e <= %.1e", c["value"].is_number() ? c["value"].get<double>() : NAN,
                    c["tolerance"].get<double>());
      line += buf;
    }
    std::puts(line.c_str());
  }
  if (d.contains("error")) std::printf("  error: %s\n", d["error"]["message"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat surfaces with flat normal bundle in R^4 and flat tori in S^3 from spinor data"};
  app.require_subcommand(1);
  std::string config, out = "flatspin_out";
  int resolution = 0;
  bool strict = true;

  const char* names[] = {"selftest", "lift", "patch", "torus", "kitagawa"};
  const char* help[] = {"randomized algebra identities", "horizontal lift of an angle function",
                        "flat patch from Cauchy data", "flat torus in S^3", "Kitagawa curve pair of a torus"};
  for (int k = 0; k < 5; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], help[k]);
    auto* c = sub->add_option("--config", config, "JSON config")->check(CLI::ExistingFile);
    if (k > 0) c->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--resolution", resolution, "override the config resolution");
    sub->add_flag("--strict,!--no-strict", strict, "reject unknown keys (default)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  flatspin_config* cfg = nullptr;
  flatspin_status st = config.empty() ? flatspin_config_parse("{}", command.c_str(), strict, &cfg)
                                      : flatspin_config_load(config.c_str(), command.c_str(), strict, &cfg);
  if (st == FLATSPIN_IO_ERROR) {
    std::fprintf(stderr, "%s\n", flatspin_last_error());
    return kRuntimeError;
  }
  if (st != FLATSPIN_OK) {
    std::fprintf(stderr, "%s\n", flatspin_last_error());
    return kConfigError;
  }
  for (size_t i = 0; i < flatspin_config_warning_count(cfg); ++i)
    std::fprintf(stderr, "warning: %s\n", flatspin_config_warning(cfg, i));
  if (resolution && flatspin_config_set_resolution(cfg, resolution) != FLATSPIN_OK) {
    std::fprintf(stderr, "%s\n", flatspin_last_error());
    flatspin_config_free(cfg);
    return kConfigError;
  }

  flatspin_result* res = nullptr;
  st = flatspin_run(cfg, &res);
  flatspin_config_free(cfg);
  if (!res) {
    std::fprintf(stderr, "%s\n", flatspin_last_error());
    return kRuntimeError;
  }
  int code = st != FLATSPIN_OK ? kRuntimeError : flatspin_result_passed(res) ? kPass : kChecksFailed;
  if (flatspin_result_write(res, out.c_str()) != FLATSPIN_OK) {
    std::fprintf(stderr, "%s\n", flatspin_last_error());
    code = kRuntimeError;
  }
  std::printf("%s: %s (%s)\n", command.c_str(), code == kPass ? "passed" : code == kChecksFailed ? "FAILED" : "ERROR", out.c_str());
  print_checks(flatspin_result_diagnostics(res));
  flatspin_result_free(res);
  return code;
}
