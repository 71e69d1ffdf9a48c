#include "flatspin/flatspin.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "flatspin/config.hpp"
#include "flatspin/export.hpp"
#include "flatspin/parallel.hpp"
#include "flatspin/run.hpp"
#include "flatspin/torus.hpp"

using namespace flatspin;

struct flatspin_config {
  ExperimentConfig cfg;
  std::string command;
  std::vector<std::string> warnings;
};

struct flatspin_result {
  RunOutput out;
  std::string diagnostics;
};

struct flatspin_torus {
  TorusPatch tp;
};

namespace {

thread_local std::string g_last_error;

flatspin_status fail(flatspin_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f, mapping exceptions to status codes and the thread's last error.
template <class F>
flatspin_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const Error& e) {
    return fail(static_cast<flatspin_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FLATSPIN_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(FLATSPIN_INTERNAL_ERROR, e.what());
  }
}

flatspin_status parse_into(const std::string& text, const char* command, int strict, flatspin_config** out) {
  if (!out) return fail(FLATSPIN_INVALID_ARGUMENT, "null output pointer");
  *out = nullptr;
  std::optional<Command> cmd;
  if (command) {
    cmd = parse_command(command);
    if (!cmd) return fail(FLATSPIN_SCHEMA_ERROR, std::string("unknown command '") + command + "'");
  }
  ConfigParse r = parse_config(text, strict != 0, cmd);
  if (!r.ok()) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "\n") + std::string(error_name(e.code)) + " at " + e.path + ": " + e.message;
    return fail(static_cast<flatspin_status>(r.errors.front().code), msg);
  }
  auto* c = new flatspin_config{std::move(r.config), {}, {}};
  c->command = command_name(c->cfg.command);
  for (const auto& w : r.warnings) c->warnings.push_back(w.path + ": " + w.message);
  *out = c;
  return FLATSPIN_OK;
}

}  // namespace

extern "C" {

const char* flatspin_version(void) { return "1.0.0"; }

const char* flatspin_status_name(flatspin_status status) {
  if (status == FLATSPIN_INTERNAL_ERROR) return "InternalError";
  if (status < 0 || status > FLATSPIN_IO_ERROR) return "Unknown";
  return error_name(static_cast<ErrorCode>(status));
}

const char* flatspin_last_error(void) { return g_last_error.c_str(); }

flatspin_status flatspin_config_parse(const char* json_text, const char* command, int strict, flatspin_config** out) {
  return guarded([&] {
    if (!json_text) return fail(FLATSPIN_INVALID_ARGUMENT, "null config text");
    return parse_into(json_text, command, strict, out);
  });
}

flatspin_status flatspin_config_load(const char* path, const char* command, int strict, flatspin_config** out) {
  return guarded([&] {
    if (!path) return fail(FLATSPIN_INVALID_ARGUMENT, "null path");
    if (out) *out = nullptr;
    return parse_into(read_text_file(path), command, strict, out);
  });
}

flatspin_status flatspin_config_set_resolution(flatspin_config* cfg, int n) {
  if (!cfg) return fail(FLATSPIN_INVALID_ARGUMENT, "null config");
  if (!valid_resolution(n)) return fail(FLATSPIN_SCHEMA_ERROR, "resolution must be a power of two between 16 and 4096");
  cfg->cfg.resolution = n;
  return FLATSPIN_OK;
}

const char* flatspin_config_command(const flatspin_config* cfg) { return cfg ? cfg->command.c_str() : ""; }

size_t flatspin_config_warning_count(const flatspin_config* cfg) { return cfg ? cfg->warnings.size() : 0; }

const char* flatspin_config_warning(const flatspin_config* cfg, size_t i) {
  return cfg && i < cfg->warnings.size() ? cfg->warnings[i].c_str() : nullptr;
}

void flatspin_config_free(flatspin_config* cfg) { delete cfg; }

flatspin_status flatspin_run(const flatspin_config* cfg, flatspin_result** out) {
  return guarded([&] {
    if (!cfg || !out) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    auto* r = new flatspin_result{run_experiment(cfg->cfg), {}};
    r->diagnostics = r->out.files.back().second;
    *out = r;
    if (r->out.error != ErrorCode::Ok)
      return fail(static_cast<flatspin_status>(r->out.error), r->out.diagnostics["error"]["message"].get<std::string>());
    return FLATSPIN_OK;
  });
}

int flatspin_result_passed(const flatspin_result* r) { return r && r->out.passed ? 1 : 0; }

const char* flatspin_result_diagnostics(const flatspin_result* r) { return r ? r->diagnostics.c_str() : ""; }

size_t flatspin_result_file_count(const flatspin_result* r) { return r ? r->out.files.size() : 0; }

const char* flatspin_result_file_name(const flatspin_result* r, size_t i) {
  return r && i < r->out.files.size() ? r->out.files[i].first.c_str() : nullptr;
}

const char* flatspin_result_file_content(const flatspin_result* r, size_t i) {
  return r && i < r->out.files.size() ? r->out.files[i].second.c_str() : nullptr;
}

flatspin_status flatspin_result_write(const flatspin_result* r, const char* dir) {
  return guarded([&] {
    if (!r || !dir) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    write_outputs(r->out, dir);
    return FLATSPIN_OK;
  });
}

void flatspin_result_free(flatspin_result* r) { delete r; }

flatspin_status flatspin_torus_build(const char* spec_json, int n1, int n2, int force, flatspin_torus** out) {
  return guarded([&] {
    if (!spec_json || !out) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    if (n1 < 4 || n2 < 4) return fail(FLATSPIN_INVALID_ARGUMENT, "grid needs at least 4 nodes per direction");
    const ExperimentConfig cfg = parse_config_or_throw(spec_json, true, Command::Torus);
    *out = new flatspin_torus{build_torus({cfg.psi, cfg.lattice, cfg.alpha}, n1, n2, force != 0)};
    return FLATSPIN_OK;
  });
}

flatspin_status flatspin_torus_size(const flatspin_torus* t, int* n1, int* n2) {
  if (!t || !n1 || !n2) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
  *n1 = t->tp.patch.grid.nx;
  *n2 = t->tp.patch.grid.ny;
  return FLATSPIN_OK;
}

flatspin_status flatspin_torus_point(const flatspin_torus* t, int i, int j, double out[4]) {
  if (!t || !out) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
  const GridSpec& g = t->tp.patch.grid;
  if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return fail(FLATSPIN_INVALID_ARGUMENT, "node index out of range");
  const Vec4& p = t->tp.patch.at(i, j);
  for (int k = 0; k < 4; ++k) out[k] = p[k];
  return FLATSPIN_OK;
}

flatspin_status flatspin_torus_eval(const flatspin_torus* t, double s, double u, double out[4]) {
  return guarded([&] {
    if (!t || !out) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    const Vec4 p = t->tp.eval(s, u);
    for (int k = 0; k < 4; ++k) out[k] = p[k];
    return FLATSPIN_OK;
  });
}

flatspin_status flatspin_torus_metric_residual(const flatspin_torus* t, double* out) {
  return guarded([&] {
    if (!t || !out) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    *out = torus_metric_residual(t->tp);
    return FLATSPIN_OK;
  });
}

flatspin_status flatspin_torus_export(const flatspin_torus* t, const char* format, const char* path) {
  return guarded([&] {
    if (!t || !format || !path) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    MeshFormat f;
    if (!std::strcmp(format, "csv4d"))
      f = MeshFormat::Csv4d;
    else if (!std::strcmp(format, "obj"))
      f = MeshFormat::Obj;
    else if (!std::strcmp(format, "ply"))
      f = MeshFormat::Ply;
    else
      return fail(FLATSPIN_INVALID_ARGUMENT, std::string("unknown mesh format '") + format + "'");
    write_text_file(path, export_mesh(t->tp.patch, f, Projection{}));
    return FLATSPIN_OK;
  });
}

void flatspin_torus_free(flatspin_torus* t) { delete t; }

flatspin_status flatspin_stereographic(const double p[4], int pole, int sign, double out[3]) {
  return guarded([&] {
    if (!p || !out) return fail(FLATSPIN_INVALID_ARGUMENT, "null argument");
    const Vec3 r = stereographic_project(Vec4{{p[0], p[1], p[2], p[3]}}, pole, sign);
    for (int k = 0; k < 3; ++k) out[k] = r[static_cast<std::size_t>(k)];
    return FLATSPIN_OK;
  });
}

void flatspin_set_threads(int n) { set_thread_cap(n); }

}  // extern "C"
