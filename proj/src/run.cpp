#include "flatspin/run.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>

#include "flatspin/export.hpp"
#include "flatspin/lift.hpp"
#include "flatspin/selftest.hpp"

namespace flatspin {

using nlohmann::json;

namespace {

struct Checks {
  json table = json::object();
  bool passed = true;

  void value(const std::string& name, double v, double tol) {
    bool ok = std::isfinite(v) && v <= tol;
    table[name] = {{"value", v}, {"tolerance", tol}, {"passed", ok}};
    passed = passed && ok;
  }
  void flag(const std::string& name, bool ok) {
    table[name] = {{"passed", ok}};
    passed = passed && ok;
  }
};

double tol(const ExperimentConfig& cfg, const char* name) { return cfg.tolerances.at(name); }

json quat_json(Quat q) { return json::array({q.w, q.x, q.y, q.z}); }

json closure_json(const ClosureInfo& c) { return {{"kind", closure_name(c.kind)}, {"defect", c.defect}}; }

json validation_json(const TorusValidation& v) {
  return {{"status", error_name(v.status)},
          {"message", v.message},
          {"psi1_range", {v.psi1_min, v.psi1_max}},
          {"psi2_range", {v.psi2_min, v.psi2_max}},
          {"padding", {v.pad1, v.pad2}},
          {"theta2_range", {v.theta2_min, v.theta2_max}},
          {"k", v.k},
          {"range_ok", v.range_ok},
          {"det", v.det},
          {"lattice_ok", v.lattice_ok},
          {"closure1", closure_json(v.closure1)},
          {"closure2", closure_json(v.closure2)},
          {"closure", closure_name(v.closure)},
          {"parity_ok", v.parity_ok}};
}

json lattice_json(const Lattice& L) { return {{L[0][0], L[0][1]}, {L[1][0], L[1][1]}}; }

double max_unit_error(const LiftPath& lift) {
  double e = 0.0;
  for (const auto* f : {&lift.g1, &lift.g2})
    for (const Quat& q : f->samples) e = std::fmax(e, std::abs(q.norm() - 1.0));
  return e;
}

double angle_error(const FactorPath& path, const Fourier& f) {
  const std::vector<double> a = extract_angle(path);
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    e = std::fmax(e, std::abs(std::remainder(a[i] - f(path.param(static_cast<int>(i))), 2.0 * std::numbers::pi)));
  return e;
}

int lift_intervals(double period, double h) {
  double n = period / h;
  if (std::abs(n - std::round(n)) > 1e-9 * n) throw Error(ErrorCode::GridMismatch, "angle periods are not multiples of the Cauchy step");
  return static_cast<int>(std::round(n));
}

void run_selftest_cmd(const ExperimentConfig& cfg, RunOutput& out, Checks& ck) {
  const SelfTestReport rep = run_selftest(cfg.trials, cfg.seed, tol(cfg, "algebra"), tol(cfg, "rotation"));
  json items = json::object();
  for (const SelfCheck& c : rep.checks) {
    items[c.name] = {{"trials", c.trials}, {"failures", c.failures}, {"max_error", c.max_error}, {"tolerance", c.tolerance}};
    ck.flag(c.name, c.failures == 0);
  }
  out.diagnostics["selftest"] = {{"seed", cfg.seed}, {"trials", cfg.trials}, {"checks", items}};
}

void run_lift_cmd(const ExperimentConfig& cfg, RunOutput& out, Checks& ck) {
  const int n = cfg.resolution;
  const LiftPath lift = integrate_lift(cfg.psi, n, n, Spinor());
  const double unit = max_unit_error(lift);
  const double horiz = horizontality_residual(lift, cfg.psi);
  const double ang = std::fmax(angle_error(lift.g1, cfg.psi.psi1), angle_error(lift.g2, cfg.psi.psi2));
  out.diagnostics["lift"] = {{"samples", n},
                             {"closure", closure_json(lift.closure)},
                             {"monodromy1", quat_json(lift.g1.monodromy())},
                             {"monodromy2", quat_json(lift.g2.monodromy())},
                             {"unit_error", unit},
                             {"horizontality_residual", horiz},
                             {"angle_error", ang}};
  ck.value("unit", unit, tol(cfg, "unit"));
  ck.value("horizontality", horiz, tol(cfg, "horizontality"));
  ck.value("angle", ang, tol(cfg, "angle"));
  out.files.emplace_back("lift.csv", lift_csv(lift));
}

void run_patch_cmd(const ExperimentConfig& cfg, RunOutput& out, Checks& ck) {
  const int n = cfg.resolution;
  const CauchyData data = cfg.cauchy.torus ? torus_cauchy_data(cfg.psi, n) : cfg.cauchy.data;
  GridSpec grid{0.0, 0.0, data.h, n / 2 + 1, n / 2 + 1};
  if (cfg.domain.given) grid = {cfg.domain.x0, cfg.domain.y0, data.h, cfg.domain.nx, cfg.domain.ny};
  const MetricField field = solve_cauchy(cfg.psi, data, grid);
  const LiftPath lift = integrate_lift(cfg.psi, lift_intervals(cfg.psi.psi1.period, data.h),
                                       lift_intervals(cfg.psi.psi2.period, data.h), Spinor());
  const PatchResult res = synthesize_patch(cfg.psi, lift, field);
  const PatchReport& r = res.report;
  const PdeResidual pde = pde_residual(field, cfg.psi);
  const PdeResidual alt = pde_residual_alt(field, cfg.psi);
  const double pde_max = std::fmax(pde.r1, pde.r2);

  json d = {{"grid", {{"x0", grid.x0}, {"y0", grid.y0}, {"h", grid.h}, {"nx", grid.nx}, {"ny", grid.ny}}},
            {"cauchy", cfg.cauchy.torus ? "torus" : "samples"},
            {"closedness", r.closedness},
            {"closedness_scaled", r.closedness_scaled},
            {"membership", r.membership},
            {"maxK", r.max_abs_K},
            {"maxKN", r.max_abs_KN},
            {"metric_residual", r.metric_residual},
            {"second_form_residual", r.second_form_residual},
            {"conformality", r.conformality},
            {"path_difference", r.path_difference},
            {"pde_residual", {pde.r1, pde.r2}},
            {"pde_residual_alt", {alt.r1, alt.r2}},
            {"coframe_duality", coframe_duality_residual(dual_coframe(cfg.psi, field), cfg.psi, field)}};
  if (cfg.cauchy.torus) {
    const MetricField exact = torus_metric_field(cfg.psi, grid);
    double e = 0.0;
    for (std::size_t k = 0; k < exact.lambda.size(); ++k)
      e = std::fmax(e, std::fmax(std::abs(field.lambda[k] - exact.lambda[k]), std::abs(field.mu[k] - exact.mu[k])));
    d["metric_error_vs_closed_form"] = e;
  }
  out.diagnostics["patch"] = d;

  ck.value("closedness_scaled", r.closedness_scaled, tol(cfg, "closedness_scaled"));
  ck.value("membership", r.membership, tol(cfg, "membership"));
  ck.value("curvature", r.max_abs_K, tol(cfg, "curvature"));
  ck.value("normal_curvature", r.max_abs_KN, tol(cfg, "normal_curvature"));
  ck.value("metric", r.metric_residual, tol(cfg, "metric"));
  ck.value("second_form", r.second_form_residual, tol(cfg, "second_form"));
  ck.value("conformality", r.conformality, tol(cfg, "conformality"));
  ck.value("pde", pde_max, tol(cfg, "pde"));

  out.files.emplace_back("metric.csv", metric_csv(field));
  out.files.emplace_back("patch.csv", patch_csv(res.patch));
  if (cfg.mesh == MeshFormat::Obj || cfg.mesh == MeshFormat::Ply)
    out.files.emplace_back(std::string("patch.") + mesh_format_name(cfg.mesh), export_mesh(res.patch, cfg.mesh, cfg.projection));
}

TorusSpec torus_spec(const ExperimentConfig& cfg) { return {cfg.psi, cfg.lattice, cfg.alpha}; }

bool validate_or_stop(const ExperimentConfig& cfg, const TorusSpec& spec, RunOutput& out, Checks& ck, TorusValidation& v) {
  v = validate_torus(spec, std::max(cfg.resolution, 512));
  out.diagnostics["validation"] = validation_json(v);
  ck.flag("validation", v.ok() || cfg.force);
  if (!v.ok() && cfg.force) out.diagnostics["forced"] = true;
  return v.ok() || cfg.force;
}

void run_torus_cmd(const ExperimentConfig& cfg, RunOutput& out, Checks& ck) {
  const TorusSpec spec = torus_spec(cfg);
  TorusValidation v;
  if (!validate_or_stop(cfg, spec, out, ck, v)) return;
  const int n = cfg.resolution;
  const TorusPatch tp = build_torus(spec, n, n, true);

  double unit = 0.0;
  for (const Vec4& p : tp.patch.F) unit = std::fmax(unit, std::abs(norm(p) - 1.0));
  const double metric = torus_metric_residual(tp);
  // the (x, y) rebuild needs equal s and t steps
  const bool square = std::abs(cfg.psi.psi1.period - cfg.psi.psi2.period) <= 1e-12 * cfg.psi.psi1.period;
  std::optional<PipelineComparison> pc;
  if (square) pc = compare_with_surface_pipeline(tp, n / 2 + 1);
  const FundForms ff = estimate_fundamental_forms(tp.patch);
  const GaussImage gi = gauss_image(tp.lift, cfg.samples);
  const double h = std::min(cfg.psi.psi1.period, cfg.psi.psi2.period) / n;
  const double conf = gauss_conformality_residual([&](double s, double t) { return tp.lift.at(s, t); },
                                                  GridSpec{0.0, 0.0, h, n / 2 + 1, n / 2 + 1});

  json d = {{"resolution", n},
            {"lattice", lattice_json(cfg.lattice)},
            {"unit_error", unit},
            {"metric_residual", metric},
            {"grid_validation", error_name(tp.validation.status)},
            {"pipeline_first_form", pc ? json(pc->first_form) : json(nullptr)},
            {"pipeline_offset", pc ? json(pc->offset) : json(nullptr)},
            {"maxK", ff.max_abs_K},
            {"maxKN", ff.max_abs_KN},
            {"gauss_conformality", conf},
            {"hopf_residual", gi.hopf_residual},
            {"total_curvature", {gi.total1, gi.total2}},
            {"window", {gi.window.min, gi.window.max}},
            {"degrees", {gi.degree1, gi.degree2}}};
  ck.value("unit", unit, tol(cfg, "unit"));
  ck.value("metric", metric, tol(cfg, "metric"));
  ck.flag("grid_validation", tp.validation.ok() || cfg.force);
  if (pc) ck.value("first_form", pc->first_form, tol(cfg, "first_form"));
  ck.value("flatness", std::fmax(ff.max_abs_K, ff.max_abs_KN), tol(cfg, "flatness"));
  ck.value("conformality", conf, tol(cfg, "conformality"));
  ck.value("hopf", gi.hopf_residual, tol(cfg, "hopf"));
  ck.value("total_curvature", std::fmax(std::abs(gi.total1), std::abs(gi.total2)), tol(cfg, "total_curvature"));
  ck.flag("window", gi.window.min > -std::numbers::pi && gi.window.max < std::numbers::pi);
  if (tp.patch.periodic_x && tp.patch.periodic_y) {
    const GaussBonnet gb = gauss_bonnet(tp, gi);
    d["gauss_bonnet"] = {{"int_K", gb.int_K}, {"int_KN", gb.int_KN}, {"residual_K", gb.residual_K}, {"residual_KN", gb.residual_KN}};
    ck.value("gauss_bonnet", std::fmax(gb.residual_K, gb.residual_KN), tol(cfg, "gauss_bonnet"));
    ck.value("degree", std::fmax(std::abs(gi.degree1), std::abs(gi.degree2)), tol(cfg, "gauss_bonnet"));
  } else {
    d["gauss_bonnet"] = nullptr;  // needs a doubly periodic patch
  }
  out.diagnostics["torus"] = d;

  out.files.emplace_back("torus.csv", patch_csv(tp.patch));
  out.files.emplace_back("gauss1.csv", curve_csv(gi.g1));
  out.files.emplace_back("gauss2.csv", curve_csv(gi.g2));
  if (cfg.mesh == MeshFormat::Obj || cfg.mesh == MeshFormat::Ply)
    out.files.emplace_back(std::string("torus.") + mesh_format_name(cfg.mesh), export_mesh(tp.patch, cfg.mesh, cfg.projection));
}

void run_kitagawa_cmd(const ExperimentConfig& cfg, RunOutput& out, Checks& ck) {
  const TorusSpec spec = torus_spec(cfg);
  TorusValidation v;
  if (!validate_or_stop(cfg, spec, out, ck, v)) return;
  const LiftPath lift = integrate_lift(cfg.psi, cfg.resolution, cfg.resolution, Spinor());
  const KitagawaData k = kitagawa_extract(spec, lift, cfg.samples);
  out.diagnostics["kitagawa"] = {{"alpha", k.alpha},
                                 {"samples", cfg.samples},
                                 {"k1_range", {k.k1_min, k.k1_max}},
                                 {"k2_range", {k.k2_min, k.k2_max}},
                                 {"disjoint", k.disjoint},
                                 {"curvature_error", {k.curvature_error1, k.curvature_error2}},
                                 {"lift_residual", k.lift_residual},
                                 {"total_curvature", {total_curvature(k.gamma1), total_curvature(k.gamma2)}}};
  ck.value("curvature", std::fmax(k.curvature_error1, k.curvature_error2), tol(cfg, "curvature"));
  ck.value("lift", k.lift_residual, tol(cfg, "lift"));
  ck.flag("disjoint", k.disjoint);
  out.files.emplace_back("gamma1.csv", curve_csv(k.gamma1));
  out.files.emplace_back("gamma2.csv", curve_csv(k.gamma2));
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg) {
  RunOutput out;
  Checks ck;
  out.diagnostics = json::object();
  out.diagnostics["command"] = command_name(cfg.command);
  if (cfg.command != Command::SelfTest) out.diagnostics["psi"] = to_json(cfg.psi);
  json tols = json::object();
  for (const auto& [k, v] : cfg.tolerances) tols[k] = v;
  out.diagnostics["tolerances"] = tols;
  try {
    switch (cfg.command) {
      case Command::SelfTest: run_selftest_cmd(cfg, out, ck); break;
      case Command::Lift: run_lift_cmd(cfg, out, ck); break;
      case Command::Patch: run_patch_cmd(cfg, out, ck); break;
      case Command::Torus: run_torus_cmd(cfg, out, ck); break;
      case Command::Kitagawa: run_kitagawa_cmd(cfg, out, ck); break;
    }
  } catch (const Error& e) {
    out.error = e.code();
    out.diagnostics["error"] = {{"code", error_name(e.code())}, {"message", e.what()}};
    ck.passed = false;
  }
  out.passed = ck.passed;
  out.diagnostics["checks"] = ck.table;
  out.diagnostics["passed"] = out.passed;
  out.files.emplace_back("diagnostics.json", dump_json(out.diagnostics));
  return out;
}

std::vector<std::string> write_outputs(const RunOutput& out, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> paths;
  for (const auto& [name, content] : out.files) {
    const std::string p = (std::filesystem::path(dir) / name).string();
    write_text_file(p, content);
    paths.push_back(p);
  }
  return paths;
}

}  // namespace flatspin
