#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "flatspin/config.hpp"
#include "flatspin/export.hpp"
#include "flatspin/run.hpp"

using namespace flatspin;
using std::numbers::pi;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

const char* kConstantTorus = R"({
  "command": "torus",
  "psi": {"psi1": {"mean": 4.71238898038469}, "psi2": {"mean": 0.0}}
})";

bool has_issue(const std::vector<ConfigIssue>& v, ErrorCode code, const std::string& path) {
  for (const auto& i : v)
    if (i.code == code && i.path == path) return true;
  return false;
}

// Inverse of the projection from +e_pole: y -> (2 y, |y|^2 - 1) / (|y|^2 + 1) with the last entry at the pole axis.
Vec4 unproject(const Vec3& y, int pole) {
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  Vec4 p{};
  int m = 0;
  for (int k = 0; k < 4; ++k) p[k] = k == pole ? (r2 - 1.0) / (r2 + 1.0) : 2.0 * y[static_cast<std::size_t>(m++)] / (r2 + 1.0);
  return p;
}

// Clifford-type torus sampled exactly on an 8 x 8 periodic grid.
SurfacePatch small_torus() {
  SurfacePatch p;
  p.grid = GridSpec{0.0, 0.0, 2.0 * pi / 8, 8, 8};
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      const double a = p.grid.x(i), b = p.grid.y(j);
      p.F.push_back(Vec4{{std::cos(a) / std::sqrt(2.0), std::sin(a) / std::sqrt(2.0), std::cos(b) / std::sqrt(2.0), std::sin(b) / std::sqrt(2.0)}});
    }
  p.spherical = p.periodic_x = p.periodic_y = true;
  return p;
}

}  // namespace

TEST_CASE("minimal configs") {
  const ConfigParse r = parse_config(kConstantTorus);
  REQUIRE(r.ok());
  CHECK(r.config.command == Command::Torus);
  CHECK(r.config.psi.psi1.mean == 4.71238898038469);
  CHECK(r.config.psi.psi1.period == doctest::Approx(2.0 * pi).epsilon(1e-15));
  CHECK(r.config.psi.psi2.is_constant());
  CHECK(r.config.resolution == 256);
  CHECK(r.config.lattice == Lattice{{{1, 0}, {0, 1}}});
  CHECK(r.config.tolerances == default_tolerances(Command::Torus));

  const ConfigParse s = parse_config("{}", true, Command::SelfTest);
  REQUIRE(s.ok());
  CHECK(s.config.trials == 10000);
}

TEST_CASE("schema errors carry JSON paths") {
  ConfigParse r = parse_config(R"({"command": "torus", "psi": {"psi1": {"mean": 1.0}}})");
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.psi.psi2"));

  r = parse_config(R"({"command": "lift", "psi": {"psi1": {"mean": 1}, "psi2": {"mean": 0}}, "resolution": 100})");
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.resolution"));
  for (long n : {8L, 16L, 4096L, 8192L, 48L}) CHECK(valid_resolution(n) == (n == 16 || n == 4096));

  r = parse_config(R"({"command": "lift", "psi": {"psi1": {"mean": "x", "harmonics": [[0, 1], [2]]}, "psi2": {"mean": 0, "period": -1}}})");
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.psi.psi1.mean"));
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.psi.psi1.harmonics[1]"));
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.psi.psi2.period"));
  CHECK(r.errors.size() == 3);

  r = parse_config(R"({"psi": {}})");
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.command"));
  r = parse_config(R"({"command": "torus"})", true, Command::Lift);
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.command"));
  r = parse_config("{not json");
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$"));
  r = parse_config(R"({"command": "torus", "psi": {"psi1": {"mean": 1}, "psi2": {"mean": 0}}, "lattice": [[1, 0.5], [0, 1]]})");
  CHECK(has_issue(r.errors, ErrorCode::SchemaError, "$.lattice[0][1]"));

  CHECK(code_of([] { parse_config_or_throw(R"({"command": "patch"})"); }) == ErrorCode::SchemaError);
}

TEST_CASE("strict mode") {
  const char* typo = R"({"command": "torus", "psi": {"psi1": {"mean": 1, "harmonic": [[0, 1]]}, "psi2": {"mean": 0}}, "resolutoin": 64})";
  ConfigParse r = parse_config(typo);
  CHECK(has_issue(r.errors, ErrorCode::UnknownKey, "$.psi.psi1.harmonic"));
  CHECK(has_issue(r.errors, ErrorCode::UnknownKey, "$.resolutoin"));
  CHECK(code_of([&] { parse_config_or_throw(typo); }) == ErrorCode::UnknownKey);

  r = parse_config(typo, false);
  CHECK(r.ok());
  CHECK(r.warnings.size() == 2);
  CHECK(r.config.resolution == 256);

  // keys of other commands count as unknown
  r = parse_config(R"({"command": "lift", "psi": {"psi1": {"mean": 1}, "psi2": {"mean": 0}}, "lattice": [[1, 0], [0, 1]]})");
  CHECK(has_issue(r.errors, ErrorCode::UnknownKey, "$.lattice"));
}

TEST_CASE("optional sections") {
  const ConfigParse r = parse_config(R"({
    "command": "patch",
    "psi": {"psi1": {"period": 3, "mean": 1, "harmonics": [[0.5, -0.25]]}, "psi2": {"mean": 0}},
    "cauchy": {"h": 0.5, "periodic": true, "lambda0": [1, 2, 3], "mu0": [4, 5, 6]},
    "domain": {"x0": 0.5, "nx": 3, "ny": 4},
    "mesh": "ply",
    "projection": {"kind": "stereographic", "pole": 2, "sign": -1},
    "tolerances": {"metric": 0.5}
  })");
  REQUIRE(r.ok());
  const ExperimentConfig& c = r.config;
  CHECK(c.psi.psi1.period == 3.0);
  REQUIRE(c.psi.psi1.harmonics.size() == 1);
  CHECK(c.psi.psi1.harmonics[0].second == -0.25);
  CHECK_FALSE(c.cauchy.torus);
  CHECK(c.cauchy.data.periodic);
  CHECK(c.cauchy.data.mu0 == std::vector<double>{4, 5, 6});
  CHECK(c.domain.given);
  CHECK(c.domain.x0 == 0.5);
  CHECK(c.domain.ny == 4);
  CHECK(c.mesh == MeshFormat::Ply);
  CHECK(c.projection.kind == Projection::Kind::Stereographic);
  CHECK(c.projection.pole == 2);
  CHECK(c.projection.sign == -1);
  CHECK(c.tolerances.at("metric") == 0.5);
  CHECK(c.tolerances.at("curvature") == 1e-3);

  ConfigParse bad = parse_config(R"({"command": "patch", "psi": {"psi1": {"mean": 1}, "psi2": {"mean": 0}},
    "cauchy": {"h": 0.5, "lambda0": [1, 2], "mu0": [4]}, "tolerances": {"metric": -1, "speed": 1}})");
  CHECK(has_issue(bad.errors, ErrorCode::SchemaError, "$.cauchy.mu0"));
  CHECK(has_issue(bad.errors, ErrorCode::SchemaError, "$.tolerances.metric"));
  CHECK(has_issue(bad.errors, ErrorCode::UnknownKey, "$.tolerances.speed"));
}

TEST_CASE("JSON output keeps every bit") {
  std::mt19937_64 rng(5);
  nlohmann::json j;
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng), i % 60 - 30));
  j["values"] = xs;
  j["b"] = 1;
  j["a"] = {{"z", 0.1}, {"y", nullptr}, {"x", std::nan("")}};
  const std::string text = dump_json(j);
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  const auto back = nlohmann::json::parse(text);
  CHECK(back["a"]["x"].is_null());
  for (std::size_t k = 0; k < xs.size(); ++k) CHECK(back["values"][k].get<double>() == xs[k]);
  CHECK(dump_json(back) == text);
}

TEST_CASE("stereographic projection") {
  const Vec3 a = stereographic_project(Vec4{{0, 0, 1, 0}}, 0, 1);
  CHECK(a == Vec3{0, 1, 0});
  const Vec3 b = stereographic_project(Vec4{{-1, 0, 0, 0}}, 0, 1);
  CHECK(b == Vec3{0, 0, 0});
  CHECK(code_of([] { stereographic_project(Vec4{{1, 0, 0, 0}}, 0, 1); }) == ErrorCode::AtPole);
  CHECK(code_of([] { stereographic_project(Vec4{{1, 1e-10, 0, 0}}, 0, 1); }) == ErrorCode::AtPole);
  CHECK(code_of([] { stereographic_project(Vec4{{0, 0, 2, 0}}, 0, 1); }) == ErrorCode::NotUnit);
  CHECK(code_of([] { stereographic_project(Vec4{{0, 0, 1, 0}}, 4, 1); }) == ErrorCode::InvalidArgument);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 200; ++i) {
    Vec4 p{{n01(rng), n01(rng), n01(rng), n01(rng)}};
    p = (1.0 / norm(p)) * p;
    const int pole = i % 4;
    const Vec3 y = stereographic_project(p, pole, 1);
    CHECK(norm(unproject(y, pole) - p) <= 1e-12);
    // reflection across the pole axis relates the two signs
    Vec4 q = p;
    q[pole] = -q[pole];
    const Vec3 z = stereographic_project(q, pole, -1);
    CHECK(std::hypot(z[0] - y[0], z[1] - y[1], z[2] - y[2]) <= 1e-12 * (1.0 + std::hypot(y[0], y[1], y[2])));
    Vec4 e{};
    e[pole] = 1.0;
    const Vec3 w = stereographic_project(p, e);
    CHECK(std::hypot(w[0] - y[0], w[1] - y[1], w[2] - y[2]) <= 1e-12 * (1.0 + std::hypot(y[0], y[1], y[2])));
  }

  // general pole: conformal inverse in the rotated frame keeps |y| = tan(angle from -pole / 2)
  const Vec4 pole{{0.5, 0.5, 0.5, 0.5}};
  for (int i = 0; i < 50; ++i) {
    Vec4 p{{n01(rng), n01(rng), n01(rng), n01(rng)}};
    p = (1.0 / norm(p)) * p;
    const Vec3 y = stereographic_project(p, pole);
    const double r = std::hypot(y[0], y[1], y[2]);
    const double angle = std::acos(std::clamp(-dot(p, pole), -1.0, 1.0));
    CHECK(r == doctest::Approx(std::tan(angle / 2.0)).epsilon(1e-10));
  }
}

TEST_CASE("mesh export") {
  const SurfacePatch t = small_torus();
  const Mesh m = build_mesh(t, Projection{});
  CHECK(m.vertices.size() == 64);
  CHECK(m.triangles.size() == 128);
  // closed surface of genus one: V - E + F = 0 with every edge shared by two triangles
  std::map<std::pair<int, int>, int> edges;
  for (const auto& tri : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  CHECK(static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.triangles.size()) == 0);
  for (const auto& [e, count] : edges) CHECK(count == 2);

  const std::string obj = export_mesh(t, MeshFormat::Obj, Projection{});
  std::istringstream in(obj);
  std::string line;
  int v = 0, f = 0;
  while (std::getline(in, line)) {
    v += line.rfind("v ", 0) == 0;
    f += line.rfind("f ", 0) == 0;
  }
  CHECK(v == 64);
  CHECK(f == 128);

  const std::string ply = export_mesh(t, MeshFormat::Ply, Projection{});
  CHECK(ply.find("element vertex 64\n") != std::string::npos);
  CHECK(ply.find("element face 128\n") != std::string::npos);

  const std::string csv = export_mesh(t, MeshFormat::Csv4d, Projection{});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 64 + 1);

  SurfacePatch open = t;
  open.periodic_x = open.periodic_y = false;
  CHECK(build_mesh(open, Projection{}).triangles.size() == 2 * 7 * 7);

  SurfacePatch flat = open;
  flat.spherical = false;
  CHECK(code_of([&] { export_mesh(flat, MeshFormat::Obj, Projection{}); }) == ErrorCode::ProjectionRequired);
  Projection ortho;
  ortho.kind = Projection::Kind::Orthographic;
  ortho.drop = 1;
  const Mesh om = build_mesh(flat, ortho);
  CHECK(om.vertices[9] == Vec3{t.F[9][0], t.F[9][2], t.F[9][3]});
  const std::string raw = export_mesh(flat, MeshFormat::Csv4d, Projection{});
  CHECK(std::count(raw.begin(), raw.end(), '\n') == 65);
}

TEST_CASE("automatic pole avoids the surface") {
  const SurfacePatch t = small_torus();
  const Vec4 p = auto_pole(t);
  double closest = -1.0;
  for (const Vec4& x : t.F) closest = std::max(closest, dot(x, p));
  // on this torus the best candidate pole sits at distance sqrt(2 - sqrt 2) from the samples
  CHECK(closest <= 1.0 / std::sqrt(2.0) + 1e-12);
}

TEST_CASE("runner reports checks") {
  ExperimentConfig cfg = parse_config_or_throw(R"({"command": "selftest", "trials": 300})");
  RunOutput out = run_experiment(cfg);
  CHECK(out.passed);
  REQUIRE(out.files.size() == 1);
  CHECK(out.files[0].first == "diagnostics.json");
  CHECK(out.diagnostics["selftest"]["checks"]["sqrt_enumeration"]["trials"] == 300);

  cfg = parse_config_or_throw(R"({"command": "lift", "psi": {"psi1": {"mean": 4.71238898038469}, "psi2": {"mean": 0}},
                                  "resolution": 64, "tolerances": {"unit": 0}})");
  out = run_experiment(cfg);
  CHECK(out.diagnostics["checks"]["horizontality"]["passed"] == true);
  CHECK(out.passed == (out.diagnostics["lift"]["unit_error"].get<double>() == 0.0));
  CHECK(out.files.front().first == "lift.csv");

  // a torus that is not immersed stops after validation
  cfg = parse_config_or_throw(R"({"command": "torus", "psi": {"psi1": {"mean": 0.0}, "psi2": {"mean": 0.0}}})");
  out = run_experiment(cfg);
  CHECK_FALSE(out.passed);
  CHECK(out.error == ErrorCode::Ok);
  CHECK(out.diagnostics["validation"]["status"] == "NotImmersed");
  CHECK(out.files.size() == 1);

  // misaligned Cauchy samples are a runtime error
  cfg = parse_config_or_throw(R"({"command": "patch", "psi": {"psi1": {"mean": 4.71238898038469}, "psi2": {"mean": 0}},
    "cauchy": {"h": 0.1, "periodic": true, "lambda0": [-1.4, -1.4, -1.4, -1.4, -1.4], "mu0": [-1.4, -1.4, -1.4, -1.4, -1.4]}, "domain": {"nx": 3, "ny": 3}})");
  out = run_experiment(cfg);
  CHECK(out.error == ErrorCode::GridMismatch);
  CHECK(out.diagnostics["error"]["code"] == "GridMismatch");
}
