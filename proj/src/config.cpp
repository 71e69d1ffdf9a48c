#include "flatspin/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "flatspin/format.hpp"

namespace flatspin {

using nlohmann::json;

const char* command_name(Command c) noexcept {
  switch (c) {
    case Command::SelfTest: return "selftest";
    case Command::Lift: return "lift";
    case Command::Patch: return "patch";
    case Command::Torus: return "torus";
    case Command::Kitagawa: return "kitagawa";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::SelfTest, Command::Lift, Command::Patch, Command::Torus, Command::Kitagawa})
    if (name == command_name(c)) return c;
  return std::nullopt;
}

const char* mesh_format_name(MeshFormat f) noexcept {
  switch (f) {
    case MeshFormat::None: return "none";
    case MeshFormat::Csv4d: return "csv4d";
    case MeshFormat::Obj: return "obj";
    case MeshFormat::Ply: return "ply";
  }
  return "?";
}

bool valid_resolution(long n) noexcept { return n >= 16 && n <= 4096 && (n & (n - 1)) == 0; }

std::map<std::string, double> default_tolerances(Command c) {
  switch (c) {
    case Command::SelfTest:
      return {{"algebra", 1e-12}, {"rotation", 1e-12}};
    case Command::Lift:
      return {{"unit", 1e-10}, {"horizontality", 1e-3}, {"angle", 1e-3}};
    case Command::Patch:
      return {{"closedness_scaled", 10.0}, {"membership", 1e-10}, {"curvature", 1e-3}, {"normal_curvature", 1e-3},
              {"metric", 1e-3}, {"second_form", 5e-3}, {"conformality", 1e-10}, {"pde", 1e-3}};
    case Command::Torus:
      return {{"unit", 1e-10}, {"metric", 1e-4}, {"first_form", 1e-3}, {"hopf", 1e-10}, {"conformality", 1e-4},
              {"total_curvature", 1e-6}, {"gauss_bonnet", 1e-3}, {"flatness", 1e-3}};
    case Command::Kitagawa:
      return {{"curvature", 1e-3}, {"lift", 1e-6}};
  }
  return {};
}

namespace {

struct Ctx {
  ConfigParse& out;
  bool strict;

  void error(const std::string& path, const std::string& msg, ErrorCode code = ErrorCode::SchemaError) {
    out.errors.push_back({code, path, msg});
  }
  void unknown(const std::string& path) {
    if (strict)
      out.errors.push_back({ErrorCode::UnknownKey, path, "unknown key"});
    else
      out.warnings.push_back({ErrorCode::UnknownKey, path, "unknown key ignored"});
  }
  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) unknown(path + "." + it.key());
  }
};

std::optional<double> get_number(Ctx& c, const json& j, const std::string& path) {
  if (!j.is_number()) {
    c.error(path, "expected a number");
    return std::nullopt;
  }
  double v = j.get<double>();
  if (!std::isfinite(v)) {
    c.error(path, "expected a finite number");
    return std::nullopt;
  }
  return v;
}

std::optional<long> get_integer(Ctx& c, const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    c.error(path, "expected an integer");
    return std::nullopt;
  }
  return j.get<long>();
}

bool require_object(Ctx& c, const json& j, const std::string& path) {
  if (!j.is_object()) {
    c.error(path, "expected an object");
    return false;
  }
  return true;
}

Fourier parse_fourier(Ctx& c, const json& j, const std::string& path) {
  Fourier f;
  if (!require_object(c, j, path)) return f;
  c.check_keys(j, path, {"period", "mean", "harmonics"});
  if (j.contains("period")) {
    if (auto v = get_number(c, j["period"], path + ".period")) {
      if (*v <= 0.0)
        c.error(path + ".period", "must be positive");
      else
        f.period = *v;
    }
  }
  if (!j.contains("mean"))
    c.error(path + ".mean", "missing");
  else if (auto v = get_number(c, j["mean"], path + ".mean"))
    f.mean = *v;
  if (j.contains("harmonics")) {
    const json& h = j["harmonics"];
    if (!h.is_array()) {
      c.error(path + ".harmonics", "expected an array of [cos, sin] pairs");
    } else {
      for (std::size_t k = 0; k < h.size(); ++k) {
        std::string p = path + ".harmonics[" + std::to_string(k) + "]";
        if (!h[k].is_array() || h[k].size() != 2) {
          c.error(p, "expected [cos, sin]");
          continue;
        }
        auto a = get_number(c, h[k][0], p + "[0]");
        auto b = get_number(c, h[k][1], p + "[1]");
        if (a && b) f.harmonics.emplace_back(*a, *b);
      }
    }
  }
  return f;
}

AngleFunction parse_psi(Ctx& c, const json& j, const std::string& path) {
  AngleFunction psi;
  if (!require_object(c, j, path)) return psi;
  c.check_keys(j, path, {"psi1", "psi2"});
  for (auto [key, dst] : {std::pair{"psi1", &psi.psi1}, std::pair{"psi2", &psi.psi2}}) {
    if (!j.contains(key))
      c.error(path + "." + key, "missing");
    else
      *dst = parse_fourier(c, j[key], path + "." + key);
  }
  return psi;
}

Lattice parse_lattice(Ctx& c, const json& j, const std::string& path) {
  Lattice L{{{1, 0}, {0, 1}}};
  if (!j.is_array() || j.size() != 2) {
    c.error(path, "expected [[m1, n1], [m2, n2]]");
    return L;
  }
  for (int r = 0; r < 2; ++r) {
    std::string p = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != 2) {
      c.error(p, "expected [m, n]");
      continue;
    }
    for (int k = 0; k < 2; ++k)
      if (auto v = get_integer(c, j[r][k], p + "[" + std::to_string(k) + "]")) L[r][k] = *v;
  }
  return L;
}

std::vector<double> parse_samples(Ctx& c, const json& j, const std::string& path) {
  std::vector<double> v;
  if (!j.is_array()) {
    c.error(path, "expected an array of numbers");
    return v;
  }
  for (std::size_t k = 0; k < j.size(); ++k)
    if (auto x = get_number(c, j[k], path + "[" + std::to_string(k) + "]")) v.push_back(*x);
  return v;
}

CauchySpec parse_cauchy(Ctx& c, const json& j, const std::string& path) {
  CauchySpec spec;
  if (!require_object(c, j, path)) return spec;
  if (j.contains("kind")) {
    c.check_keys(j, path, {"kind"});
    if (!j["kind"].is_string() || j["kind"].get<std::string>() != "torus")
      c.error(path + ".kind", "expected \"torus\"");
    return spec;
  }
  spec.torus = false;
  c.check_keys(j, path, {"h", "periodic", "lambda0", "mu0"});
  for (const char* key : {"h", "lambda0", "mu0"})
    if (!j.contains(key)) c.error(path + "." + key, "missing");
  if (j.contains("h"))
    if (auto v = get_number(c, j["h"], path + ".h")) {
      if (*v <= 0.0)
        c.error(path + ".h", "must be positive");
      else
        spec.data.h = *v;
    }
  if (j.contains("periodic")) {
    if (!j["periodic"].is_boolean())
      c.error(path + ".periodic", "expected a boolean");
    else
      spec.data.periodic = j["periodic"].get<bool>();
  }
  if (j.contains("lambda0")) spec.data.lambda0 = parse_samples(c, j["lambda0"], path + ".lambda0");
  if (j.contains("mu0")) spec.data.mu0 = parse_samples(c, j["mu0"], path + ".mu0");
  if (j.contains("lambda0") && j.contains("mu0")) {
    if (spec.data.lambda0.size() != spec.data.mu0.size())
      c.error(path + ".mu0", "length differs from lambda0");
    else if (spec.data.lambda0.size() < 2)
      c.error(path + ".lambda0", "need at least two samples");
  }
  return spec;
}

DomainSpec parse_domain(Ctx& c, const json& j, const std::string& path) {
  DomainSpec d;
  if (!require_object(c, j, path)) return d;
  c.check_keys(j, path, {"x0", "y0", "nx", "ny"});
  d.given = true;
  if (j.contains("x0"))
    if (auto v = get_number(c, j["x0"], path + ".x0")) d.x0 = *v;
  if (j.contains("y0"))
    if (auto v = get_number(c, j["y0"], path + ".y0")) d.y0 = *v;
  for (auto [key, dst] : {std::pair{"nx", &d.nx}, std::pair{"ny", &d.ny}}) {
    std::string p = path + "." + key;
    if (!j.contains(key)) {
      c.error(p, "missing");
      continue;
    }
    if (auto v = get_integer(c, j[key], p)) {
      if (*v < 2 || *v > 4097)
        c.error(p, "must lie in [2, 4097]");
      else
        *dst = static_cast<int>(*v);
    }
  }
  return d;
}

Projection parse_projection(Ctx& c, const json& j, const std::string& path) {
  Projection p;
  if (!require_object(c, j, path)) return p;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    c.error(path + ".kind", "expected \"stereographic\", \"orthographic\" or \"none\"");
    return p;
  }
  std::string kind = j["kind"].get<std::string>();
  if (kind == "none") {
    c.check_keys(j, path, {"kind"});
  } else if (kind == "stereographic") {
    p.kind = Projection::Kind::Stereographic;
    c.check_keys(j, path, {"kind", "pole", "sign"});
    if (j.contains("pole")) {
      const json& pole = j["pole"];
      if (pole.is_string() && pole.get<std::string>() == "auto") {
        p.pole = -1;
      } else if (auto v = get_integer(c, pole, path + ".pole")) {
        if (*v < 0 || *v > 3)
          c.error(path + ".pole", "expected 0..3 or \"auto\"");
        else
          p.pole = static_cast<int>(*v);
      }
    }
    if (j.contains("sign"))
      if (auto v = get_integer(c, j["sign"], path + ".sign")) {
        if (*v != 1 && *v != -1)
          c.error(path + ".sign", "expected 1 or -1");
        else
          p.sign = static_cast<int>(*v);
      }
  } else if (kind == "orthographic") {
    p.kind = Projection::Kind::Orthographic;
    c.check_keys(j, path, {"kind", "drop"});
    if (j.contains("drop"))
      if (auto v = get_integer(c, j["drop"], path + ".drop")) {
        if (*v < 0 || *v > 3)
          c.error(path + ".drop", "expected 0..3");
        else
          p.drop = static_cast<int>(*v);
      }
  } else {
    c.error(path + ".kind", "expected \"stereographic\", \"orthographic\" or \"none\"");
  }
  return p;
}

std::set<std::string> allowed_keys(Command cmd) {
  std::set<std::string> keys{"command", "tolerances"};
  auto add = [&](std::initializer_list<const char*> more) { keys.insert(more.begin(), more.end()); };
  switch (cmd) {
    case Command::SelfTest: add({"trials", "seed"}); break;
    case Command::Lift: add({"psi", "resolution"}); break;
    case Command::Patch: add({"psi", "resolution", "cauchy", "domain", "mesh", "projection"}); break;
    case Command::Torus: add({"psi", "lattice", "resolution", "samples", "mesh", "projection", "force"}); break;
    case Command::Kitagawa: add({"psi", "lattice", "alpha", "resolution", "samples", "force"}); break;
  }
  return keys;
}

}  // namespace

ConfigParse parse_config(std::string_view text, bool strict, std::optional<Command> command) {
  ConfigParse out;
  Ctx c{out, strict};
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    c.error("$", std::string("invalid JSON: ") + e.what());
    return out;
  }
  if (!require_object(c, doc, "$")) return out;

  ExperimentConfig& cfg = out.config;
  std::optional<Command> cmd = command;
  if (doc.contains("command")) {
    const json& jc = doc["command"];
    std::optional<Command> named = jc.is_string() ? parse_command(jc.get<std::string>()) : std::nullopt;
    if (!named)
      c.error("$.command", "expected one of selftest, lift, patch, torus, kitagawa");
    else if (cmd && *cmd != *named)
      c.error("$.command", std::string("config is for '") + command_name(*named) + "', invoked as '" + command_name(*cmd) + "'");
    else
      cmd = named;
  }
  if (!cmd) {
    if (!doc.contains("command")) c.error("$.command", "missing");
    return out;
  }
  cfg.command = *cmd;
  c.check_keys(doc, "$", allowed_keys(*cmd));
  auto has = [&](const char* key) { return doc.contains(key) && allowed_keys(*cmd).count(key); };

  if (*cmd != Command::SelfTest) {
    if (!doc.contains("psi"))
      c.error("$.psi", "missing");
    else
      cfg.psi = parse_psi(c, doc["psi"], "$.psi");
  }
  if (has("lattice")) cfg.lattice = parse_lattice(c, doc["lattice"], "$.lattice");
  if (has("alpha"))
    if (auto v = get_number(c, doc["alpha"], "$.alpha")) cfg.alpha = *v;
  for (auto [key, dst] : {std::pair{"resolution", &cfg.resolution}, std::pair{"samples", &cfg.samples}}) {
    if (!has(key)) continue;
    std::string p = std::string("$.") + key;
    if (auto v = get_integer(c, doc[key], p)) {
      if (!valid_resolution(*v))
        c.error(p, "must be a power of two between 16 and 4096");
      else
        *dst = static_cast<int>(*v);
    }
  }
  if (has("cauchy")) cfg.cauchy = parse_cauchy(c, doc["cauchy"], "$.cauchy");
  if (has("domain")) cfg.domain = parse_domain(c, doc["domain"], "$.domain");
  if (has("mesh")) {
    const json& m = doc["mesh"];
    std::optional<MeshFormat> f;
    if (m.is_string())
      for (MeshFormat g : {MeshFormat::None, MeshFormat::Csv4d, MeshFormat::Obj, MeshFormat::Ply})
        if (m.get<std::string>() == mesh_format_name(g)) f = g;
    if (!f) {
      c.error("$.mesh", "expected \"none\", \"csv4d\", \"obj\" or \"ply\"");
    } else {
      cfg.mesh = *f;
      cfg.mesh_given = true;
    }
  }
  if (has("projection")) cfg.projection = parse_projection(c, doc["projection"], "$.projection");
  if (has("force")) {
    if (!doc["force"].is_boolean())
      c.error("$.force", "expected a boolean");
    else
      cfg.force = doc["force"].get<bool>();
  }
  if (has("trials"))
    if (auto v = get_integer(c, doc["trials"], "$.trials")) {
      if (*v < 1 || *v > 100000000)
        c.error("$.trials", "must lie in [1, 1e8]");
      else
        cfg.trials = *v;
    }
  if (has("seed")) {
    if (!doc["seed"].is_number_unsigned())
      c.error("$.seed", "expected a nonnegative integer");
    else
      cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  cfg.tolerances = default_tolerances(*cmd);
  if (doc.contains("tolerances") && require_object(c, doc["tolerances"], "$.tolerances")) {
    for (auto it = doc["tolerances"].begin(); it != doc["tolerances"].end(); ++it) {
      std::string p = "$.tolerances." + it.key();
      if (!cfg.tolerances.count(it.key())) {
        c.unknown(p);
        continue;
      }
      if (auto v = get_number(c, it.value(), p)) {
        if (*v < 0.0)
          c.error(p, "must be nonnegative");
        else
          cfg.tolerances[it.key()] = *v;
      }
    }
  }
  return out;
}

ExperimentConfig parse_config_or_throw(std::string_view text, bool strict, std::optional<Command> command) {
  ConfigParse r = parse_config(text, strict, command);
  if (r.ok()) return std::move(r.config);
  std::ostringstream msg;
  for (std::size_t k = 0; k < r.errors.size(); ++k)
    msg << (k ? "; " : "") << r.errors[k].path << ": " << r.errors[k].message;
  throw Error(r.errors.front().code, msg.str());
}

json to_json(const Fourier& f) {
  json h = json::array();
  for (auto [a, b] : f.harmonics) h.push_back({a, b});
  return {{"period", f.period}, {"mean", f.mean}, {"harmonics", h}};
}

json to_json(const AngleFunction& psi) { return {{"psi1", to_json(psi.psi1)}, {"psi2", to_json(psi.psi2)}}; }

namespace {

void write_json(std::string& out, const json& j, int indent) {
  auto pad = [&](int n) { out.append(static_cast<std::size_t>(n), ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann::json keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        pad(indent + 2);
        out += json(it.key()).dump();
        out += ": ";
        write_json(out, it.value(), indent + 2);
      }
      out += "\n";
      pad(indent);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) flat = false;
      if (flat) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          write_json(out, j[k], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        pad(indent + 2);
        write_json(out, j[k], indent + 2);
      }
      out += "\n";
      pad(indent);
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  write_json(out, j, 0);
  out += "\n";
  return out;
}

}  // namespace flatspin
