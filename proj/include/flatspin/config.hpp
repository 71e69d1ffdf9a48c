#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flatspin/angle.hpp"
#include "flatspin/error.hpp"
#include "flatspin/hypsolve.hpp"
#include "flatspin/torus.hpp"

namespace flatspin {

enum class Command { SelfTest, Lift, Patch, Torus, Kitagawa };

const char* command_name(Command c) noexcept;
std::optional<Command> parse_command(std::string_view name);

enum class MeshFormat { None, Csv4d, Obj, Ply };

const char* mesh_format_name(MeshFormat f) noexcept;

struct Projection {
  enum class Kind { None, Stereographic, Orthographic };
  Kind kind = Kind::None;
  int pole = -1;  // stereographic pole axis; -1 picks the axis farthest from the surface
  int sign = 1;
  int drop = 3;  // orthographic: coordinate removed
};

struct CauchySpec {
  bool torus = true;  // sample lambda0 = -2 sin th2, mu0 = 2 cos th2 at s = 0
  CauchyData data;
};

struct DomainSpec {
  bool given = false;
  double x0 = 0.0, y0 = 0.0;
  int nx = 0, ny = 0;
};

struct ExperimentConfig {
  Command command = Command::SelfTest;
  AngleFunction psi;
  Lattice lattice{{{1, 0}, {0, 1}}};
  std::optional<double> alpha;
  int resolution = 256;
  int samples = 1024;
  CauchySpec cauchy;
  DomainSpec domain;
  MeshFormat mesh = MeshFormat::None;
  bool mesh_given = false;
  Projection projection;
  std::map<std::string, double> tolerances;
  long trials = 10000;
  std::uint64_t seed = 1;
  bool force = false;
};

struct ConfigIssue {
  ErrorCode code = ErrorCode::SchemaError;
  std::string path;  // JSON path, e.g. $.psi.psi2
  std::string message;
};

struct ConfigParse {
  ExperimentConfig config;
  std::vector<ConfigIssue> errors;
  std::vector<ConfigIssue> warnings;  // unknown keys when not strict

  bool ok() const { return errors.empty(); }
};

/// Resolutions and sample counts: powers of two in [16, 4096].
bool valid_resolution(long n) noexcept;

/// Tolerance names and defaults checked by each command.
std::map<std::string, double> default_tolerances(Command c);

/// Validates the whole document and reports every problem with its JSON path. The command comes
/// from the document's "command" key or from `command`; they must agree when both are present.
ConfigParse parse_config(std::string_view text, bool strict = true, std::optional<Command> command = std::nullopt);

/// Throws the first issue's code with all issues in the message.
ExperimentConfig parse_config_or_throw(std::string_view text, bool strict = true, std::optional<Command> command = std::nullopt);

nlohmann::json to_json(const Fourier& f);
nlohmann::json to_json(const AngleFunction& psi);

/// JSON text with sorted keys, two-space indent and every float printed with 17 significant digits.
std::string dump_json(const nlohmann::json& j);

}  // namespace flatspin
