#pragma once

#include <stdexcept>
#include <string>

namespace flatspin {

// Numeric values are shared with the C API (flatspin_status in flatspin.h).
enum class ErrorCode : int {
  Ok = 0,
  NotInvertible = 1,
  NotInCone = 2,
  NotUnit = 3,
  DegeneratePoint = 4,
  NotImmersed = 5,
  SignLoss = 6,
  DomainError = 7,
  GridMismatch = 8,
  DegenerateTangent = 9,
  LatticeParity = 10,
  NotClosed = 11,
  NoAdmissibleAlpha = 12,
  InvalidLattice = 13,
  OrientationReversed = 14,
  SchemaError = 15,
  UnknownKey = 16,
  AtPole = 17,
  ProjectionRequired = 18,
  InvalidArgument = 19,
  IoError = 20,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace flatspin
