#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace romassim {

enum class ErrorCode {
  ZeroDimension,
  RegionGap,
  MeshMismatch,
  InvalidArgument,
  NegativeCoefficient,
  NoFission,
  NoConvergence,
  SingularSystem,
  NonPositiveTemperature,
  DegenerateRange,
  ParameterOutOfRange,
  RankDeficient,
  ExtrapolationRequest,
  EmptyLibrary,
  LibraryExhausted,
  DegenerateSnapshot,
  SizeMismatch,
  ZeroVariance,
  StalledSelection,
  SingularSaddle,
  EmptyValidation,
  EmptySet,
  MissingField,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace romassim
