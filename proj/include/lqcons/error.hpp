#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lqcons {

enum class ErrorKind {
  InvalidShape,
  NonFinite,
  NotStochastic,
  NegativeEntry,
  ZeroDiagonal,
  NotIrreducible,
  SolveFailure,
  NotSymmetric,
  Disconnected,
  DimensionMismatch,
  NotReversible,
  SteinDivergence,
  NotNormal,
  InvalidGenerator,
  RejectionExhausted,
  InfeasibleDensity,
  OutOfRange,
  InvalidWeights,
  ParseError,
  ConfigError,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. `index()` names the offending row/node when the
/// failure is local to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::int64_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::int64_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::int64_t> index_;
};

}  // namespace lqcons
