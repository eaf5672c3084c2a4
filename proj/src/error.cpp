#include "lqcons/error.hpp"

namespace lqcons {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::ZeroDiagonal: return "ZeroDiagonal";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::SteinDivergence: return "SteinDivergence";
    case ErrorKind::NotNormal: return "NotNormal";
    case ErrorKind::InvalidGenerator: return "InvalidGenerator";
    case ErrorKind::RejectionExhausted: return "RejectionExhausted";
    case ErrorKind::InfeasibleDensity: return "InfeasibleDensity";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace lqcons
