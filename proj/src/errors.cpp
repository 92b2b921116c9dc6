#include "lognls/errors.hpp"

namespace lognls {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::OmegaOutOfWindow: return "OmegaOutOfWindow";
    case ErrorCode::MissingOmega: return "MissingOmega";
    case ErrorCode::NegativeAmplitude: return "NegativeAmplitude";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NonPositiveB: return "NonPositiveB";
    case ErrorCode::IntegratorFailure: return "IntegratorFailure";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::BlowUpDetected: return "BlowUpDetected";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonPositiveRho: return "NonPositiveRho";
    case ErrorCode::ExhaustedScaling: return "ExhaustedScaling";
    case ErrorCode::OmegaTooCloseToEdge: return "OmegaTooCloseToEdge";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace lognls
