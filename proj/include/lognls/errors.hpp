#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lognls {

/// Machine-readable failure kinds. The CLI writes the name into summaries.
enum class ErrorCode {
  NonPositiveLambda,
  OmegaOutOfWindow,
  MissingOmega,
  NegativeAmplitude,
  NonFiniteField,
  SizeMismatch,
  NonPositiveB,
  IntegratorFailure,
  BracketFailure,
  GridTooSmall,
  BlowUpDetected,
  InsufficientSamples,
  MaxIterations,
  NonPositiveRho,
  ExhaustedScaling,
  OmegaTooCloseToEdge,
  QuadratureFailure,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lognls
