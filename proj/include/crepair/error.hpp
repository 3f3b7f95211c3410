#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace crepair {

enum class ErrorCode {
  LexError,
  ProgramTooLarge,
  NoEligibleSite,
  DisallowedOp,
  SourceDoesNotCompile,
  ExhaustedRetries,
  CompilerUnavailable,
  CompilerTimeout,
  UnknownPlaceholder,
  EmptyCorpus,
  SequenceTooLong,
  TargetTooLong,
  NonFiniteLoss,
  GradientMismatch,
  MissingGroundTruth,
  EmptyAfterDedup,
  ModelMissing,
  UnsupportedVersion,
  InvalidInput,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code and a JSON payload so
// the CLI can report it in machine-readable form.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json details = nlohmann::json::object());

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace crepair
