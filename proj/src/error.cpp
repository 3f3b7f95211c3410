#include "crepair/error.hpp"

namespace crepair {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::ProgramTooLarge: return "ProgramTooLarge";
    case ErrorCode::NoEligibleSite: return "NoEligibleSite";
    case ErrorCode::DisallowedOp: return "DisallowedOp";
    case ErrorCode::SourceDoesNotCompile: return "SourceDoesNotCompile";
    case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::CompilerUnavailable: return "CompilerUnavailable";
    case ErrorCode::CompilerTimeout: return "CompilerTimeout";
    case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::SequenceTooLong: return "SequenceTooLong";
    case ErrorCode::TargetTooLong: return "TargetTooLong";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::GradientMismatch: return "GradientMismatch";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::EmptyAfterDedup: return "EmptyAfterDedup";
    case ErrorCode::ModelMissing: return "ModelMissing";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json details)
    : std::runtime_error(message), code_(code), details_(std::move(details)) {}

nlohmann::json Error::to_json() const {
  nlohmann::json j;
  j["error"] = std::string(to_string(code_));
  j["message"] = what();
  if (!details_.empty()) j["details"] = details_;
  return j;
}

}  // namespace crepair
