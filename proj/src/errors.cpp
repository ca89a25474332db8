// SPDX-License-Identifier: Apache-2.0
#include "repoforge/errors.hpp"

namespace repoforge {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ScriptParse: return "ScriptParse";
    case Errc::ScriptAmbiguity: return "ScriptAmbiguity";
    case Errc::NoMatchingRule: return "NoMatchingRule";
    case Errc::UnknownTemplate: return "UnknownTemplate";
    case Errc::MissingBinding: return "MissingBinding";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::HttpError: return "HttpError";
    case Errc::NotFound: return "NotFound";
    case Errc::RateLimited: return "RateLimited";
    case Errc::NetworkError: return "NetworkError";
    case Errc::CorpusInvalid: return "CorpusInvalid";
    case Errc::DiffParse: return "DiffParse";
    case Errc::DiffApply: return "DiffApply";
    case Errc::RuntimeUnavailable: return "RuntimeUnavailable";
    case Errc::SandboxGone: return "SandboxGone";
    case Errc::PathEscape: return "PathEscape";
    case Errc::MatchCountMismatch: return "MatchCountMismatch";
    case Errc::EditFailed: return "EditFailed";
    case Errc::ImageNotFound: return "ImageNotFound";
    case Errc::CommitFailed: return "CommitFailed";
    case Errc::StorePersist: return "StorePersist";
    case Errc::UnknownAction: return "UnknownAction";
    case Errc::PhaseBudgetExceeded: return "PhaseBudgetExceeded";
    case Errc::NoSuitableRepository: return "NoSuitableRepository";
    case Errc::SetupFailed: return "SetupFailed";
    case Errc::ApplyFailed: return "ApplyFailed";
    case Errc::StoreFailed: return "StoreFailed";
    case Errc::SubtaskFailed: return "SubtaskFailed";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

DiffApplyError::DiffApplyError(int hunk_index, const std::string& message)
    : Error(Errc::DiffApply,
            "hunk " + std::to_string(hunk_index) + ": " + message),
      hunk_index_(hunk_index) {}

MatchCountError::MatchCountError(int found, int expected, const std::string& path)
    : Error(Errc::MatchCountMismatch,
            path + ": pattern matched " + std::to_string(found) +
                " time(s), expected " + std::to_string(expected)),
      found_(found),
      expected_(expected) {}

RateLimitError::RateLimitError(int retry_after_s, const std::string& message)
    : Error(Errc::RateLimited, message), retry_after_s_(retry_after_s) {}

ScriptParseError::ScriptParseError(int line, const std::string& message)
    : Error(Errc::ScriptParse, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace repoforge
