// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace repoforge {

/// Machine-readable error codes. Every thrown repoforge::Error carries one so
/// callers can branch on the failure class instead of parsing messages.
enum class Errc {
  // llm gateway
  ScriptParse,
  ScriptAmbiguity,
  NoMatchingRule,
  UnknownTemplate,
  MissingBinding,
  SchemaViolation,
  MalformedResponse,
  BackendUnavailable,
  HttpError,
  // github connector
  NotFound,
  RateLimited,
  NetworkError,
  CorpusInvalid,
  // patch engine
  DiffParse,
  DiffApply,
  // sandbox runtime
  RuntimeUnavailable,
  SandboxGone,
  PathEscape,
  MatchCountMismatch,
  EditFailed,
  ImageNotFound,
  CommitFailed,
  // repo store
  StorePersist,
  // orchestrator / phases
  UnknownAction,
  PhaseBudgetExceeded,
  NoSuitableRepository,
  SetupFailed,
  ApplyFailed,
  StoreFailed,
  SubtaskFailed,
  // harness / cli
  ScenarioInvalid,
  ConfigInvalid,
  Usage,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

/// Diff application failure; remembers which hunk refused to apply.
class DiffApplyError : public Error {
 public:
  DiffApplyError(int hunk_index, const std::string& message);
  int hunk_index() const { return hunk_index_; }

 private:
  int hunk_index_;
};

/// SearchReplace guard: the pattern occurred `found` times, caller expected
/// `expected`. The edit is rejected without touching the file.
class MatchCountError : public Error {
 public:
  MatchCountError(int found, int expected, const std::string& path);
  int found() const { return found_; }
  int expected() const { return expected_; }

 private:
  int found_;
  int expected_;
};

/// Rate-limit push-back from the repository host; carries the advisory delay.
class RateLimitError : public Error {
 public:
  RateLimitError(int retry_after_s, const std::string& message);
  int retry_after_s() const { return retry_after_s_; }

 private:
  int retry_after_s_;
};

/// Rule files are rejected with the 1-based line where parsing gave up.
class ScriptParseError : public Error {
 public:
  ScriptParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace repoforge
