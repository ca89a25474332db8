// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace repoforge {

/// The four phases a query moves through, in order.
enum class PhaseId { Search, Setup, Apply, Store };

/// Closed set of things an agent step can do. Anything else is rejected with
/// UnknownAction before it reaches an executor.
enum class ActionKind {
  GithubApiCall,
  ShellCommand,
  FileRead,
  FileWrite,
  LlmSubtask,
  Submit,
};

enum class ObsStatus { Ok, Error, Truncated };

const char* to_string(PhaseId p);
const char* to_string(ActionKind k);
const char* to_string(ObsStatus s);
PhaseId phase_from_string(const std::string& s);
ActionKind action_kind_from_string(const std::string& s);
ObsStatus obs_status_from_string(const std::string& s);

/// All four phases in execution order.
const std::vector<PhaseId>& all_phases();

struct Query {
  std::string text;
  std::optional<std::string> repo_hint;  // "owner/name" when the user names a repo

  bool valid() const { return !text.empty(); }
  /// Content digest used to key stored records and image tags.
  std::string digest() const;
};

struct Action {
  ActionKind kind = ActionKind::ShellCommand;
  std::map<std::string, std::string> args;  // sorted keys -> stable serialization
  std::int64_t issued_at_ms = 0;
};

struct Observation {
  ObsStatus status = ObsStatus::Ok;
  std::string payload;                  // possibly truncated (tail-kept)
  std::uint64_t byte_len_original = 0;  // length before truncation
  std::string payload_digest;           // sha256 of the full payload
};

struct Step {
  int seq = 0;
  PhaseId phase = PhaseId::Search;
  Action action;
  Observation observation;
};

/// Ordered trajectory. Appends enforce the dense 1..n sequence numbering.
class History {
 public:
  const Step& append(Step s);
  const std::vector<Step>& steps() const { return steps_; }
  int next_seq() const { return static_cast<int>(steps_.size()) + 1; }
  bool empty() const { return steps_.empty(); }
  /// Steps belonging to one phase, in order.
  std::vector<const Step*> phase_steps(PhaseId p) const;

 private:
  std::vector<Step> steps_;
};

struct PhaseOutcome {
  PhaseId phase = PhaseId::Search;
  bool success = false;
  std::string summary;
  int steps_used = 0;
};

struct RunBudget {
  int max_actions_per_phase = 25;
  int command_timeout_s = 600;
  int max_threads_reviewed = 10;
};

}  // namespace repoforge
