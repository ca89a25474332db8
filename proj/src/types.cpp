// SPDX-License-Identifier: Apache-2.0
#include "repoforge/types.hpp"

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"

namespace repoforge {

const char* to_string(PhaseId p) {
  switch (p) {
    case PhaseId::Search: return "Search";
    case PhaseId::Setup: return "Setup";
    case PhaseId::Apply: return "Apply";
    case PhaseId::Store: return "Store";
  }
  return "?";
}

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::GithubApiCall: return "GithubApiCall";
    case ActionKind::ShellCommand: return "ShellCommand";
    case ActionKind::FileRead: return "FileRead";
    case ActionKind::FileWrite: return "FileWrite";
    case ActionKind::LlmSubtask: return "LlmSubtask";
    case ActionKind::Submit: return "Submit";
  }
  return "?";
}

const char* to_string(ObsStatus s) {
  switch (s) {
    case ObsStatus::Ok: return "Ok";
    case ObsStatus::Error: return "Error";
    case ObsStatus::Truncated: return "Truncated";
  }
  return "?";
}

PhaseId phase_from_string(const std::string& s) {
  if (s == "Search") return PhaseId::Search;
  if (s == "Setup") return PhaseId::Setup;
  if (s == "Apply") return PhaseId::Apply;
  if (s == "Store") return PhaseId::Store;
  raise(Errc::ConfigInvalid, "unknown phase '" + s + "'");
}

ActionKind action_kind_from_string(const std::string& s) {
  if (s == "GithubApiCall") return ActionKind::GithubApiCall;
  if (s == "ShellCommand") return ActionKind::ShellCommand;
  if (s == "FileRead") return ActionKind::FileRead;
  if (s == "FileWrite") return ActionKind::FileWrite;
  if (s == "LlmSubtask") return ActionKind::LlmSubtask;
  if (s == "Submit") return ActionKind::Submit;
  raise(Errc::UnknownAction, "unknown action kind '" + s + "'");
}

ObsStatus obs_status_from_string(const std::string& s) {
  if (s == "Ok") return ObsStatus::Ok;
  if (s == "Error") return ObsStatus::Error;
  if (s == "Truncated") return ObsStatus::Truncated;
  raise(Errc::ConfigInvalid, "unknown observation status '" + s + "'");
}

const std::vector<PhaseId>& all_phases() {
  static const std::vector<PhaseId> kOrder = {PhaseId::Search, PhaseId::Setup,
                                              PhaseId::Apply, PhaseId::Store};
  return kOrder;
}

std::string Query::digest() const {
  return sha256_hex(text + "\n" + repo_hint.value_or(""));
}

const Step& History::append(Step s) {
  if (s.seq != next_seq())
    raise(Errc::UnknownAction,
          "step seq " + std::to_string(s.seq) + " breaks dense ordering, expected " +
              std::to_string(next_seq()));
  steps_.push_back(std::move(s));
  return steps_.back();
}

std::vector<const Step*> History::phase_steps(PhaseId p) const {
  std::vector<const Step*> out;
  for (const auto& s : steps_)
    if (s.phase == p) out.push_back(&s);
  return out;
}

}  // namespace repoforge
