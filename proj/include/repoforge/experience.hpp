// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "repoforge/github.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/types.hpp"

namespace repoforge {

/// Where recorded steps go. The orchestrator's trajectory context implements
/// this; subsystems that produce steps depend only on the interface.
class StepSink {
 public:
  virtual ~StepSink() = default;
  /// Records one step and returns it. The sink assigns seq/phase and applies
  /// the observation sizing policy (spooling + tail truncation) to `payload`.
  virtual const Step& record(Action action, std::string payload,
                             ObsStatus status) = 0;
};

/// A failing command distilled into searchable words.
struct ProblemStatement {
  std::string statement;  // model-abstracted description
  std::string command;    // the command that failed
  std::string error;      // its error output (tail)
};

/// Outcome of judging one issue / pull-request thread against a problem.
struct ThreadJudgment {
  int thread_id = 0;
  ThreadKind kind = ThreadKind::Issue;
  bool applicable = false;
  std::string solution;  // model's summary of the fix
  std::string diff;      // whole-PR unified diff (PullRequest threads only)
  std::string title;
};

/// Learns from repository history: turns failures into search problems, walks
/// ranked issue / PR threads until one applies, and distills finished runs
/// into stored descriptions and experience notes.
class ExperienceEngine {
 public:
  ExperienceEngine(Gateway& gateway, RepoHost& host, RunBudget budget);

  /// Abstracts a failing command + error into a problem statement usable as
  /// thread search terms.
  ProblemStatement summarize_problem(const Query& query, const std::string& command,
                                     const std::string& error);

  /// Reviews up to max_threads_reviewed ranked threads of one kind, recording
  /// one judgment step per thread, and stops at the first applicable one.
  std::optional<ThreadJudgment> explore_threads(const RepoRef& ref,
                                                const std::string& problem,
                                                ThreadKind kind, StepSink* sink);

  /// explore_threads for `first`, then for the other kind if nothing applied.
  std::optional<ThreadJudgment> find_fix(const RepoRef& ref,
                                         const std::string& problem,
                                         ThreadKind first, StepSink* sink);

  /// One-paragraph statement of what the repository does for this query.
  std::string describe_function(const RepoRef& ref, const Query& query,
                                const History& history);

  /// Reusable notes on how the run went (pitfalls, fixes, working commands).
  std::string summarize_experience(const RepoRef& ref, const Query& query,
                                   const History& history);

  /// Compact one-line-per-step rendering of a trajectory tail for prompts:
  /// "#seq Kind k=v ... -> Status: payload" with payload newlines flattened.
  static std::string render_history_tail(const History& history,
                                         std::size_t max_bytes = 6000);

 private:
  Gateway& gateway_;
  RepoHost& host_;
  RunBudget budget_;
};

}  // namespace repoforge
