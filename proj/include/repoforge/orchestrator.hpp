// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repoforge/experience.hpp"
#include "repoforge/github.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/sandbox.hpp"
#include "repoforge/spool.hpp"
#include "repoforge/store.hpp"
#include "repoforge/trajectory.hpp"
#include "repoforge/types.hpp"

namespace repoforge {

/// Everything the phase functions act through.
struct EngineServices {
  Gateway& gateway;
  RepoHost& host;
  SandboxRuntime& sandbox;
  RepoStore& store;
  SpoolStore& spool;
  ExperienceEngine& experience;
  RunBudget budget;
  bool sandbox_network = true;
  int retry_limit = 3;
};

/// Per-phase recording context: appends to the shared run history, writes the
/// trajectory log, and enforces the per-phase action budget.
class TrajectoryContext : public StepSink {
 public:
  TrajectoryContext(PhaseId phase, History& history, TrajectoryWriter* writer,
                    SpoolStore& spool, int max_actions);

  const Step& record(Action action, std::string payload, ObsStatus status) override;
  void marker(const std::string& name);
  int actions_used() const { return used_; }
  /// Throws PhaseBudgetExceeded when every action slot is spent.
  void require_budget() const;
  PhaseId phase() const { return phase_; }
  History& history() { return history_; }

 private:
  PhaseId phase_;
  History& history_;
  TrajectoryWriter* writer_;  // optional (tests)
  SpoolStore& spool_;
  int max_actions_;
  int used_ = 0;
};

/// Where the toolset for a query comes from.
struct SearchResult {
  RepoRef ref;
  bool from_store = false;           // true -> Setup phase is skipped
  std::optional<RepoRecord> record;  // present when from_store
  std::string readme;                // fetched for fresh repositories
};

struct SetupResult {
  SandboxHandle handle;  // workspace with the repository materialized
  std::string repo_dir;  // guest path of the working tree
  bool success = false;
};

struct ApplyResult {
  bool success = false;
  std::string answer;
  std::vector<std::string> artifacts;  // workspace-relative paths
  std::string summary;
};

struct StoreResult {
  bool success = false;
  bool skipped = false;
  ImageRef image;
  std::string function_description;
  std::string experience;
};

// The four phase procedures. Each records every step through `ctx` and throws
// phase-level errors (NoSuitableRepository / SetupFailed / ...) on failure.
SearchResult run_search_phase(EngineServices& s, const Query& q,
                              TrajectoryContext& ctx);
SetupResult run_setup_phase(EngineServices& s, const Query& q,
                            const SearchResult& found, TrajectoryContext& ctx);
ApplyResult run_apply_phase(EngineServices& s, const Query& q,
                            const SearchResult& found, SetupResult& setup,
                            TrajectoryContext& ctx);
StoreResult run_store_phase(EngineServices& s, const Query& q,
                            const SearchResult& found, SetupResult& setup,
                            const ApplyResult& applied, TrajectoryContext& ctx);

/// Machine-readable outcome of one query run. Serializes with a stable field
/// order and only run-relative paths, so two identical runs emit identical
/// bytes.
struct FinalReport {
  bool success = false;
  std::string repo_full_name;
  bool reused_stored = false;
  std::string answer;
  std::vector<std::string> artifacts;
  std::vector<PhaseOutcome> phases;
  std::string failure_reason;    // empty on success
  std::string trajectory_file;   // name relative to the run directory
  std::string isolation;         // sandbox isolation actually in effect
  std::string cost_json;         // CostLedger snapshot

  std::string to_json_text() const;
};

struct RunPaths {
  fs::path run_dir;
  fs::path trajectory;      // run_dir / "trajectory.jsonl"
  fs::path report;          // run_dir / "report.json"
  fs::path workspace_root;  // run_dir / "workspaces"
};

/// Drives one query through Search -> Setup -> Apply -> Store, writing
/// trajectory.jsonl and report.json under the run directory.
class Orchestrator {
 public:
  Orchestrator(EngineServices services, fs::path run_dir);
  FinalReport run_query(const Query& q);
  const RunPaths& paths() const { return paths_; }

 private:
  EngineServices services_;
  RunPaths paths_;
};

/// Step payload for an executed command: full streams plus the exit line, in
/// tail-survivable order (stdout, stderr, exit last).
std::string compose_command_payload(const CommandResult& r);

}  // namespace repoforge
