// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "repoforge/scenario.hpp"

namespace repoforge {

namespace fs = std::filesystem;

/// Outcome of one scenario execution.
struct RunRecord {
  std::string scenario;
  int repeat = 0;
  bool success = false;  // what the engine reported
  bool passed = false;   // expectations + cost exactness all held
  std::vector<std::string> failures;
  std::string repo;
  bool reused_stored = false;
  std::int64_t llm_calls = 0;
  std::int64_t retries = 0;
  std::int64_t total_tokens = 0;
  std::int64_t scripted_served = 0;  // rules the scripted backend answered
  /// sha256 of the timestamp-masked trajectory; equal across repeats iff the
  /// run is deterministic.
  std::string masked_trajectory_digest;

  std::string to_json_text() const;  // one JSONL line
};

struct ScenarioStats {
  std::string name;
  int runs = 0;
  int engine_successes = 0;
  int passes = 0;
  bool deterministic = true;
  std::vector<double> llm_calls;
};

struct EvalSummary {
  int scenarios = 0;
  int runs = 0;
  int passes = 0;
  double pass_pct = 0.0;         // one-decimal percentage, half-up
  double precision_at_1 = 0.0;   // scenarios whose selected repo matched, in %
  bool deterministic = true;
  std::vector<ScenarioStats> per_scenario;

  bool all_green() const { return passes == runs && deterministic; }
  std::string table_text() const;
  std::string to_json_text() const;
};

/// Offline evaluation loop: runs every scenario `repeats` times against the
/// fixture corpus, writes records.jsonl + summary.json under out_dir, and
/// aggregates success, cost and determinism.
class Harness {
 public:
  Harness(fs::path scenarios_dir, fs::path corpus_dir, fs::path out_dir,
          int repeats = 1, std::string sandbox_backend = "process");

  RunRecord run_one(const Scenario& scenario, int repeat);
  EvalSummary run_all();

 private:
  fs::path scenarios_dir_;
  fs::path corpus_dir_;
  fs::path out_dir_;
  int repeats_;
  std::string sandbox_backend_;
};

}  // namespace repoforge
