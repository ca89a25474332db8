// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repoforge/store.hpp"
#include "repoforge/types.hpp"

namespace repoforge {

namespace fs = std::filesystem;

/// What must hold after a scenario run for it to pass.
struct Expectation {
  bool success = true;
  std::string repo;                          // "" = no expectation
  std::optional<bool> reused_stored;
  std::vector<std::string> answer_contains;  // substrings of the final answer
  std::vector<std::string> artifacts;        // workspace-relative outputs
  std::vector<std::string> markers;          // trajectory markers that must appear
  std::string failure_contains;              // substring of failure_reason
};

/// A record to preload into the repository store before the run, optionally
/// with a directory tree to commit as its environment image.
struct SeedRecord {
  RepoRecord record;
  fs::path image_tree;  // empty = no image (record will look stale)
};

/// One self-contained offline test case: a query, a scripted model playbook,
/// optional store seeds, and the expected outcome.
struct Scenario {
  std::string name;
  std::string description;
  Query query;
  fs::path dir;          // scenario directory
  fs::path script_file;  // scripted-backend rules
  Expectation expect;
  std::vector<SeedRecord> seeds;

  /// Reads <dir>/scenario.json; throws ScenarioInvalid on any defect.
  static Scenario load(const fs::path& dir);
};

/// All scenarios under a directory (one subdirectory each), sorted by name.
std::vector<Scenario> load_scenarios(const fs::path& root);

}  // namespace repoforge
