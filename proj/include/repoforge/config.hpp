// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "repoforge/github.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/types.hpp"

namespace repoforge {

namespace fs = std::filesystem;

/// Engine configuration, loaded from a JSON file. Relative paths inside the
/// file resolve against the file's own directory.
struct RunConfig {
  std::string mode = "fixture";  // "fixture" (offline corpus) | "live" (REST)
  fs::path corpus_dir;           // fixture mode: FixtureCorpus root
  std::string llm_backend = "scripted";  // "scripted" | "http"
  fs::path script_file;                  // scripted backend rule file
  HttpBackendConfig http;                // http backend settings
  RestHostConfig rest;                   // live GitHub settings
  std::string sandbox_backend = "auto";  // "process" | "docker" | "auto"
  bool sandbox_network = true;
  fs::path state_dir = "state";  // store/, images/, spool/, runs/ live here
  RunBudget budget;
  int retry_limit = 3;

  static RunConfig load(const fs::path& file);  // ConfigInvalid on any defect
  /// Structural checks beyond parsing (modes known, required paths present).
  void validate() const;
};

}  // namespace repoforge
