// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace repoforge {

struct DiffLine {
  char tag = ' ';  // ' ' context, '-' removed, '+' added
  std::string text;
};

struct Hunk {
  long old_start = 0, old_count = 0;
  long new_start = 0, new_count = 0;
  std::vector<DiffLine> lines;
};

struct FilePatch {
  std::string old_path;
  std::string new_path;
  bool new_file = false;  // old side is /dev/null
  bool deleted = false;   // new side is /dev/null
  bool new_missing_final_newline = false;
  std::vector<Hunk> hunks;

  /// The path the patch applies to on disk.
  const std::string& target_path() const { return deleted ? old_path : new_path; }
};

/// Parses a unified diff (git decorations tolerated) into per-file patches.
/// Malformed input raises DiffParse.
std::vector<FilePatch> parse_unified_diff(const std::string& text);

/// Applies one file's hunks to the original content. Hunks that do not match
/// at the stated position are relocated to the nearest exact match; a hunk
/// with no match raises DiffApplyError carrying its 1-based index.
std::string apply_file_patch(const FilePatch& patch, const std::string& original);

}  // namespace repoforge
