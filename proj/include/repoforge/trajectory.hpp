// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "repoforge/types.hpp"

namespace repoforge {

namespace fs = std::filesystem;

/// One line of the run log: either a recorded Step or a control marker (for
/// events like a skipped Setup phase that produce no steps).
struct TrajectoryLine {
  enum class Kind { Step, Marker };
  Kind kind = Kind::Step;
  Step step;           // valid when kind == Step
  std::string marker;  // valid when kind == Marker
  PhaseId phase = PhaseId::Search;
  std::int64_t ts = 0;
};

/// Canonical serialized form (single JSON line, sorted keys, no timestamp
/// variance besides `ts`). parse_trajectory_line(serialize..) is the identity
/// on the line text.
std::string serialize_trajectory_line(const TrajectoryLine& line);
TrajectoryLine parse_trajectory_line(const std::string& text);

/// Rewrites a whole log with every `ts` forced to 0; byte-identical across
/// runs that differ only in wall-clock time.
std::string mask_timestamps(const std::string& log_text);

/// Append-only JSONL writer; flushes after every line so crashes lose at most
/// the line being written.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(fs::path file);
  void write_step(const Step& s);
  void write_marker(PhaseId phase, const std::string& name, std::int64_t ts);
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::vector<TrajectoryLine> read_trajectory(const fs::path& file);

}  // namespace repoforge
