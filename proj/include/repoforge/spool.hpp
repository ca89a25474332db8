// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "repoforge/types.hpp"

namespace repoforge {

namespace fs = std::filesystem;

/// Content-addressed blob directory. Full observation payloads and oversized
/// command streams are parked here so trajectory lines stay small while
/// nothing is ever lost.
class SpoolStore {
 public:
  explicit SpoolStore(fs::path dir);

  /// Stores bytes under their sha256; returns the digest. Idempotent.
  std::string put(std::string_view bytes);
  bool has(const std::string& digest) const;
  std::string read(const std::string& digest) const;  // NotFound if absent
  fs::path path_for(const std::string& digest) const;
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
};

/// Observation sizing policy: payloads above this keep only the trailing
/// kObservationKeepBytes bytes inline; the full payload goes to the spool.
inline constexpr std::size_t kObservationKeepBytes = 8192;
/// A single spooled stream larger than this triggers long-context processing.
inline constexpr std::size_t kLongContextThresholdBytes = 32768;
/// Template bindings are clipped to this many bytes at render time.
inline constexpr std::size_t kBindingCapBytes = 16384;

/// Builds an Observation from a raw payload under the sizing policy and spools
/// the full payload.
Observation make_observation(SpoolStore& spool, std::string payload,
                             ObsStatus status);

}  // namespace repoforge
