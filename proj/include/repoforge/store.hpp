// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "repoforge/github.hpp"
#include "repoforge/sandbox.hpp"

namespace repoforge {

/// A repository the engine has used successfully: where it lives, the
/// committed environment image, what it does, and how it behaved in practice.
struct RepoRecord {
  RepoRef ref;
  ImageRef image;
  std::string function_description;
  std::string experience;
  std::string query_digest;  // digest of the query the record was built for
  std::int64_t created_at_ms = 0;
  bool stale = false;  // set by list() when the image no longer resolves
};

std::string record_to_json_text(const RepoRecord& r);
RepoRecord record_from_json_text(const std::string& text);

/// Crash-safe store: an append-only JSONL index plus content-addressed record
/// blobs. A put is blob-write+rename followed by an index append, so a crash
/// at any point leaves either the old or the new state, never a torn record.
/// A torn final index line is ignored on read and trimmed on the next write.
class RepoStore {
 public:
  explicit RepoStore(fs::path root);

  void put(const RepoRecord& r);  // upsert keyed by (full_name, query_digest)
  bool remove(const std::string& full_name, const std::string& query_digest);
  std::optional<RepoRecord> get(const std::string& full_name,
                                const std::string& query_digest) const;
  /// Live records, most recently written first.
  std::vector<RepoRecord> list() const;
  /// Same, with stale flags resolved through an image-existence probe.
  std::vector<RepoRecord> list(
      const std::function<bool(const std::string& tag)>& image_exists) const;
  std::size_t size() const;
  const fs::path& root() const { return root_; }

  /// Test seam: invoked with an operation name right before every I/O step of
  /// put()/remove(); throwing from it simulates a crash at that point.
  using IoHook = std::function<void(const std::string& op)>;
  void set_io_hook(IoHook hook) { hook_ = std::move(hook); }

 private:
  void io_point(const char* op) const;
  /// Index text up to and including the last complete, parseable line.
  std::string good_index_prefix() const;
  void append_index_line(const std::string& line);

  fs::path root_;
  fs::path index_path_;
  fs::path blobs_dir_;
  IoHook hook_;
};

}  // namespace repoforge
