// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "repoforge/spool.hpp"

namespace repoforge {

namespace fs = std::filesystem;

struct Mount {
  fs::path host;
  std::string guest;
  bool read_only = true;
};

struct SandboxSpec {
  std::string base_image = "ubuntu:22.04";  // docker backend only
  std::string workdir = "/workspace";
  std::vector<Mount> mounts;
  bool network_enabled = true;
};

enum class SandboxState { Running, Destroyed };

struct SandboxHandle {
  std::string id;
  SandboxSpec spec;
  SandboxState state = SandboxState::Running;
  fs::path workspace_host;  // host directory bound at spec.workdir
  std::string backend_ref;  // docker container id; empty for process backend
};

struct CommandResult {
  int exit_code = 0;
  bool timed_out = false;
  std::int64_t duration_ms = 0;
  // Full stream texts; observation building applies the tail-keep cap. The
  // streams are also in the spool under these digests, so oversized output
  // stays recoverable after the trajectory truncates it.
  std::string stdout_text;
  std::string stderr_text;
  std::uint64_t stdout_bytes = 0;
  std::uint64_t stderr_bytes = 0;
  std::string stdout_digest;
  std::string stderr_digest;

  bool ok() const { return exit_code == 0 && !timed_out; }
};

enum class EditMode { ReplaceWhole, SearchReplace, ApplyDiff };
const char* to_string(EditMode m);
EditMode edit_mode_from_string(const std::string& s);

/// One atomic file modification inside the sandbox workspace.
struct FileEdit {
  /// ReplaceWhole / SearchReplace: the target file (workdir-relative).
  /// ApplyDiff: the directory the diff's paths are relative to ("" = workdir).
  std::string path;
  EditMode mode = EditMode::ReplaceWhole;
  std::string payload;      // ReplaceWhole: content; SearchReplace: replacement;
                            // ApplyDiff: unified diff (may cover several files)
  std::string search;       // SearchReplace only
  int expected_matches = 1; // SearchReplace only
};

struct ImageRef {
  std::string tag;
  std::int64_t created_at_ms = 0;
};

/// Committed-image tag: repoforge/<owner>-<name>:<first 8 of query digest>.
std::string image_tag_for(const std::string& owner, const std::string& name,
                          const std::string& query_digest);

/// Isolated execution environment for repository code. Every write lands in
/// the sandbox workspace; the host tree is never touched.
class SandboxRuntime {
 public:
  virtual ~SandboxRuntime() = default;

  virtual SandboxHandle create(const SandboxSpec& spec) = 0;
  /// Idempotent; a destroyed handle refuses further operations (SandboxGone).
  virtual void destroy(SandboxHandle& handle) = 0;
  virtual CommandResult exec(SandboxHandle& handle, const std::string& command,
                             int timeout_s) = 0;
  virtual ImageRef commit_image(SandboxHandle& handle, const std::string& tag) = 0;
  virtual SandboxHandle restore_image(const std::string& tag,
                                      const SandboxSpec& spec) = 0;
  virtual bool image_exists(const std::string& tag) const = 0;
  /// "namespace-jail", "plain-process" or "docker" — what actually guards
  /// the host on this machine.
  virtual std::string isolation() const = 0;

  /// Applies one edit atomically (all target files or none). Returns a
  /// one-line summary. Throws PathEscape / MatchCountError / DiffApplyError.
  std::string apply_edit(SandboxHandle& handle, const FileEdit& edit);

  /// Maps a guest path to the host workspace file, rejecting escapes.
  fs::path host_path(const SandboxHandle& handle, const std::string& guest) const;

 protected:
  void require_running(const SandboxHandle& handle) const;
};

/// Runs repository code as host subprocesses, jailed into a user-namespace
/// root built by the repoforge-jail helper when the kernel allows it, plain
/// scrubbed subprocesses otherwise. Images are workspace snapshots on disk.
class ProcessSandboxRuntime : public SandboxRuntime {
 public:
  ProcessSandboxRuntime(fs::path run_root, fs::path images_dir, SpoolStore& spool);

  SandboxHandle create(const SandboxSpec& spec) override;
  void destroy(SandboxHandle& handle) override;
  CommandResult exec(SandboxHandle& handle, const std::string& command,
                     int timeout_s) override;
  ImageRef commit_image(SandboxHandle& handle, const std::string& tag) override;
  SandboxHandle restore_image(const std::string& tag,
                              const SandboxSpec& spec) override;
  bool image_exists(const std::string& tag) const override;
  std::string isolation() const override;

  const fs::path& jail_binary() const { return jail_bin_; }

 private:
  fs::path image_dir(const std::string& tag) const;
  fs::path run_root_;
  fs::path images_dir_;
  SpoolStore& spool_;
  fs::path jail_bin_;
  bool jail_ok_ = false;
  int counter_ = 0;
};

/// Container-backed runtime driving the docker CLI. Probe with available().
class DockerSandboxRuntime : public SandboxRuntime {
 public:
  DockerSandboxRuntime(fs::path run_root, SpoolStore& spool);
  static bool available();

  SandboxHandle create(const SandboxSpec& spec) override;
  void destroy(SandboxHandle& handle) override;
  CommandResult exec(SandboxHandle& handle, const std::string& command,
                     int timeout_s) override;
  ImageRef commit_image(SandboxHandle& handle, const std::string& tag) override;
  SandboxHandle restore_image(const std::string& tag,
                              const SandboxSpec& spec) override;
  bool image_exists(const std::string& tag) const override;
  std::string isolation() const override { return "docker"; }

 private:
  fs::path run_root_;
  SpoolStore& spool_;
  int counter_ = 0;
};

/// Picks a backend: "docker", "process", or "auto" (docker when available).
std::unique_ptr<SandboxRuntime> make_sandbox_runtime(const std::string& backend,
                                                     const fs::path& run_root,
                                                     const fs::path& images_dir,
                                                     SpoolStore& spool);

// ---- host subprocess helper (used by both backends) -------------------------

struct ExecResult {
  int exit_code = -1;
  bool timed_out = false;
  std::int64_t duration_ms = 0;
  std::string out;
  std::string err;
};

/// fork/exec with piped stdio, optional cwd and a fully replaced environment;
/// kills the whole process group on timeout and attaches partial output.
ExecResult run_argv(const std::vector<std::string>& argv, const fs::path* cwd,
                    const std::map<std::string, std::string>* env, int timeout_s);

/// Environment a sandboxed command sees (plain mode; the jail sets its own).
std::map<std::string, std::string> scrubbed_env(const fs::path& home);

}  // namespace repoforge
