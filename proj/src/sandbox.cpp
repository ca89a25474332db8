// SPDX-License-Identifier: Apache-2.0
#include "repoforge/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <nlohmann/json.hpp>

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"
#include "repoforge/patch.hpp"
#include "repoforge/util.hpp"

extern char** environ;

namespace repoforge {

using nlohmann::json;

// ---- host subprocess helper --------------------------------------------------

std::map<std::string, std::string> scrubbed_env(const fs::path& home) {
  fs::path tmp = home / ".tmp";
  fs::create_directories(tmp);
  return {{"PATH", "/usr/local/bin:/usr/bin:/bin"},
          {"HOME", home.string()},
          {"LANG", "C.UTF-8"},
          {"LC_ALL", "C.UTF-8"},
          {"SHELL", "/bin/sh"},
          {"TMPDIR", tmp.string()}};
}

ExecResult run_argv(const std::vector<std::string>& argv, const fs::path* cwd,
                    const std::map<std::string, std::string>* env, int timeout_s) {
  if (argv.empty()) raise(Errc::EditFailed, "run_argv needs a command");
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    raise(Errc::RuntimeUnavailable, "pipe() failed");

  std::vector<char*> cargv;
  for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  std::vector<std::string> env_storage;
  std::vector<char*> cenv;
  if (env) {
    for (const auto& [k, v] : *env) env_storage.push_back(k + "=" + v);
    for (std::string& s : env_storage) cenv.push_back(s.data());
    cenv.push_back(nullptr);
  }

  auto started = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) raise(Errc::RuntimeUnavailable, "fork() failed");
  if (pid == 0) {
    setpgid(0, 0);  // own group so a timeout can kill the whole command tree
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    if (cwd && chdir(cwd->c_str()) != 0) {
      std::fprintf(stderr, "chdir %s: %s\n", cwd->c_str(), std::strerror(errno));
      _exit(127);
    }
    if (env)
      execvpe(cargv[0], cargv.data(), cenv.data());
    else
      execvp(cargv[0], cargv.data());
    std::fprintf(stderr, "exec %s: %s\n", cargv[0], std::strerror(errno));
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);

  ExecResult result;
  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  bool open_fd[2] = {true, true};
  auto deadline = started + std::chrono::seconds(timeout_s > 0 ? timeout_s : 86400);
  bool killed = false;
  char buf[1 << 16];

  while (open_fd[0] || open_fd[1]) {
    auto now = std::chrono::steady_clock::now();
    long remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    if (remaining <= 0 && !killed) {
      kill(-pid, SIGKILL);
      killed = true;
      result.timed_out = true;
      remaining = 1000;  // drain what the pipes still hold
    }
    for (int i = 0; i < 2; ++i) fds[i].events = open_fd[i] ? POLLIN : 0;
    int rc = poll(fds, 2, static_cast<int>(remaining > 200 ? 200 : remaining));
    if (rc < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (!open_fd[i] || !(fds[i].revents & (POLLIN | POLLHUP))) continue;
      ssize_t got = read(fds[i].fd, buf, sizeof(buf));
      if (got > 0)
        sinks[i]->append(buf, static_cast<std::size_t>(got));
      else if (got == 0 || (got < 0 && errno != EAGAIN && errno != EINTR))
        open_fd[i] = false;
    }
    if (killed && !(fds[0].revents & POLLIN) && !(fds[1].revents & POLLIN)) {
      // After the kill the write ends close as children die; one more sweep
      // per loop is enough, so just let the EOF reads finish.
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  return result;
}

// ---- shared runtime pieces ---------------------------------------------------

namespace {

CommandResult command_result_from(ExecResult r, SpoolStore& spool) {
  CommandResult c;
  c.exit_code = r.timed_out ? -1 : r.exit_code;
  c.timed_out = r.timed_out;
  c.duration_ms = r.duration_ms;
  c.stdout_bytes = r.out.size();
  c.stderr_bytes = r.err.size();
  c.stdout_digest = spool.put(r.out);
  c.stderr_digest = spool.put(r.err);
  c.stdout_text = std::move(r.out);
  c.stderr_text = std::move(r.err);
  return c;
}

}  // namespace

const char* to_string(EditMode m) {
  switch (m) {
    case EditMode::ReplaceWhole: return "ReplaceWhole";
    case EditMode::SearchReplace: return "SearchReplace";
    case EditMode::ApplyDiff: return "ApplyDiff";
  }
  return "?";
}

EditMode edit_mode_from_string(const std::string& s) {
  if (s == "ReplaceWhole") return EditMode::ReplaceWhole;
  if (s == "SearchReplace") return EditMode::SearchReplace;
  if (s == "ApplyDiff") return EditMode::ApplyDiff;
  raise(Errc::EditFailed, "unknown edit mode '" + s + "'");
}

std::string image_tag_for(const std::string& owner, const std::string& name,
                          const std::string& query_digest) {
  auto clean = [](const std::string& s) {
    std::string out;
    for (char ch : to_lower(s)) {
      unsigned char c = static_cast<unsigned char>(ch);
      out += (std::isalnum(c) || c == '.' || c == '_' || c == '-') ? ch : '-';
    }
    return out;
  };
  return "repoforge/" + clean(owner) + "-" + clean(name) + ":" +
         query_digest.substr(0, 8);
}

void SandboxRuntime::require_running(const SandboxHandle& handle) const {
  if (handle.state != SandboxState::Running)
    raise(Errc::SandboxGone, "sandbox " + handle.id + " was destroyed");
}

fs::path SandboxRuntime::host_path(const SandboxHandle& handle,
                                   const std::string& guest) const {
  std::string g = guest;
  const std::string& wd = handle.spec.workdir;
  if (!g.empty() && g[0] == '/') {
    if (g == wd)
      g.clear();
    else if (g.rfind(wd + "/", 0) == 0)
      g = g.substr(wd.size() + 1);
    else
      raise(Errc::PathEscape, "'" + guest + "' is outside the workspace");
  }
  fs::path rel(g);
  for (const fs::path& part : rel)
    if (part == "..")
      raise(Errc::PathEscape, "'" + guest + "' climbs out of the workspace");
  return handle.workspace_host / rel;
}

std::string SandboxRuntime::apply_edit(SandboxHandle& handle, const FileEdit& edit) {
  require_running(handle);
  switch (edit.mode) {
    case EditMode::ReplaceWhole: {
      fs::path p = host_path(handle, edit.path);
      write_file_atomic(p, edit.payload);
      return "wrote " + edit.path + " (" + std::to_string(edit.payload.size()) +
             " bytes)";
    }
    case EditMode::SearchReplace: {
      if (edit.search.empty())
        raise(Errc::EditFailed, "SearchReplace needs a non-empty search pattern");
      fs::path p = host_path(handle, edit.path);
      if (!fs::exists(p))
        raise(Errc::EditFailed, edit.path + " does not exist");
      std::string content = read_file_text(p);
      int found = 0;
      for (std::size_t pos = 0;
           (pos = content.find(edit.search, pos)) != std::string::npos;
           pos += edit.search.size())
        ++found;
      if (found != edit.expected_matches)
        throw MatchCountError(found, edit.expected_matches, edit.path);
      write_file_atomic(p, replace_all(content, edit.search, edit.payload));
      return "replaced " + std::to_string(found) + " occurrence(s) in " + edit.path;
    }
    case EditMode::ApplyDiff: {
      std::vector<FilePatch> patches = parse_unified_diff(edit.payload);
      struct Staged {
        fs::path host;
        std::string guest;
        bool remove = false;
        std::string content;
      };
      std::vector<Staged> staged;
      for (const FilePatch& fp : patches) {
        std::string guest =
            edit.path.empty() ? fp.target_path() : edit.path + "/" + fp.target_path();
        fs::path hp = host_path(handle, guest);
        std::string original;
        if (fs::exists(hp))
          original = read_file_text(hp);
        else if (!fp.new_file)
          raise(Errc::EditFailed, guest + " does not exist for the diff to modify");
        Staged s;
        s.host = hp;
        s.guest = guest;
        if (fp.deleted)
          s.remove = true;
        else
          s.content = apply_file_patch(fp, original);
        staged.push_back(std::move(s));
      }
      // All hunks applied in memory; only now touch the workspace.
      std::vector<std::string> touched;
      for (const Staged& s : staged) {
        if (s.remove)
          fs::remove(s.host);
        else
          write_file_atomic(s.host, s.content);
        touched.push_back(s.guest);
      }
      return "applied diff to " + join(touched, ", ");
    }
  }
  raise(Errc::EditFailed, "unhandled edit mode");
}

// ---- process backend ---------------------------------------------------------

namespace {

/// Filesystem-safe encoding of an image tag (keeps alnum . _ -).
std::string encode_tag(const std::string& tag) {
  std::string out;
  char buf[4];
  for (char ch : tag) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
      out += ch;
    } else {
      std::snprintf(buf, sizeof(buf), "%%%02x", c);
      out += buf;
    }
  }
  return out;
}

fs::path self_exe_dir() {
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return {};
  buf[n] = '\0';
  return fs::path(buf).parent_path();
}

}  // namespace

ProcessSandboxRuntime::ProcessSandboxRuntime(fs::path run_root, fs::path images_dir,
                                             SpoolStore& spool)
    : run_root_(std::move(run_root)), images_dir_(std::move(images_dir)),
      spool_(spool) {
  fs::create_directories(run_root_);
  fs::create_directories(images_dir_);

  if (const char* over = std::getenv("REPOFORGE_JAIL_BIN"); over && *over)
    jail_bin_ = over;
  else if (fs::path d = self_exe_dir(); !d.empty())
    jail_bin_ = d / "repoforge-jail";

  if (!jail_bin_.empty() && fs::exists(jail_bin_)) {
    // One probe decides the mode for this runtime's lifetime.
    fs::path probe_ws = run_root_ / ".probe" / "workspace";
    fs::path probe_root = run_root_ / ".probe" / "jailroot";
    fs::create_directories(probe_ws);
    fs::create_directories(probe_root);
    ExecResult r = run_argv({jail_bin_.string(), "--workspace", probe_ws.string(),
                             "--jail-root", probe_root.string(), "--", "/bin/sh",
                             "-c", "echo jail-ok"},
                            nullptr, nullptr, 20);
    jail_ok_ = r.exit_code == 0 && r.out.find("jail-ok") != std::string::npos;
    std::error_code ec;
    fs::remove_all(run_root_ / ".probe", ec);
  }
}

std::string ProcessSandboxRuntime::isolation() const {
  return jail_ok_ ? "namespace-jail" : "plain-process";
}

SandboxHandle ProcessSandboxRuntime::create(const SandboxSpec& spec) {
  SandboxHandle h;
  h.id = "sb" + std::to_string(++counter_);
  h.spec = spec;
  h.workspace_host = run_root_ / h.id / "workspace";
  fs::create_directories(h.workspace_host);
  return h;
}

void ProcessSandboxRuntime::destroy(SandboxHandle& handle) {
  handle.state = SandboxState::Destroyed;  // workspace stays for inspection
}

CommandResult ProcessSandboxRuntime::exec(SandboxHandle& handle,
                                          const std::string& command,
                                          int timeout_s) {
  require_running(handle);
  ExecResult r;
  if (jail_ok_) {
    fs::path jail_root = run_root_ / handle.id / "jailroot";
    fs::create_directories(jail_root);
    std::vector<std::string> argv = {jail_bin_.string(), "--workspace",
                                     handle.workspace_host.string(), "--jail-root",
                                     jail_root.string()};
    if (!handle.spec.network_enabled) argv.push_back("--no-net");
    for (const Mount& m : handle.spec.mounts)
      argv.push_back("--bind=" + std::string(m.read_only ? "ro" : "rw") + ":" +
                     m.host.string() + ":" + m.guest);
    argv.insert(argv.end(), {"--", "/bin/sh", "-c", command});
    r = run_argv(argv, nullptr, nullptr, timeout_s);
  } else {
    auto env = scrubbed_env(handle.workspace_host);
    fs::path cwd = handle.workspace_host;
    r = run_argv({"/bin/sh", "-c", command}, &cwd, &env, timeout_s);
  }

  return command_result_from(r, spool_);
}

fs::path ProcessSandboxRuntime::image_dir(const std::string& tag) const {
  return images_dir_ / encode_tag(tag);
}

ImageRef ProcessSandboxRuntime::commit_image(SandboxHandle& handle,
                                             const std::string& tag) {
  require_running(handle);
  fs::path dir = image_dir(tag);
  std::error_code ec;
  fs::remove_all(dir, ec);  // committing the same tag again replaces it
  try {
    copy_tree(handle.workspace_host, dir / "tree");
  } catch (const std::exception& e) {
    raise(Errc::CommitFailed, std::string("snapshot failed: ") + e.what());
  }
  ImageRef ref{tag, now_ms()};
  json meta = {{"tag", tag}, {"created_at_ms", ref.created_at_ms}};
  write_file_atomic(dir / "meta.json", meta.dump());
  return ref;
}

SandboxHandle ProcessSandboxRuntime::restore_image(const std::string& tag,
                                                   const SandboxSpec& spec) {
  fs::path dir = image_dir(tag);
  if (!fs::is_directory(dir / "tree"))
    raise(Errc::ImageNotFound, "no committed image '" + tag + "'");
  SandboxHandle h = create(spec);
  copy_tree(dir / "tree", h.workspace_host);
  return h;
}

bool ProcessSandboxRuntime::image_exists(const std::string& tag) const {
  return fs::is_directory(image_dir(tag) / "tree");
}

// ---- docker backend ----------------------------------------------------------

DockerSandboxRuntime::DockerSandboxRuntime(fs::path run_root, SpoolStore& spool)
    : run_root_(std::move(run_root)), spool_(spool) {
  if (!available())
    raise(Errc::RuntimeUnavailable, "docker daemon is not reachable");
  fs::create_directories(run_root_);
}

bool DockerSandboxRuntime::available() {
  static int cached = -1;
  if (cached < 0) {
    ExecResult r = run_argv({"docker", "info"}, nullptr, nullptr, 10);
    cached = r.exit_code == 0 ? 1 : 0;
  }
  return cached == 1;
}

SandboxHandle DockerSandboxRuntime::create(const SandboxSpec& spec) {
  SandboxHandle h;
  h.id = "sb" + std::to_string(++counter_);
  h.spec = spec;
  h.workspace_host = run_root_ / h.id / "workspace";
  fs::create_directories(h.workspace_host);
  std::vector<std::string> argv = {"docker", "run", "-d",
                                   "-v", h.workspace_host.string() + ":" + spec.workdir,
                                   "-w", spec.workdir};
  if (!spec.network_enabled) {
    argv.push_back("--network");
    argv.push_back("none");
  }
  for (const Mount& m : spec.mounts) {
    argv.push_back("-v");
    argv.push_back(m.host.string() + ":" + m.guest + (m.read_only ? ":ro" : ""));
  }
  argv.insert(argv.end(), {spec.base_image, "sleep", "infinity"});
  ExecResult r = run_argv(argv, nullptr, nullptr, 120);
  if (r.exit_code != 0)
    raise(Errc::RuntimeUnavailable,
          "docker run failed: " + clip_bytes(r.err, 300, true));
  h.backend_ref = trim(r.out);
  return h;
}

void DockerSandboxRuntime::destroy(SandboxHandle& handle) {
  if (handle.state == SandboxState::Destroyed) return;
  if (!handle.backend_ref.empty())
    run_argv({"docker", "rm", "-f", handle.backend_ref}, nullptr, nullptr, 60);
  handle.state = SandboxState::Destroyed;
}

CommandResult DockerSandboxRuntime::exec(SandboxHandle& handle,
                                         const std::string& command, int timeout_s) {
  require_running(handle);
  ExecResult r = run_argv({"docker", "exec", handle.backend_ref, "/bin/sh", "-c",
                           command},
                          nullptr, nullptr, timeout_s);
  return command_result_from(std::move(r), spool_);
}

ImageRef DockerSandboxRuntime::commit_image(SandboxHandle& handle,
                                            const std::string& tag) {
  require_running(handle);
  ExecResult r = run_argv({"docker", "commit", handle.backend_ref, tag}, nullptr,
                          nullptr, 300);
  if (r.exit_code != 0)
    raise(Errc::CommitFailed, "docker commit failed: " + clip_bytes(r.err, 300, true));
  return ImageRef{tag, now_ms()};
}

SandboxHandle DockerSandboxRuntime::restore_image(const std::string& tag,
                                                  const SandboxSpec& spec) {
  if (!image_exists(tag))
    raise(Errc::ImageNotFound, "no committed image '" + tag + "'");
  SandboxSpec restored = spec;
  restored.base_image = tag;
  return create(restored);
}

bool DockerSandboxRuntime::image_exists(const std::string& tag) const {
  ExecResult r = run_argv({"docker", "image", "inspect", tag}, nullptr, nullptr, 30);
  return r.exit_code == 0;
}

std::unique_ptr<SandboxRuntime> make_sandbox_runtime(const std::string& backend,
                                                     const fs::path& run_root,
                                                     const fs::path& images_dir,
                                                     SpoolStore& spool) {
  if (backend == "docker")
    return std::make_unique<DockerSandboxRuntime>(run_root, spool);
  if (backend == "process")
    return std::make_unique<ProcessSandboxRuntime>(run_root, images_dir, spool);
  if (backend == "auto") {
    if (DockerSandboxRuntime::available())
      return std::make_unique<DockerSandboxRuntime>(run_root, spool);
    return std::make_unique<ProcessSandboxRuntime>(run_root, images_dir, spool);
  }
  raise(Errc::ConfigInvalid, "unknown sandbox backend '" + backend + "'");
}

}  // namespace repoforge
