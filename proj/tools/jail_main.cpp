// SPDX-License-Identifier: Apache-2.0
//
// repoforge-jail: builds a throwaway user-namespace root and runs one command
// inside it. The workspace directory is the only writable host path; system
// directories are read-only bind mounts; everything else lives in a tmpfs
// that vanishes with the process. Needs no privileges beyond unprivileged
// user namespaces.
//
//   repoforge-jail --workspace DIR --jail-root DIR [--no-net]
//                  [--bind=ro|rw:HOST:GUEST]... -- PROG ARGS...
//
// Exit 125 means the jail itself could not be built (the caller falls back
// to plain subprocesses); any other status is the command's own.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <sched.h>
#include <string>
#include <sys/mount.h>
#include <sys/stat.h>
#include <sys/syscall.h>
#include <unistd.h>
#include <vector>

namespace {

constexpr int kJailFailure = 125;

[[noreturn]] void die(const char* what) {
  std::fprintf(stderr, "repoforge-jail: %s: %s\n", what, std::strerror(errno));
  std::exit(kJailFailure);
}

void write_text(const char* path, const std::string& text, const char* what) {
  int fd = open(path, O_WRONLY);
  if (fd < 0) die(what);
  ssize_t n = write(fd, text.c_str(), text.size());
  if (n != static_cast<ssize_t>(text.size())) die(what);
  close(fd);
}

void mkdir_p(const std::string& path) {
  std::string cur;
  for (std::size_t i = 0; i < path.size(); ++i) {
    cur += path[i];
    if (path[i] == '/' && cur.size() > 1) {
      if (mkdir(cur.c_str(), 0755) != 0 && errno != EEXIST) die("mkdir");
    }
  }
  if (mkdir(path.c_str(), 0755) != 0 && errno != EEXIST) die("mkdir");
}

void bind_dir(const std::string& src, const std::string& dst, bool read_only) {
  mkdir_p(dst);
  if (mount(src.c_str(), dst.c_str(), nullptr, MS_BIND | MS_REC, nullptr) != 0)
    die("bind mount");
  if (read_only &&
      mount(nullptr, dst.c_str(), nullptr,
            MS_REMOUNT | MS_BIND | MS_RDONLY | MS_NOSUID, nullptr) != 0)
    die("read-only remount");
}

void bind_dev_node(const std::string& root, const char* name) {
  std::string src = std::string("/dev/") + name;
  std::string dst = root + "/dev/" + name;
  int fd = open(dst.c_str(), O_WRONLY | O_CREAT, 0666);
  if (fd < 0) return;  // best effort
  close(fd);
  mount(src.c_str(), dst.c_str(), nullptr, MS_BIND, nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  std::string workspace, jail_root;
  bool no_net = false;
  struct ExtraBind {
    std::string host, guest;
    bool read_only;
  };
  std::vector<ExtraBind> extra;
  int cmd_start = -1;

  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--workspace" && i + 1 < argc) {
      workspace = argv[++i];
    } else if (arg == "--jail-root" && i + 1 < argc) {
      jail_root = argv[++i];
    } else if (arg == "--no-net") {
      no_net = true;
    } else if (arg.rfind("--bind=", 0) == 0) {
      std::string v = arg.substr(7);
      auto c1 = v.find(':');
      auto c2 = v.find(':', c1 == std::string::npos ? v.size() : c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) {
        std::fprintf(stderr, "repoforge-jail: bad --bind '%s'\n", v.c_str());
        return kJailFailure;
      }
      extra.push_back({v.substr(c1 + 1, c2 - c1 - 1), v.substr(c2 + 1),
                       v.substr(0, c1) == "ro"});
    } else if (arg == "--") {
      cmd_start = i + 1;
      break;
    } else {
      std::fprintf(stderr, "repoforge-jail: unknown argument '%s'\n", arg.c_str());
      return kJailFailure;
    }
  }
  if (workspace.empty() || jail_root.empty() || cmd_start < 0 || cmd_start >= argc) {
    std::fprintf(stderr,
                 "usage: repoforge-jail --workspace DIR --jail-root DIR "
                 "[--no-net] [--bind=ro|rw:HOST:GUEST]... -- PROG ARGS...\n");
    return kJailFailure;
  }

  uid_t uid = getuid();
  gid_t gid = getgid();

  int flags = CLONE_NEWUSER | CLONE_NEWNS;
  if (no_net) flags |= CLONE_NEWNET;
  if (unshare(flags) != 0) die("unshare");

  // Map this user to root inside the namespace so mounts are permitted.
  write_text("/proc/self/setgroups", "deny", "setgroups");
  write_text("/proc/self/uid_map", "0 " + std::to_string(uid) + " 1", "uid_map");
  write_text("/proc/self/gid_map", "0 " + std::to_string(gid) + " 1", "gid_map");

  // Fresh tmpfs becomes the new root; everything under it dies with us.
  mkdir_p(jail_root);
  if (mount("tmpfs", jail_root.c_str(), "tmpfs", 0, "mode=0755") != 0)
    die("tmpfs mount");

  for (const char* d : {"/usr", "/bin", "/sbin", "/lib", "/lib64", "/etc",
                        "/lib32", "/libx32"}) {
    struct stat st;
    if (stat(d, &st) != 0) continue;
    bind_dir(d, jail_root + d, /*read_only=*/true);
  }

  mkdir_p(jail_root + "/dev");
  for (const char* node : {"null", "zero", "full", "urandom", "random", "tty"})
    bind_dev_node(jail_root, node);

  for (const ExtraBind& b : extra) {
    if (b.guest.empty() || b.guest[0] != '/') {
      std::fprintf(stderr, "repoforge-jail: guest bind path must be absolute\n");
      return kJailFailure;
    }
    bind_dir(b.host, jail_root + b.guest, b.read_only);
  }

  bind_dir(workspace, jail_root + "/workspace", /*read_only=*/false);

  mkdir_p(jail_root + "/tmp");
  chmod((jail_root + "/tmp").c_str(), 01777);

  // No PID namespace, so this usually fails with EPERM; tools cope without it.
  mkdir_p(jail_root + "/proc");
  mount("proc", (jail_root + "/proc").c_str(), "proc", 0, nullptr);

  mkdir_p(jail_root + "/.oldroot");
  if (syscall(SYS_pivot_root, jail_root.c_str(), (jail_root + "/.oldroot").c_str()) !=
      0)
    die("pivot_root");
  if (chdir("/") != 0) die("chdir /");
  if (umount2("/.oldroot", MNT_DETACH) != 0) die("umount old root");
  rmdir("/.oldroot");

  if (chdir("/workspace") != 0) die("chdir workspace");

  // The command starts from a clean, fixed environment.
  clearenv();
  setenv("PATH", "/usr/local/bin:/usr/bin:/bin", 1);
  setenv("HOME", "/workspace", 1);
  setenv("PWD", "/workspace", 1);
  setenv("TMPDIR", "/tmp", 1);
  setenv("LANG", "C.UTF-8", 1);
  setenv("LC_ALL", "C.UTF-8", 1);
  setenv("SHELL", "/bin/sh", 1);

  execvp(argv[cmd_start], argv + cmd_start);
  die("exec");
}
