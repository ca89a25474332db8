// SPDX-License-Identifier: Apache-2.0
// Command-line front end: argument handling, exit codes, and the text each
// subcommand prints. cli_main is driven in-process with captured streams.
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "repoforge/cli.hpp"
#include "repoforge/util.hpp"

using namespace repoforge;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(REPOFORGE_SOURCE_DIR) / "fixtures" / "scenarios";
const fs::path kCorpus = fs::path(REPOFORGE_SOURCE_DIR) / "fixtures" / "corpus";

struct Arena {
  fs::path root;
  explicit Arena(const std::string& tag) {
    root = fs::temp_directory_path() /
           ("repoforge-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Arena() { fs::remove_all(root); }
};

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "repoforge");
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (auto& a : args) argv.push_back(a.data());

  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  try {
    r.code = cli_main(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("--version and --help succeed; bare invocation is a usage error") {
  CliResult v = run_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == "repoforge 0.1.0\n");

  CliResult h = run_cli({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("run") != std::string::npos);
  CHECK(h.out.find("eval") != std::string::npos);

  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"eval", "--scenarios", kScenarios.string()}).code == 2);  // missing --corpus
}

TEST_CASE("fixtures validate reports corpus health") {
  CliResult ok = run_cli({"fixtures", "validate", "--corpus", kCorpus.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out == "corpus ok: 5 repositories\n");

  Arena a("clifx");
  CliResult bad =
      run_cli({"fixtures", "validate", "--corpus", (a.root / "nowhere").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("problem: corpus root is not a directory") != std::string::npos);
}

TEST_CASE("config defects exit with code 2 and a pointed message") {
  Arena a("clicfg");
  CliResult missing = run_cli(
      {"run", "--config", (a.root / "none.json").string(), "--query", "q"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("config file not found") != std::string::npos);

  write_file_atomic(a.root / "bad.json", R"({"mode": "weird"})");
  CliResult bad =
      run_cli({"run", "--config", (a.root / "bad.json").string(), "--query", "q"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("mode must be \"fixture\" or \"live\"") != std::string::npos);
}

TEST_CASE("store subcommands work against an empty state directory") {
  Arena a("clistore");
  const std::string state = (a.root / "state").string();

  CliResult list = run_cli({"store", "list", "--state", state});
  CHECK(list.code == 0);
  CHECK(list.out == "(store is empty)\n");

  CliResult show = run_cli({"store", "show", "--state", state, "ghost/repo"});
  CHECK(show.code == 1);
  CHECK(show.err.find("no stored record for ghost/repo") != std::string::npos);

  CliResult del = run_cli({"store", "delete", "--state", state, "ghost/repo"});
  CHECK(del.code == 1);
  CHECK(del.out.find("removed 0 record(s)") != std::string::npos);
}

TEST_CASE("run executes a scripted query end to end from a config file") {
  Arena a("clirun");
  const fs::path rules = kScenarios / "repo-hint-direct" / "rules.json";
  write_file_atomic(a.root / "config.json", std::string(R"({
    "mode": "fixture",
    "corpus_dir": ")") + kCorpus.string() + R"(",
    "state_dir": "state",
    "llm": {"backend": "scripted", "script_file": ")" + rules.string() + R"("},
    "sandbox": {"backend": "process", "network": false}
  })");

  CliResult r = run_cli({"run", "--config", (a.root / "config.json").string(),
                         "--query",
                         "Identify structural variants in the bundled sample reads.",
                         "--repo", "fritzsedlazeck/Sniffles",
                         "--out", (a.root / "out").string()});
  CAPTURE(r.err);
  CHECK(r.code == 0);
  CHECK(r.out.find("success") != std::string::npos);
  CHECK(r.out.find("repo=fritzsedlazeck/Sniffles") != std::string::npos);
  CHECK(r.out.find("artifact: Sniffles/results/variants.vcf") != std::string::npos);
  CHECK(fs::exists(a.root / "out" / "report.json"));
  CHECK(fs::exists(a.root / "out" / "trajectory.jsonl"));
  CHECK(fs::is_directory(a.root / "state" / "store"));

  // The freshly stored repository is now visible to `store list`.
  CliResult list = run_cli({"store", "list", "--state", (a.root / "state").string()});
  CHECK(list.code == 0);
  CHECK(list.out.find("fritzsedlazeck/Sniffles") != std::string::npos);

  CliResult del = run_cli(
      {"store", "delete", "--state", (a.root / "state").string(), "fritzsedlazeck/Sniffles"});
  CHECK(del.code == 0);
  CHECK(del.out.find("removed 1 record(s)") != std::string::npos);
}

TEST_CASE("eval runs a scenario subset and prints the summary table") {
  Arena a("clieval");
  fs::create_directories(a.root / "scenarios");
  fs::copy(kScenarios / "repo-hint-direct", a.root / "scenarios" / "repo-hint-direct",
           fs::copy_options::recursive);

  CliResult r = run_cli({"eval", "--scenarios", (a.root / "scenarios").string(),
                         "--corpus", kCorpus.string(),
                         "--out", (a.root / "out").string(),
                         "--sandbox", "process"});
  CAPTURE(r.err);
  CHECK(r.code == 0);
  CHECK(r.out.find("repo-hint-direct") != std::string::npos);
  CHECK(r.out.find("runs: 1  passed: 1 (100.0%)") != std::string::npos);
  CHECK(r.out.find("records: ") != std::string::npos);
  CHECK(fs::exists(a.root / "out" / "summary.json"));

  CHECK(run_cli({"eval", "--scenarios", (a.root / "scenarios").string(),
                 "--corpus", kCorpus.string(), "--out", (a.root / "out2").string(),
                 "--repeats", "0"})
            .code == 2);
}
