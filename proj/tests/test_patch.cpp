// SPDX-License-Identifier: Apache-2.0
// Unified-diff engine. The frozen post-images mirror what GNU patch(1)
// produces for the same inputs; when patch(1) is present on the machine the
// equivalence is asserted directly.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "repoforge/errors.hpp"
#include "repoforge/github.hpp"
#include "repoforge/patch.hpp"
#include "repoforge/sandbox.hpp"
#include "repoforge/util.hpp"

using namespace repoforge;
namespace fs = std::filesystem;

namespace {

const std::string kOriginal =
    "alpha\n"
    "bravo\n"
    "charlie\n"
    "delta\n"
    "echo\n";

const std::string kSimpleDiff =
    "--- a/notes.txt\n"
    "+++ b/notes.txt\n"
    "@@ -2,3 +2,3 @@\n"
    " bravo\n"
    "-charlie\n"
    "+charlie (edited)\n"
    " delta\n";

const std::string kSimpleExpected =
    "alpha\n"
    "bravo\n"
    "charlie (edited)\n"
    "delta\n"
    "echo\n";

bool patch_tool_available() {
  return std::system("command -v patch >/dev/null 2>&1") == 0;
}

/// Runs GNU patch(1) on (original, diff) and returns the patched bytes.
std::string gnu_patch(const std::string& original, const std::string& diff,
                      const std::string& rel_path) {
  fs::path dir = fs::temp_directory_path() / "repoforge-test-gnupatch";
  fs::remove_all(dir);
  fs::create_directories((dir / rel_path).parent_path());
  write_file_atomic(dir / rel_path, original);
  write_file_atomic(dir / "change.diff", diff);
  ExecResult r = run_argv({"/bin/sh", "-c", "patch -p1 < change.diff"}, &dir,
                          nullptr, 30);
  REQUIRE(r.exit_code == 0);
  std::string out = read_file_text(dir / rel_path);
  fs::remove_all(dir);
  return out;
}

}  // namespace

TEST_CASE("parse_unified_diff reads headers, hunks and line tags") {
  auto patches = parse_unified_diff(kSimpleDiff);
  REQUIRE(patches.size() == 1);
  const FilePatch& p = patches[0];
  CHECK(p.old_path == "notes.txt");
  CHECK(p.new_path == "notes.txt");
  CHECK(p.target_path() == "notes.txt");
  CHECK_FALSE(p.new_file);
  CHECK_FALSE(p.deleted);
  REQUIRE(p.hunks.size() == 1);
  const Hunk& h = p.hunks[0];
  CHECK(h.old_start == 2);
  CHECK(h.old_count == 3);
  CHECK(h.new_start == 2);
  CHECK(h.new_count == 3);
  REQUIRE(h.lines.size() == 4);
  CHECK(h.lines[0].tag == ' ');
  CHECK(h.lines[1].tag == '-');
  CHECK(h.lines[2].tag == '+');
  CHECK(h.lines[2].text == "charlie (edited)");
}

TEST_CASE("parse tolerates git extras and splits multiple files") {
  const std::string diff =
      "diff --git a/x.txt b/x.txt\n"
      "index 0000000..1111111 100644\n"
      "--- a/x.txt\n"
      "+++ b/x.txt\n"
      "@@ -1,1 +1,1 @@\n"
      "-one\n"
      "+uno\n"
      "diff --git a/y.txt b/y.txt\n"
      "--- a/y.txt\n"
      "+++ b/y.txt\n"
      "@@ -1,1 +1,2 @@\n"
      " keep\n"
      "+added\n";
  auto patches = parse_unified_diff(diff);
  REQUIRE(patches.size() == 2);
  CHECK(patches[0].target_path() == "x.txt");
  CHECK(patches[1].target_path() == "y.txt");
  CHECK(patches[1].hunks[0].new_count == 2);
}

TEST_CASE("malformed diffs raise a parse error") {
  CHECK_THROWS_AS(parse_unified_diff("random prose, no headers"), Error);
  CHECK_THROWS_AS(parse_unified_diff("--- a/x\n+++ b/x\n@@ bad hunk @@\n"), Error);
}

TEST_CASE("apply_file_patch produces the frozen post-image") {
  auto patches = parse_unified_diff(kSimpleDiff);
  REQUIRE(patches.size() == 1);
  CHECK(apply_file_patch(patches[0], kOriginal) == kSimpleExpected);
}

TEST_CASE("apply matches GNU patch(1) output byte for byte") {
  if (!patch_tool_available()) return;  // nothing to compare against
  struct Case {
    const char* name;
    std::string original;
    std::string diff;
  };
  const std::vector<Case> cases = {
      {"simple", kOriginal, kSimpleDiff},
      {"two-hunks",
       "l1\nl2\nl3\nl4\nl5\nl6\nl7\nl8\nl9\nl10\n",
       "--- a/notes.txt\n"
       "+++ b/notes.txt\n"
       "@@ -1,3 +1,3 @@\n"
       " l1\n"
       "-l2\n"
       "+L2\n"
       " l3\n"
       "@@ -8,3 +8,4 @@\n"
       " l8\n"
       " l9\n"
       "+l9andahalf\n"
       " l10\n"},
      {"grow-and-shrink",
       "alpha\nbravo\ncharlie\n",
       "--- a/notes.txt\n"
       "+++ b/notes.txt\n"
       "@@ -1,3 +1,2 @@\n"
       "-alpha\n"
       "-bravo\n"
       "+alphabravo\n"
       " charlie\n"},
  };
  for (const Case& c : cases) {
    INFO(c.name);
    auto patches = parse_unified_diff(c.diff);
    REQUIRE(patches.size() == 1);
    CHECK(apply_file_patch(patches[0], c.original) ==
          gnu_patch(c.original, c.diff, "notes.txt"));
  }
}

TEST_CASE("hunks relocate to the nearest exact context match") {
  // Two extra lines were prepended since the diff was made, so the stated
  // line numbers are off by two; the context still matches uniquely.
  const std::string drifted =
      "zero-a\n"
      "zero-b\n" +
      kOriginal;
  auto patches = parse_unified_diff(kSimpleDiff);
  std::string patched = apply_file_patch(patches[0], drifted);
  CHECK(patched == "zero-a\nzero-b\n" + kSimpleExpected);
}

TEST_CASE("a hunk with no matching context reports its 1-based index") {
  const std::string diff =
      "--- a/notes.txt\n"
      "+++ b/notes.txt\n"
      "@@ -1,1 +1,1 @@\n"
      "-alpha\n"
      "+ALPHA\n"
      "@@ -3,1 +3,1 @@\n"
      "-no such line anywhere\n"
      "+replacement\n";
  auto patches = parse_unified_diff(diff);
  try {
    apply_file_patch(patches[0], kOriginal);
    FAIL("applied a hunk whose context does not exist");
  } catch (const DiffApplyError& e) {
    CHECK(e.hunk_index() == 2);
    CHECK(e.code() == Errc::DiffApply);
  }
}

TEST_CASE("new-file and deleted-file diffs") {
  const std::string create =
      "--- /dev/null\n"
      "+++ b/fresh.txt\n"
      "@@ -0,0 +1,2 @@\n"
      "+first\n"
      "+second\n";
  auto patches = parse_unified_diff(create);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].new_file);
  CHECK(patches[0].target_path() == "fresh.txt");
  CHECK(apply_file_patch(patches[0], "") == "first\nsecond\n");

  const std::string remove =
      "--- a/gone.txt\n"
      "+++ /dev/null\n"
      "@@ -1,2 +0,0 @@\n"
      "-first\n"
      "-second\n";
  patches = parse_unified_diff(remove);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].deleted);
  CHECK(patches[0].target_path() == "gone.txt");
  CHECK(apply_file_patch(patches[0], "first\nsecond\n").empty());
}

TEST_CASE("missing trailing newline marker is honored") {
  const std::string diff =
      "--- a/x.txt\n"
      "+++ b/x.txt\n"
      "@@ -1,1 +1,1 @@\n"
      "-old\n"
      "+new\n"
      "\\ No newline at end of file\n";
  auto patches = parse_unified_diff(diff);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].new_missing_final_newline);
  CHECK(apply_file_patch(patches[0], "old\n") == "new");
}

// ---- the corpus fix diffs used by the scenarios --------------------------------

TEST_CASE("the Sniffles fetch-script fix applies to the shipped worktree file") {
  const fs::path corpus = fs::path(REPOFORGE_SOURCE_DIR) / "fixtures" / "corpus";
  FixtureCorpus fixture_corpus(corpus);
  auto pr = fixture_corpus.thread("fritzsedlazeck/Sniffles",
                                  ThreadKind::PullRequest, 12);
  REQUIRE(pr.has_value());
  const std::string original = read_file_text(
      fixture_corpus.files_dir("fritzsedlazeck/Sniffles") / "tools" /
      "fetch_data.sh");
  auto patches = parse_unified_diff(pr->diff);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].target_path() == "tools/fetch_data.sh");
  const std::string fixed = apply_file_patch(patches[0], original);
  CHECK(fixed.find("python3 tools/datafetch.py") != std::string::npos);
  CHECK(fixed.find("datafetch --out") == std::string::npos);
  if (patch_tool_available())
    CHECK(fixed == gnu_patch(original, pr->diff, "tools/fetch_data.sh"));
}

TEST_CASE("the photo-restoration env fix applies to the shipped worktree file") {
  const fs::path corpus = fs::path(REPOFORGE_SOURCE_DIR) / "fixtures" / "corpus";
  FixtureCorpus fixture_corpus(corpus);
  auto pr = fixture_corpus.thread("microsoft/Bringing-Old-Photos-Back-to-Life",
                                  ThreadKind::PullRequest, 7);
  REQUIRE(pr.has_value());
  const std::string original = read_file_text(
      fixture_corpus.files_dir("microsoft/Bringing-Old-Photos-Back-to-Life") /
      "build_env.sh");
  auto patches = parse_unified_diff(pr->diff);
  REQUIRE(patches.size() == 1);
  const std::string fixed = apply_file_patch(patches[0], original);
  CHECK(fixed ==
        "#!/bin/sh\n"
        "set -e\n"
        "python3 tools/envtool.py --prepare --lock\n");
  if (patch_tool_available())
    CHECK(fixed == gnu_patch(original, pr->diff, "build_env.sh"));
}
