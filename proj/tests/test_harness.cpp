// SPDX-License-Identifier: Apache-2.0
// Evaluation harness: scenario parsing and validation, per-run directories,
// expectation checking, determinism accounting, and the suite summary.
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "repoforge/errors.hpp"
#include "repoforge/harness.hpp"
#include "repoforge/scenario.hpp"
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

void write_scenario(const fs::path& dir, const std::string& json_text,
                    bool with_rules = true) {
  fs::create_directories(dir);
  write_file_atomic(dir / "scenario.json", json_text);
  if (with_rules) write_file_atomic(dir / "rules.json", R"({"rules": []})");
}

std::string load_error(const fs::path& dir) {
  try {
    Scenario::load(dir);
    return "(no error)";
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ScenarioInvalid);
    return e.what();
  }
}

}  // namespace

// ---- scenario parsing --------------------------------------------------------

TEST_CASE("the shipped scenario suite loads fully, sorted by name") {
  auto all = load_scenarios(kScenarios);
  std::vector<std::string> names;
  for (const auto& sc : all) names.push_back(sc.name);
  CHECK(names == std::vector<std::string>{
                     "aizynth-clean-run", "budget-adversary", "malformed-retry",
                     "no-suitable-repo", "photos-decoy-pr",
                     "qlib-issue-fix-longcontext", "repo-hint-direct",
                     "sniffles-setup-repair", "stored-reuse",
                     "stored-stale-image", "submit-missing-artifact"});
  for (const auto& sc : all) {
    CAPTURE(sc.name);
    CHECK(sc.query.valid());
    CHECK(fs::exists(sc.script_file));
    CHECK_FALSE(sc.description.empty());
  }
}

TEST_CASE("a scenario file parses every field") {
  Arena a("scparse");
  fs::create_directories(a.root / "sc" / "tree");
  write_file_atomic(a.root / "sc" / "tree" / "hello.txt", "hi");
  write_scenario(a.root / "sc", R"({
    "name": "everything",
    "description": "all knobs set",
    "query": {"text": "do the thing", "repo_hint": "owner/name"},
    "script": "rules.json",
    "expect": {
      "success": false,
      "repo": "owner/name",
      "reused_stored": true,
      "answer_contains": "single-string-form",
      "artifacts": ["a.txt", "b/c.txt"],
      "markers": ["m1"],
      "failure_contains": "boom"
    },
    "seed_store": [{
      "full_name": "seed/repo",
      "image_tag": "seed-env-1",
      "function_description": "does seed things",
      "experience": "worked",
      "query_digest": "qd",
      "created_at_ms": 42,
      "image_tree": "tree"
    }]
  })");

  Scenario sc = Scenario::load(a.root / "sc");
  CHECK(sc.name == "everything");
  CHECK(sc.description == "all knobs set");
  CHECK(sc.query.text == "do the thing");
  REQUIRE(sc.query.repo_hint.has_value());
  CHECK(*sc.query.repo_hint == "owner/name");
  CHECK(sc.script_file == a.root / "sc" / "rules.json");
  CHECK_FALSE(sc.expect.success);
  CHECK(sc.expect.repo == "owner/name");
  REQUIRE(sc.expect.reused_stored.has_value());
  CHECK(*sc.expect.reused_stored);
  CHECK(sc.expect.answer_contains ==
        std::vector<std::string>{"single-string-form"});
  CHECK(sc.expect.artifacts == std::vector<std::string>{"a.txt", "b/c.txt"});
  CHECK(sc.expect.markers == std::vector<std::string>{"m1"});
  CHECK(sc.expect.failure_contains == "boom");
  REQUIRE(sc.seeds.size() == 1);
  CHECK(sc.seeds[0].record.ref.full_name == "seed/repo");
  CHECK(sc.seeds[0].record.image.tag == "seed-env-1");
  CHECK(sc.seeds[0].record.created_at_ms == 42);
  CHECK(sc.seeds[0].image_tree == a.root / "sc" / "tree");
}

TEST_CASE("scenario defects are rejected with specific messages") {
  Arena a("scbad");

  fs::create_directories(a.root / "none");
  CHECK(load_error(a.root / "none").find("missing") != std::string::npos);

  write_scenario(a.root / "garbled", "[1, 2");
  CHECK(load_error(a.root / "garbled").find("not a JSON object") !=
        std::string::npos);

  write_scenario(a.root / "noquery", R"({"name": "x"})");
  CHECK(load_error(a.root / "noquery").find("scenario.json") != std::string::npos);

  write_scenario(a.root / "noname", R"({"name": "", "query": {"text": "t"}})");
  CHECK(load_error(a.root / "noname").find("name must not be empty") !=
        std::string::npos);

  write_scenario(a.root / "emptyq", R"({"name": "x", "query": {"text": ""}})");
  CHECK(load_error(a.root / "emptyq").find("query text must not be empty") !=
        std::string::npos);

  write_scenario(a.root / "noscript", R"({"name": "x", "query": {"text": "t"}})",
                 /*with_rules=*/false);
  CHECK(load_error(a.root / "noscript").find("script file not found") !=
        std::string::npos);

  write_scenario(a.root / "badseed", R"({
    "name": "x", "query": {"text": "t"},
    "seed_store": [{"full_name": "a/b", "image_tag": "t",
                    "function_description": "d", "image_tree": "missing-dir"}]
  })");
  CHECK(load_error(a.root / "badseed").find("seed image tree not found") !=
        std::string::npos);
}

TEST_CASE("load_scenarios requires a directory with at least one scenario") {
  Arena a("scroot");
  try {
    load_scenarios(a.root / "nowhere");
    FAIL("missing root accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("not a directory") != std::string::npos);
  }

  fs::create_directories(a.root / "empty" / "stray-subdir");  // no scenario.json
  try {
    load_scenarios(a.root / "empty");
    FAIL("empty root accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no scenarios under") != std::string::npos);
  }

  write_scenario(a.root / "two" / "bbb", R"({"name": "bbb", "query": {"text": "t"}})");
  write_scenario(a.root / "two" / "aaa", R"({"name": "aaa", "query": {"text": "t"}})");
  auto two = load_scenarios(a.root / "two");
  REQUIRE(two.size() == 2);
  CHECK(two[0].name == "aaa");
  CHECK(two[1].name == "bbb");
}

// ---- running -------------------------------------------------------------------

TEST_CASE("the harness rejects a repeat count below one") {
  CHECK_THROWS_AS(Harness(kScenarios, kCorpus, fs::temp_directory_path(), 0), Error);
}

TEST_CASE("run_one lays out an isolated per-repeat directory and passes") {
  Arena a("runone");
  Harness harness(kScenarios, kCorpus, a.root / "out");
  Scenario sc = Scenario::load(kScenarios / "repo-hint-direct");

  RunRecord r0 = harness.run_one(sc, 0);
  RunRecord r1 = harness.run_one(sc, 1);

  for (const RunRecord* r : {&r0, &r1}) {
    CHECK(r->scenario == "repo-hint-direct");
    CHECK(r->success);
    CHECK(r->passed);
    CHECK(r->failures.empty());
    CHECK(r->repo == "fritzsedlazeck/Sniffles");
    CHECK_FALSE(r->reused_stored);
    CHECK(r->llm_calls > 0);
    CHECK(r->llm_calls == r->scripted_served);
    CHECK(r->masked_trajectory_digest.size() == 64);
  }
  CHECK(r0.repeat == 0);
  CHECK(r1.repeat == 1);
  // Two repeats of a scripted run are byte-identical once timestamps are
  // masked, and each run keeps its own directory tree.
  CHECK(r0.masked_trajectory_digest == r1.masked_trajectory_digest);
  for (int i : {0, 1}) {
    fs::path run_dir = a.root / "out" / "repo-hint-direct" / ("run" + std::to_string(i));
    CAPTURE(i);
    CHECK(fs::exists(run_dir / "report.json"));
    CHECK(fs::exists(run_dir / "trajectory.jsonl"));
    CHECK(fs::is_directory(run_dir / "spool"));
    CHECK(fs::is_directory(run_dir / "store"));
    CHECK(fs::is_directory(run_dir / "workspaces"));
  }

  const std::string record_line = r0.to_json_text();
  CHECK(record_line.find("\"scenario\":\"repo-hint-direct\"") != std::string::npos);
  CHECK(record_line.find("\"passed\":true") != std::string::npos);
}

TEST_CASE("run_one reports every unmet expectation") {
  Arena a("unmet");
  Harness harness(kScenarios, kCorpus, a.root / "out");
  Scenario sc = Scenario::load(kScenarios / "repo-hint-direct");
  sc.expect.repo = "nonexistent/nope";
  sc.expect.reused_stored = true;
  sc.expect.answer_contains.push_back("unicorns");
  sc.expect.markers.push_back("never-marker");
  sc.expect.artifacts.push_back("nope.txt");

  RunRecord rec = harness.run_one(sc, 0);
  CHECK(rec.success);  // the engine run itself was fine
  CHECK_FALSE(rec.passed);
  CHECK(rec.failures ==
        std::vector<std::string>{
            "expected repo nonexistent/nope, got fritzsedlazeck/Sniffles",
            "expected reused_stored=true",
            "answer does not contain \"unicorns\"",
            "trajectory lacks marker \"never-marker\"",
            "report does not list artifact nope.txt"});
}

TEST_CASE("run_one preloads seeded store records with live images") {
  Arena a("seeded");
  Harness harness(kScenarios, kCorpus, a.root / "out");
  Scenario sc = Scenario::load(kScenarios / "stored-reuse");
  RunRecord rec = harness.run_one(sc, 0);
  CHECK(rec.passed);
  CHECK(rec.reused_stored);
  CHECK(rec.repo == "MolecularAI/aizynthfinder");
}

TEST_CASE("a two-scenario suite summarizes runs, determinism and precision") {
  Arena a("suite");
  const fs::path subset = a.root / "scenarios";
  fs::create_directories(subset);
  fs::copy(kScenarios / "repo-hint-direct", subset / "repo-hint-direct",
           fs::copy_options::recursive);
  fs::copy(kScenarios / "stored-reuse", subset / "stored-reuse",
           fs::copy_options::recursive);

  Harness harness(subset, kCorpus, a.root / "out", 2);
  EvalSummary sum = harness.run_all();

  CHECK(sum.scenarios == 2);
  CHECK(sum.runs == 4);
  CHECK(sum.passes == 4);
  CHECK(sum.pass_pct == 100.0);
  CHECK(sum.precision_at_1 == 100.0);
  CHECK(sum.deterministic);
  CHECK(sum.all_green());
  REQUIRE(sum.per_scenario.size() == 2);
  CHECK(sum.per_scenario[0].name == "repo-hint-direct");
  CHECK(sum.per_scenario[1].name == "stored-reuse");
  for (const auto& st : sum.per_scenario) {
    CAPTURE(st.name);
    CHECK(st.runs == 2);
    CHECK(st.passes == 2);
    CHECK(st.engine_successes == 2);
    CHECK(st.deterministic);
    REQUIRE(st.llm_calls.size() == 2);
    CHECK(st.llm_calls[0] == st.llm_calls[1]);
  }

  // Artifacts on disk: one record line per run, and the summary file holds
  // exactly the serialized summary.
  auto lines = split(read_file_text(a.root / "out" / "records.jsonl"), '\n');
  int record_lines = 0;
  for (const auto& l : lines)
    if (!l.empty()) ++record_lines;
  CHECK(record_lines == 4);
  CHECK(read_file_text(a.root / "out" / "summary.json") == sum.to_json_text());

  std::string table = sum.table_text();
  CHECK(table.find("repo-hint-direct") != std::string::npos);
  CHECK(table.find("stored-reuse") != std::string::npos);
  CHECK(table.find("runs: 4  passed: 4 (100.0%)") != std::string::npos);
  CHECK(table.find("precision@1: 100.0%") != std::string::npos);
  CHECK(table.find("deterministic: yes") != std::string::npos);
}
