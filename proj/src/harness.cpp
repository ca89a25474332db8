// SPDX-License-Identifier: Apache-2.0
#include "repoforge/harness.hpp"

#include <set>

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"
#include "repoforge/orchestrator.hpp"
#include "repoforge/trajectory.hpp"
#include "repoforge/util.hpp"
#include "json.hpp"

namespace repoforge {

using nlohmann::json;

// Serializer kept out of the header so it can use json directly.
std::string to_json_text_of(const EvalSummary& sum);

namespace {

std::vector<std::string> evaluate_expectations(const Scenario& sc,
                                               const FinalReport& rep,
                                               const fs::path& run_dir,
                                               const fs::path& trajectory) {
  std::vector<std::string> failures;
  const Expectation& e = sc.expect;

  if (rep.success != e.success)
    failures.push_back("expected success=" + std::string(e.success ? "true" : "false") +
                       ", got " + (rep.success ? "true" : "false") +
                       (rep.failure_reason.empty() ? "" : " (" + rep.failure_reason + ")"));
  if (!e.repo.empty() && rep.repo_full_name != e.repo)
    failures.push_back("expected repo " + e.repo + ", got " +
                       (rep.repo_full_name.empty() ? "(none)" : rep.repo_full_name));
  if (e.reused_stored && *e.reused_stored != rep.reused_stored)
    failures.push_back(std::string("expected reused_stored=") +
                       (*e.reused_stored ? "true" : "false"));
  for (const auto& sub : e.answer_contains)
    if (rep.answer.find(sub) == std::string::npos)
      failures.push_back("answer does not contain \"" + sub + "\"");
  if (!e.failure_contains.empty() &&
      rep.failure_reason.find(e.failure_contains) == std::string::npos)
    failures.push_back("failure_reason does not contain \"" + e.failure_contains + "\"");

  if (!e.markers.empty()) {
    std::set<std::string> seen;
    for (const auto& line : read_trajectory(trajectory))
      if (line.kind == TrajectoryLine::Kind::Marker) seen.insert(line.marker);
    for (const auto& m : e.markers)
      if (!seen.count(m)) failures.push_back("trajectory lacks marker \"" + m + "\"");
  }

  for (const auto& rel : e.artifacts) {
    bool listed = false;
    for (const auto& a : rep.artifacts) listed = listed || a == rel;
    if (!listed) {
      failures.push_back("report does not list artifact " + rel);
      continue;
    }
    bool exists = false;
    const fs::path ws_root = run_dir / "workspaces";
    if (fs::is_directory(ws_root))
      for (const auto& entry : fs::directory_iterator(ws_root))
        if (fs::exists(entry.path() / "workspace" / rel)) exists = true;
    if (!exists) failures.push_back("artifact file missing on disk: " + rel);
  }
  return failures;
}

}  // namespace

std::string RunRecord::to_json_text() const {
  json j;
  j["scenario"] = scenario;
  j["repeat"] = repeat;
  j["success"] = success;
  j["passed"] = passed;
  j["failures"] = failures;
  j["repo"] = repo;
  j["reused_stored"] = reused_stored;
  j["llm_calls"] = llm_calls;
  j["retries"] = retries;
  j["total_tokens"] = total_tokens;
  j["scripted_served"] = scripted_served;
  j["masked_trajectory_digest"] = masked_trajectory_digest;
  return j.dump();
}

Harness::Harness(fs::path scenarios_dir, fs::path corpus_dir, fs::path out_dir,
                 int repeats, std::string sandbox_backend)
    : scenarios_dir_(std::move(scenarios_dir)),
      corpus_dir_(std::move(corpus_dir)),
      out_dir_(std::move(out_dir)),
      repeats_(repeats),
      sandbox_backend_(std::move(sandbox_backend)) {
  if (repeats_ < 1) raise(Errc::Usage, "repeats must be >= 1");
}

RunRecord Harness::run_one(const Scenario& sc, int repeat) {
  const fs::path run_dir = out_dir_ / sc.name / ("run" + std::to_string(repeat));
  std::error_code ec;
  fs::remove_all(run_dir, ec);
  fs::create_directories(run_dir);

  SpoolStore spool(run_dir / "spool");
  RepoStore store(run_dir / "store");
  auto runtime = make_sandbox_runtime(sandbox_backend_, run_dir / "workspaces",
                                      run_dir / "images", spool);

  // Preload the store; image trees are committed through the runtime so the
  // stored record's tag resolves exactly like a real earlier run's would.
  for (const auto& seed : sc.seeds) {
    if (!seed.image_tree.empty()) {
      SandboxSpec spec;
      spec.network_enabled = false;
      SandboxHandle h = runtime->create(spec);
      copy_tree(seed.image_tree, h.workspace_host / seed.record.ref.name());
      runtime->commit_image(h, seed.record.image.tag);
      runtime->destroy(h);
    }
    store.put(seed.record);
  }

  ScriptedBackend backend = ScriptedBackend::load(sc.script_file);
  Gateway gateway(backend, TemplateCatalog::builtin());
  FixtureCorpus corpus(corpus_dir_);
  FixtureHost host(corpus);
  RunBudget budget;
  ExperienceEngine experience(gateway, host, budget);
  EngineServices services{gateway, host,   *runtime, store,
                          spool,   experience, budget,
                          /*sandbox_network=*/false, /*retry_limit=*/3};
  Orchestrator orchestrator(services, run_dir);
  FinalReport rep = orchestrator.run_query(sc.query);

  RunRecord rec;
  rec.scenario = sc.name;
  rec.repeat = repeat;
  rec.success = rep.success;
  rec.repo = rep.repo_full_name;
  rec.reused_stored = rep.reused_stored;
  rec.llm_calls = gateway.ledger().llm_calls();
  rec.retries = gateway.ledger().retries();
  rec.total_tokens = gateway.ledger().total_tokens();
  rec.scripted_served = backend.matches_served();
  rec.masked_trajectory_digest =
      sha256_hex(mask_timestamps(read_file_text(orchestrator.paths().trajectory)));
  rec.failures = evaluate_expectations(sc, rep, run_dir,
                                       orchestrator.paths().trajectory);
  if (rec.llm_calls != rec.scripted_served)
    rec.failures.push_back("cost mismatch: ledger says " +
                           std::to_string(rec.llm_calls) + " calls, backend served " +
                           std::to_string(rec.scripted_served));
  rec.passed = rec.failures.empty();
  return rec;
}

EvalSummary Harness::run_all() {
  auto scenarios = load_scenarios(scenarios_dir_);
  fs::create_directories(out_dir_);
  const fs::path records_file = out_dir_ / "records.jsonl";
  write_file_atomic(records_file, "");

  EvalSummary sum;
  sum.scenarios = static_cast<int>(scenarios.size());
  int repo_expected = 0, repo_hits = 0;

  for (const auto& sc : scenarios) {
    ScenarioStats st;
    st.name = sc.name;
    std::set<std::string> digests;
    bool repo_matched = true;
    for (int r = 0; r < repeats_; ++r) {
      RunRecord rec = run_one(sc, r);
      append_line(records_file, rec.to_json_text());
      ++st.runs;
      ++sum.runs;
      if (rec.success) ++st.engine_successes;
      if (rec.passed) {
        ++st.passes;
        ++sum.passes;
      }
      st.llm_calls.push_back(static_cast<double>(rec.llm_calls));
      digests.insert(rec.masked_trajectory_digest);
      if (!sc.expect.repo.empty() && rec.repo != sc.expect.repo) repo_matched = false;
    }
    st.deterministic = digests.size() <= 1;
    if (!st.deterministic) sum.deterministic = false;
    if (!sc.expect.repo.empty()) {
      ++repo_expected;
      if (repo_matched) ++repo_hits;
    }
    sum.per_scenario.push_back(std::move(st));
  }

  sum.pass_pct = sum.runs ? percent_1dp(sum.passes, sum.runs) : 0.0;
  sum.precision_at_1 = repo_expected ? percent_1dp(repo_hits, repo_expected) : 100.0;
  write_file_atomic(out_dir_ / "summary.json", to_json_text_of(sum));
  return sum;
}

std::string EvalSummary::to_json_text() const { return to_json_text_of(*this); }

std::string to_json_text_of(const EvalSummary& sum) {
  json per = json::array();
  for (const auto& st : sum.per_scenario) {
    per.push_back({{"name", st.name},
                   {"runs", st.runs},
                   {"engine_successes", st.engine_successes},
                   {"passes", st.passes},
                   {"deterministic", st.deterministic},
                   {"llm_calls_mean", mean_2dp(st.llm_calls)},
                   {"llm_calls_stddev", stddev_2dp(st.llm_calls)}});
  }
  json j;
  j["scenarios"] = sum.scenarios;
  j["runs"] = sum.runs;
  j["passes"] = sum.passes;
  j["pass_pct"] = sum.pass_pct;
  j["precision_at_1"] = sum.precision_at_1;
  j["deterministic"] = sum.deterministic;
  j["per_scenario"] = per;
  return j.dump(2) + "\n";
}

std::string EvalSummary::table_text() const {
  auto pad = [](std::string s, std::size_t width, bool left) {
    if (s.size() < width) {
      std::string fill(width - s.size(), ' ');
      s = left ? s + fill : fill + s;
    }
    return s;
  };
  std::string out;
  out += pad("scenario", 34, true) + pad("runs", 6, false) + pad("ok", 5, false) +
         pad("pass", 6, false) + pad("calls mean", 12, false) +
         pad("stddev", 9, false) + pad("det", 5, false) + "\n";
  out += std::string(77, '-') + "\n";
  char buf[32];
  for (const auto& st : per_scenario) {
    out += pad(st.name, 34, true) + pad(std::to_string(st.runs), 6, false) +
           pad(std::to_string(st.engine_successes), 5, false) +
           pad(std::to_string(st.passes), 6, false);
    std::snprintf(buf, sizeof buf, "%.2f", mean_2dp(st.llm_calls));
    out += pad(buf, 12, false);
    std::snprintf(buf, sizeof buf, "%.2f", stddev_2dp(st.llm_calls));
    out += pad(buf, 9, false);
    out += pad(st.deterministic ? "yes" : "NO", 5, false) + "\n";
  }
  out += std::string(77, '-') + "\n";
  std::snprintf(buf, sizeof buf, "%.1f", pass_pct);
  out += "runs: " + std::to_string(runs) + "  passed: " + std::to_string(passes) +
         " (" + buf + "%)";
  std::snprintf(buf, sizeof buf, "%.1f", precision_at_1);
  out += "  precision@1: " + std::string(buf) + "%";
  out += std::string("  deterministic: ") + (deterministic ? "yes" : "NO") + "\n";
  return out;
}

}  // namespace repoforge
