// SPDX-License-Identifier: Apache-2.0
#include "repoforge/cli.hpp"

#include <iostream>
#include <memory>

#include "repoforge/config.hpp"
#include "repoforge/errors.hpp"
#include "repoforge/harness.hpp"
#include "repoforge/orchestrator.hpp"
#include "repoforge/util.hpp"
#include "CLI11.hpp"

namespace repoforge {

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::Usage:
    case Errc::ConfigInvalid:
    case Errc::ScenarioInvalid:
      return 2;
    default:
      return 1;
  }
}

int cmd_run(const std::string& config_path, const std::string& query_text,
            const std::string& repo_hint, const std::string& out_dir) {
  RunConfig cfg = RunConfig::load(config_path);

  SpoolStore spool(cfg.state_dir / "spool");
  RepoStore store(cfg.state_dir / "store");
  auto runtime = make_sandbox_runtime(cfg.sandbox_backend, cfg.state_dir / "sandboxes",
                                      cfg.state_dir / "images", spool);

  std::unique_ptr<RepoHost> host;
  std::unique_ptr<FixtureCorpus> corpus;
  if (cfg.mode == "fixture") {
    corpus = std::make_unique<FixtureCorpus>(cfg.corpus_dir);
    host = std::make_unique<FixtureHost>(*corpus);
  } else {
    host = std::make_unique<RestHost>(cfg.rest);
  }

  std::unique_ptr<LlmBackend> backend;
  if (cfg.llm_backend == "scripted")
    backend = std::make_unique<ScriptedBackend>(ScriptedBackend::load(cfg.script_file));
  else
    backend = std::make_unique<HttpBackend>(cfg.http);

  Gateway gateway(*backend, TemplateCatalog::builtin());
  ExperienceEngine experience(gateway, *host, cfg.budget);
  EngineServices services{gateway,   *host,      *runtime,
                          store,     spool,      experience,
                          cfg.budget, cfg.sandbox_network, cfg.retry_limit};
  Orchestrator orchestrator(services, out_dir);

  Query q;
  q.text = query_text;
  if (!repo_hint.empty()) q.repo_hint = repo_hint;
  FinalReport rep = orchestrator.run_query(q);

  std::cout << (rep.success ? "success" : "FAILED") << "  repo="
            << (rep.repo_full_name.empty() ? "(none)" : rep.repo_full_name)
            << "  isolation=" << rep.isolation << "\n";
  if (!rep.answer.empty()) std::cout << "answer: " << rep.answer << "\n";
  for (const auto& a : rep.artifacts) std::cout << "artifact: " << a << "\n";
  if (!rep.failure_reason.empty())
    std::cout << "failure: " << rep.failure_reason << "\n";
  std::cout << "report: " << orchestrator.paths().report.string() << "\n";
  return rep.success ? 0 : 1;
}

int cmd_eval(const std::string& scenarios, const std::string& corpus,
             const std::string& out, int repeats, const std::string& backend) {
  Harness harness(scenarios, corpus, out, repeats, backend);
  EvalSummary sum = harness.run_all();
  std::cout << sum.table_text();
  std::cout << "records: " << (fs::path(out) / "records.jsonl").string() << "\n";
  return sum.all_green() ? 0 : 1;
}

int cmd_store_list(const std::string& state_dir) {
  RepoStore store(fs::path(state_dir) / "store");
  auto records = store.list();
  if (records.empty()) {
    std::cout << "(store is empty)\n";
    return 0;
  }
  for (const auto& r : records) {
    std::cout << r.ref.full_name << "  image=" << r.image.tag << "  query_digest="
              << r.query_digest.substr(0, 8) << "\n    " << r.function_description
              << "\n";
  }
  return 0;
}

int cmd_store_show(const std::string& state_dir, const std::string& full_name) {
  RepoStore store(fs::path(state_dir) / "store");
  bool found = false;
  for (const auto& r : store.list()) {
    if (r.ref.full_name != full_name) continue;
    found = true;
    std::cout << record_to_json_text(r) << "\n";
  }
  if (!found) {
    std::cerr << "no stored record for " << full_name << "\n";
    return 1;
  }
  return 0;
}

int cmd_store_delete(const std::string& state_dir, const std::string& full_name,
                     const std::string& digest) {
  RepoStore store(fs::path(state_dir) / "store");
  int removed = 0;
  for (const auto& r : store.list()) {
    if (r.ref.full_name != full_name) continue;
    if (!digest.empty() && r.query_digest.rfind(digest, 0) != 0) continue;
    if (store.remove(r.ref.full_name, r.query_digest)) ++removed;
  }
  std::cout << "removed " << removed << " record(s)\n";
  return removed > 0 ? 0 : 1;
}

int cmd_fixtures_validate(const std::string& corpus) {
  auto problems = FixtureCorpus::validate(corpus);
  if (problems.empty()) {
    FixtureCorpus c{fs::path(corpus)};
    std::cout << "corpus ok: " << c.all().size() << " repositories\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << "problem: " << p << "\n";
  return 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"repoforge - agent engine that grows its toolset from GitHub repositories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "repoforge 0.1.0");

  std::string config_path, query_text, repo_hint, out_dir = "runs/latest";
  auto* run = app.add_subcommand("run", "Run one query through all four phases");
  run->add_option("--config", config_path, "engine config JSON")->required();
  run->add_option("--query", query_text, "what the agent should accomplish")->required();
  run->add_option("--repo", repo_hint, "owner/name to use directly");
  run->add_option("--out", out_dir, "run directory (trajectory + report)");

  std::string scen_dir, corpus_dir, eval_out = "eval-out", sandbox_backend = "process";
  int repeats = 1;
  auto* eval = app.add_subcommand("eval", "Run the offline scenario suite");
  eval->add_option("--scenarios", scen_dir, "scenario root directory")->required();
  eval->add_option("--corpus", corpus_dir, "fixture corpus root")->required();
  eval->add_option("--out", eval_out, "output directory");
  eval->add_option("--repeats", repeats, "runs per scenario")->check(CLI::PositiveNumber);
  eval->add_option("--sandbox", sandbox_backend, "process | docker | auto");

  std::string state_dir = "state", store_name, store_digest;
  auto* store_cmd = app.add_subcommand("store", "Inspect the repository store");
  store_cmd->require_subcommand(1);
  auto* store_list = store_cmd->add_subcommand("list", "List stored repositories");
  store_list->add_option("--state", state_dir, "engine state directory");
  auto* store_show = store_cmd->add_subcommand("show", "Print records as JSON");
  store_show->add_option("--state", state_dir, "engine state directory");
  store_show->add_option("name", store_name, "owner/name")->required();
  auto* store_delete = store_cmd->add_subcommand("delete", "Remove records");
  store_delete->add_option("--state", state_dir, "engine state directory");
  store_delete->add_option("name", store_name, "owner/name")->required();
  store_delete->add_option("--digest", store_digest, "query digest prefix filter");

  std::string fx_corpus;
  auto* fixtures = app.add_subcommand("fixtures", "Fixture corpus utilities");
  fixtures->require_subcommand(1);
  auto* fx_validate = fixtures->add_subcommand("validate", "Check corpus structure");
  fx_validate->add_option("--corpus", fx_corpus, "fixture corpus root")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, query_text, repo_hint, out_dir);
    if (eval->parsed())
      return cmd_eval(scen_dir, corpus_dir, eval_out, repeats, sandbox_backend);
    if (store_cmd->parsed()) {
      if (store_list->parsed()) return cmd_store_list(state_dir);
      if (store_show->parsed()) return cmd_store_show(state_dir, store_name);
      if (store_delete->parsed())
        return cmd_store_delete(state_dir, store_name, store_digest);
    }
    if (fixtures->parsed() && fx_validate->parsed())
      return cmd_fixtures_validate(fx_corpus);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace repoforge
