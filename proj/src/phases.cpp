// SPDX-License-Identifier: Apache-2.0
//
// The four phase procedures. Search is an engine-driven pipeline (stored
// records, then user hint, then generated topics) whose model use is confined
// to named subtasks; Setup executes a model-planned command list with a
// threads-based repair cycle; Apply is the reactive agent loop; Store commits
// the environment and persists what was learned.
#include <set>

#include "repoforge/errors.hpp"
#include "repoforge/orchestrator.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

namespace {

std::string arg_or(const std::map<std::string, std::string>& args,
                   const std::string& key) {
  auto it = args.find(key);
  return it == args.end() ? std::string() : it->second;
}

LlmRequest subtask_request(TemplateKind kind,
                           std::map<std::string, std::string> bindings) {
  LlmRequest req;
  req.template_kind = kind;
  req.bindings = std::move(bindings);
  req.functions = subtask_function_schema(kind);
  return req;
}

/// Reactive-loop model call: full phase function set, history tail, feedback.
LlmResponse agent_next(EngineServices& s, TrajectoryContext& ctx, const Query& q,
                       const std::string& repo, const std::string& feedback) {
  LlmRequest req;
  req.template_kind = TemplateKind::AgentSystem;
  req.bindings = {{"query", q.text},
                  {"phase", to_string(ctx.phase())},
                  {"repo", repo.empty() ? "(none yet)" : repo},
                  {"history", ExperienceEngine::render_history_tail(ctx.history())},
                  {"feedback", feedback}};
  req.functions = phase_function_schemas(ctx.phase());
  return s.gateway.complete_with_retry(req, s.retry_limit);
}

Action make_action(ActionKind kind, std::map<std::string, std::string> args) {
  Action a;
  a.kind = kind;
  a.args = std::move(args);
  a.issued_at_ms = now_ms();
  return a;
}

std::string render_candidates(const std::vector<RepoCandidate>& items) {
  if (items.empty()) return "(no results)";
  std::vector<std::string> lines;
  lines.reserve(items.size());
  for (const auto& c : items)
    lines.push_back(c.ref.full_name + " stars=" + std::to_string(c.stars) +
                    " topics=" + join(c.topics, ",") + " :: " + c.description);
  return join(lines, "\n");
}

/// Runs `command` with the repository working tree as current directory.
CommandResult exec_in_repo(EngineServices& s, SandboxHandle& handle,
                           const std::string& repo_dir, const std::string& command) {
  std::string line = command;
  if (!repo_dir.empty())
    line = "cd '" + repo_dir + "' && { " + command + "\n}";
  return s.sandbox.exec(handle, line, s.budget.command_timeout_s);
}

/// Turns a judged thread into a workspace edit and records it. PR threads
/// carry a ready diff; issue threads go through the edit-proposal subtask.
void apply_thread_fix(EngineServices& s, SandboxHandle& handle,
                      const std::string& repo_dir, const RepoRef& ref,
                      const std::string& problem, const ThreadJudgment& fix,
                      TrajectoryContext& ctx) {
  FileEdit edit;
  std::string origin = std::string(to_string(fix.kind)) + "#" +
                       std::to_string(fix.thread_id);
  if (fix.kind == ThreadKind::PullRequest && !fix.diff.empty()) {
    edit.mode = EditMode::ApplyDiff;
    edit.path = repo_dir;  // diff paths are repository-relative
    edit.payload = fix.diff;
  } else {
    ctx.require_budget();
    auto resp = s.gateway.complete_with_retry(
        subtask_request(TemplateKind::FileModification,
                        {{"problem", problem},
                         {"solution", fix.solution},
                         {"repo", ref.full_name}}),
        s.retry_limit);
    edit.mode = edit_mode_from_string(arg_or(resp.arguments, "mode"));
    std::string rel = arg_or(resp.arguments, "path");
    edit.path = repo_dir.empty() ? rel : repo_dir + "/" + rel;
    if (edit.mode == EditMode::ApplyDiff) {
      edit.path = repo_dir;
      edit.payload = arg_or(resp.arguments, "diff");
    } else if (edit.mode == EditMode::SearchReplace) {
      edit.search = arg_or(resp.arguments, "search");
      edit.payload = arg_or(resp.arguments, "replace");
      std::string n = arg_or(resp.arguments, "expected_matches");
      if (!n.empty()) edit.expected_matches = std::stoi(n);
    } else {
      edit.payload = arg_or(resp.arguments, "content");
    }
  }
  std::string summary = s.sandbox.apply_edit(handle, edit);
  ctx.record(make_action(ActionKind::FileWrite, {{"origin", origin},
                                                 {"mode", to_string(edit.mode)},
                                                 {"path", edit.path}}),
             summary, ObsStatus::Ok);
}

}  // namespace

// ---- Search ----------------------------------------------------------------

SearchResult run_search_phase(EngineServices& s, const Query& q,
                              TrajectoryContext& ctx) {
  s.gateway.set_phase(PhaseId::Search);

  // 1. Stored repositories, most recent first. A stale image disqualifies.
  auto records =
      s.store.list([&](const std::string& tag) { return s.sandbox.image_exists(tag); });
  for (const auto& rec : records) {
    if (rec.stale) continue;
    ctx.require_budget();
    auto resp = s.gateway.complete_with_retry(
        subtask_request(TemplateKind::StoredRepoRetrieval,
                        {{"query", q.text},
                         {"repo", rec.ref.full_name},
                         {"function_description", rec.function_description},
                         {"experience", rec.experience}}),
        s.retry_limit);
    const bool suitable = arg_or(resp.arguments, "suitable") == "true";
    std::string verdict = suitable ? "suitable" : "unsuitable";
    std::string reason = arg_or(resp.arguments, "reason");
    ctx.record(make_action(ActionKind::LlmSubtask,
                           {{"repo", rec.ref.full_name},
                            {"subtask", "stored-retrieval"}}),
               verdict + (reason.empty() ? "" : ": " + reason), ObsStatus::Ok);
    if (suitable) {
      ctx.record(make_action(ActionKind::Submit, {}),
                 "reusing stored repository " + rec.ref.full_name, ObsStatus::Ok);
      SearchResult out;
      out.ref = rec.ref;
      out.from_store = true;
      out.record = rec;
      return out;
    }
  }

  // 2. The user named a repository: look it up directly.
  if (q.repo_hint && !q.repo_hint->empty()) {
    ctx.require_budget();
    auto cands = s.host.search_by_name(*q.repo_hint);
    sort_candidates(cands);
    ctx.record(make_action(ActionKind::GithubApiCall,
                           {{"api", "search_by_name"}, {"argument", *q.repo_hint}}),
               render_candidates(cands), ObsStatus::Ok);
    if (!cands.empty()) {
      ctx.require_budget();
      std::string readme = s.host.fetch_readme(cands[0].ref).text;
      ctx.record(make_action(ActionKind::GithubApiCall,
                             {{"api", "fetch_readme"},
                              {"argument", cands[0].ref.full_name}}),
                 readme, ObsStatus::Ok);
      ctx.record(make_action(ActionKind::Submit, {}),
                 "selected " + cands[0].ref.full_name + " (named by the user)",
                 ObsStatus::Ok);
      SearchResult out;
      out.ref = cands[0].ref;
      out.readme = readme;
      return out;
    }
  }

  // 3. Generate topics from the query, then search and judge candidates.
  ctx.require_budget();
  auto topics_resp = s.gateway.complete_with_retry(
      subtask_request(TemplateKind::TopicGeneration, {{"query", q.text}}),
      s.retry_limit);
  std::vector<std::string> topics;
  for (auto& t : split(arg_or(topics_resp.arguments, "topics"), ',')) {
    std::string slug = trim(t);
    if (!slug.empty() && topics.size() < 5) topics.push_back(slug);
  }
  ctx.record(make_action(ActionKind::LlmSubtask, {{"subtask", "topic-generation"}}),
             topics.empty() ? "(no topics)" : join(topics, ", "), ObsStatus::Ok);

  std::vector<RepoCandidate> pool;
  std::set<std::string> seen;
  for (const auto& topic : topics) {
    ctx.require_budget();
    auto cands = s.host.search_by_topic(topic, 5);
    ctx.record(make_action(ActionKind::GithubApiCall, {{"api", "search_by_topic"},
                                                       {"argument", topic},
                                                       {"limit", "5"}}),
               render_candidates(cands), ObsStatus::Ok);
    for (auto& c : cands)
      if (seen.insert(c.ref.full_name).second) pool.push_back(std::move(c));
  }
  sort_candidates(pool);

  for (const auto& c : pool) {
    ctx.require_budget();
    std::string readme;
    try {
      readme = s.host.fetch_readme(c.ref).text;
    } catch (const Error& e) {
      ctx.record(make_action(ActionKind::GithubApiCall,
                             {{"api", "fetch_readme"}, {"argument", c.ref.full_name}}),
                 e.what(), ObsStatus::Error);
      continue;
    }
    ctx.record(make_action(ActionKind::GithubApiCall,
                           {{"api", "fetch_readme"}, {"argument", c.ref.full_name}}),
               readme, ObsStatus::Ok);
    ctx.require_budget();
    auto resp = s.gateway.complete_with_retry(
        subtask_request(TemplateKind::FunctionJudgment, {{"query", q.text},
                                                         {"repo", c.ref.full_name},
                                                         {"readme", readme}}),
        s.retry_limit);
    const bool suitable = arg_or(resp.arguments, "suitable") == "true";
    std::string reason = arg_or(resp.arguments, "reason");
    ctx.record(make_action(ActionKind::LlmSubtask, {{"repo", c.ref.full_name},
                                                    {"subtask", "function-judgment"}}),
               (suitable ? "suitable" : "unsuitable") +
                   (reason.empty() ? std::string() : ": " + reason),
               ObsStatus::Ok);
    if (suitable) {
      ctx.record(make_action(ActionKind::Submit, {}), "selected " + c.ref.full_name,
                 ObsStatus::Ok);
      SearchResult out;
      out.ref = c.ref;
      out.readme = readme;
      return out;
    }
  }
  raise(Errc::NoSuitableRepository,
        "no candidate repository passed the suitability judgment");
}

// ---- Setup -----------------------------------------------------------------

namespace {

/// One repair attempt for a failing setup command: abstract the problem, walk
/// pull requests first, then issues, and apply the first usable fix.
void repair_setup_failure(EngineServices& s, const Query& q, const RepoRef& ref,
                          SandboxHandle& handle, const std::string& repo_dir,
                          const std::string& command, const std::string& error,
                          TrajectoryContext& ctx) {
  ctx.require_budget();
  ProblemStatement prob = s.experience.summarize_problem(q, command, error);
  ctx.record(make_action(ActionKind::LlmSubtask, {{"subtask", "problem-abstraction"}}),
             prob.statement, ObsStatus::Ok);
  auto fix = s.experience.find_fix(ref, prob.statement, ThreadKind::PullRequest, &ctx);
  if (!fix)
    raise(Errc::SetupFailed, "no applicable thread found for failing command: " + command);
  apply_thread_fix(s, handle, repo_dir, ref, prob.statement, *fix, ctx);
}

}  // namespace

SetupResult run_setup_phase(EngineServices& s, const Query& q,
                            const SearchResult& found, TrajectoryContext& ctx) {
  s.gateway.set_phase(PhaseId::Setup);
  SetupResult out;

  SandboxSpec spec;
  spec.network_enabled = s.sandbox_network;
  out.handle = s.sandbox.create(spec);
  out.repo_dir = found.ref.name();  // workspace-relative working tree

  // Materialize the repository into the workspace.
  ctx.require_budget();
  s.host.materialize(found.ref, out.handle.workspace_host / out.repo_dir);
  ctx.record(make_action(ActionKind::ShellCommand,
                         {{"command", "clone " + found.ref.full_name}}),
             "cloned into " + out.repo_dir, ObsStatus::Ok);

  // The README guides the installation plan; read it from the tree if Search
  // did not already fetch it.
  std::string readme = found.readme;
  if (readme.empty()) {
    ctx.require_budget();
    fs::path readme_host = s.sandbox.host_path(out.handle, out.repo_dir + "/README.md");
    if (fs::exists(readme_host)) {
      readme = read_file_text(readme_host);
      ctx.record(make_action(ActionKind::FileRead,
                             {{"path", out.repo_dir + "/README.md"}}),
                 readme, ObsStatus::Ok);
    }
  }

  // Ask the model for an installation plan.
  ctx.require_budget();
  auto plan_resp = s.gateway.complete_with_retry(
      subtask_request(TemplateKind::RepoSetup, {{"query", q.text},
                                                {"repo", found.ref.full_name},
                                                {"readme", readme},
                                                {"repo_dir", out.repo_dir}}),
      s.retry_limit);
  std::vector<std::string> plan;
  for (auto& line : split(arg_or(plan_resp.arguments, "commands"), '\n')) {
    std::string cmd = trim(line);
    if (!cmd.empty()) plan.push_back(cmd);
  }
  ctx.record(make_action(ActionKind::LlmSubtask, {{"subtask", "setup-plan"}}),
             plan.empty() ? "(no commands)" : join(plan, "\n"), ObsStatus::Ok);

  // Execute the plan. Each distinct failing command gets one repair cycle
  // (threads exploration, pull requests first) and one retry.
  std::set<std::string> repaired;
  std::size_t i = 0;
  while (i < plan.size()) {
    const std::string& cmd = plan[i];
    ctx.require_budget();
    CommandResult res = exec_in_repo(s, out.handle, out.repo_dir, cmd);
    ctx.record(make_action(ActionKind::ShellCommand, {{"command", cmd}}),
               compose_command_payload(res),
               res.ok() ? ObsStatus::Ok : ObsStatus::Error);
    if (res.ok()) {
      ++i;
      continue;
    }
    if (repaired.count(cmd))
      raise(Errc::SetupFailed, "command still failing after repair: " + cmd);
    repaired.insert(cmd);
    std::string error =
        clip_bytes(res.stderr_text.empty() ? res.stdout_text : res.stderr_text,
                   2000, true);
    repair_setup_failure(s, q, found.ref, out.handle, out.repo_dir, cmd, error, ctx);
    // loop without ++i: retry the repaired command
  }

  ctx.record(make_action(ActionKind::Submit, {}),
             "environment ready in " + out.repo_dir, ObsStatus::Ok);
  out.success = true;
  return out;
}

// ---- Apply -----------------------------------------------------------------

namespace {

/// Distills an oversized command stream through a model-written extraction
/// script so the agent keeps working on a short text.
std::string run_long_context(EngineServices& s, const Query& q,
                             SetupResult& setup, const std::string& stream_text,
                             TrajectoryContext& ctx) {
  const std::string dir = ".longctx";
  const std::string input_rel = dir + "/input.txt";
  const std::string script_rel = dir + "/extract.py";

  ctx.require_budget();
  fs::path input_host = s.sandbox.host_path(setup.handle, input_rel);
  fs::create_directories(input_host.parent_path());
  write_file_atomic(input_host, stream_text);
  ctx.record(make_action(ActionKind::FileWrite, {{"path", input_rel}}),
             "wrote " + std::to_string(stream_text.size()) + " bytes", ObsStatus::Ok);

  ctx.require_budget();
  auto resp = s.gateway.complete_with_retry(
      subtask_request(TemplateKind::LongContextProcessing,
                      {{"goal", q.text},
                       {"file", input_rel},
                       {"sample", stream_text.substr(0, 2048)}}),
      s.retry_limit);
  std::string script = arg_or(resp.arguments, "script");
  ctx.record(make_action(ActionKind::LlmSubtask, {{"subtask", "long-context"}}),
             script, ObsStatus::Ok);

  ctx.require_budget();
  write_file_atomic(s.sandbox.host_path(setup.handle, script_rel), script);
  ctx.record(make_action(ActionKind::FileWrite, {{"path", script_rel}}),
             "wrote " + std::to_string(script.size()) + " bytes", ObsStatus::Ok);

  ctx.require_budget();
  CommandResult res =
      s.sandbox.exec(setup.handle, "python3 " + script_rel + " " + input_rel,
                     s.budget.command_timeout_s);
  ctx.record(make_action(ActionKind::ShellCommand,
                         {{"command", "python3 " + script_rel + " " + input_rel}}),
             compose_command_payload(res),
             res.ok() ? ObsStatus::Ok : ObsStatus::Error);
  return res.stdout_text;
}

/// The explore_issues handler: finds the latest failure, walks threads
/// (issues first in this phase), applies a fix when one fits, then records
/// the triggering action with an outcome summary.
void handle_explore(EngineServices& s, const Query& q, const SearchResult& found,
                    SetupResult& setup, const std::string& hint,
                    TrajectoryContext& ctx) {
  // Latest failing command of this phase provides the problem context.
  std::string command, error;
  auto steps = ctx.history().phase_steps(PhaseId::Apply);
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const Step* st = *it;
    if (st->action.kind == ActionKind::ShellCommand &&
        st->observation.status == ObsStatus::Error) {
      command = arg_or(st->action.args, "command");
      error = st->observation.payload;
      break;
    }
  }

  std::string problem;
  if (!hint.empty()) {
    problem = hint;
  } else if (!command.empty()) {
    ctx.require_budget();
    ProblemStatement prob = s.experience.summarize_problem(q, command, error);
    ctx.record(make_action(ActionKind::LlmSubtask,
                           {{"subtask", "problem-abstraction"}}),
               prob.statement, ObsStatus::Ok);
    problem = prob.statement;
  } else {
    problem = q.text;
  }

  auto fix = s.experience.find_fix(found.ref, problem, ThreadKind::Issue, &ctx);
  std::string outcome;
  if (fix) {
    apply_thread_fix(s, setup.handle, setup.repo_dir, found.ref, problem, *fix, ctx);
    outcome = "applied fix from " + std::string(to_string(fix->kind)) + "#" +
              std::to_string(fix->thread_id);
    if (!fix->solution.empty()) outcome += ": " + fix->solution;
  } else {
    outcome = "no applicable thread found";
  }
  ctx.record(make_action(ActionKind::LlmSubtask,
                         {{"hint", hint}, {"subtask", "explore-threads"}}),
             outcome, ObsStatus::Ok);
}

}  // namespace

ApplyResult run_apply_phase(EngineServices& s, const Query& q,
                            const SearchResult& found, SetupResult& setup,
                            TrajectoryContext& ctx) {
  s.gateway.set_phase(PhaseId::Apply);

  // A reused repository skips Setup; its committed environment is restored
  // here as the first action of Apply.
  if (found.from_store && !setup.success) {
    ctx.require_budget();
    SandboxSpec spec;
    spec.network_enabled = s.sandbox_network;
    setup.handle = s.sandbox.restore_image(found.record->image.tag, spec);
    setup.repo_dir = found.ref.name();
    setup.success = true;
    ctx.record(make_action(ActionKind::ShellCommand,
                           {{"command", "restore-image"},
                            {"tag", found.record->image.tag}}),
               "restored image " + found.record->image.tag, ObsStatus::Ok);
  }

  ApplyResult out;
  std::string feedback;
  while (true) {
    ctx.require_budget();
    LlmResponse resp = agent_next(s, ctx, q, found.ref.full_name, feedback);
    feedback.clear();

    if (resp.function_name == "submit") {
      std::vector<std::string> artifacts;
      bool missing = false;
      for (auto& a : split(arg_or(resp.arguments, "artifacts"), ',')) {
        std::string rel = trim(a);
        if (rel.empty()) continue;
        fs::path host = s.sandbox.host_path(setup.handle, rel);
        if (!fs::exists(host)) {
          ctx.record(make_action(ActionKind::Submit, {{"artifacts", rel}}),
                     "submitted artifact does not exist: " + rel, ObsStatus::Error);
          feedback = "Artifact '" + rel + "' does not exist in the workspace.";
          missing = true;
          break;
        }
        artifacts.push_back(rel);
      }
      if (missing) continue;
      out.answer = arg_or(resp.arguments, "answer");
      out.summary = arg_or(resp.arguments, "summary");
      out.artifacts = std::move(artifacts);
      std::string payload = out.summary;
      if (!out.answer.empty()) payload += "\nanswer: " + out.answer;
      ctx.record(make_action(ActionKind::Submit,
                             {{"artifacts", arg_or(resp.arguments, "artifacts")}}),
                 payload, ObsStatus::Ok);
      out.success = true;
      return out;
    }

    if (resp.function_name == "run_shell") {
      const std::string cmd = arg_or(resp.arguments, "command");
      CommandResult res = exec_in_repo(s, setup.handle, setup.repo_dir, cmd);
      ctx.record(make_action(ActionKind::ShellCommand, {{"command", cmd}}),
                 compose_command_payload(res),
                 res.ok() ? ObsStatus::Ok : ObsStatus::Error);
      if (res.ok() && res.stdout_bytes > kLongContextThresholdBytes)
        run_long_context(s, q, setup, res.stdout_text, ctx);
      continue;
    }

    if (resp.function_name == "read_file") {
      const std::string rel = arg_or(resp.arguments, "path");
      try {
        std::string text = read_file_text(s.sandbox.host_path(setup.handle, rel));
        ctx.record(make_action(ActionKind::FileRead, {{"path", rel}}), text,
                   ObsStatus::Ok);
      } catch (const Error& e) {
        ctx.record(make_action(ActionKind::FileRead, {{"path", rel}}), e.what(),
                   ObsStatus::Error);
      }
      continue;
    }

    if (resp.function_name == "write_file") {
      const std::string rel = arg_or(resp.arguments, "path");
      FileEdit edit;
      edit.mode = EditMode::ReplaceWhole;
      edit.path = rel;
      edit.payload = arg_or(resp.arguments, "content");
      try {
        std::string summary = s.sandbox.apply_edit(setup.handle, edit);
        ctx.record(make_action(ActionKind::FileWrite,
                               {{"mode", "ReplaceWhole"}, {"path", rel}}),
                   summary, ObsStatus::Ok);
      } catch (const Error& e) {
        ctx.record(make_action(ActionKind::FileWrite,
                               {{"mode", "ReplaceWhole"}, {"path", rel}}),
                   e.what(), ObsStatus::Error);
        feedback = e.what();
      }
      continue;
    }

    if (resp.function_name == "explore_issues") {
      handle_explore(s, q, found, setup, arg_or(resp.arguments, "hint"), ctx);
      continue;
    }

    raise(Errc::UnknownAction, "unsupported function: " + resp.function_name);
  }
}

// ---- Store -----------------------------------------------------------------

StoreResult run_store_phase(EngineServices& s, const Query& q,
                            const SearchResult& found, SetupResult& setup,
                            const ApplyResult& applied, TrajectoryContext& ctx) {
  s.gateway.set_phase(PhaseId::Store);
  StoreResult out;
  if (found.from_store) {
    ctx.marker("store-skipped-reused");
    out.skipped = true;
    out.success = true;
    out.image = found.record->image;
    out.function_description = found.record->function_description;
    out.experience = found.record->experience;
    return out;
  }
  if (!applied.success) {
    ctx.marker("store-skipped-apply-failed");
    out.skipped = true;
    return out;
  }

  std::string feedback;
  bool committed = false;
  while (true) {
    ctx.require_budget();
    LlmResponse resp = agent_next(s, ctx, q, found.ref.full_name, feedback);
    feedback.clear();

    if (resp.function_name == "commit_image") {
      std::string tag = arg_or(resp.arguments, "tag");
      if (tag.empty() || tag == "auto")
        tag = image_tag_for(found.ref.owner(), found.ref.name(), q.digest());
      out.image = s.sandbox.commit_image(setup.handle, tag);
      committed = true;
      ctx.record(make_action(ActionKind::ShellCommand,
                             {{"command", "commit-image"}, {"tag", tag}}),
                 "committed image " + tag, ObsStatus::Ok);
      continue;
    }

    // submit
    if (!committed) {
      ctx.record(make_action(ActionKind::Submit, {}),
                 arg_or(resp.arguments, "summary"), ObsStatus::Ok);
      return out;  // nothing persisted; phase reports failure
    }
    ctx.require_budget();
    out.function_description = s.experience.describe_function(found.ref, q,
                                                              ctx.history());
    ctx.record(make_action(ActionKind::LlmSubtask,
                           {{"subtask", "describe-function"}}),
               out.function_description, ObsStatus::Ok);
    ctx.require_budget();
    out.experience = s.experience.summarize_experience(found.ref, q, ctx.history());
    ctx.record(make_action(ActionKind::LlmSubtask,
                           {{"subtask", "summarize-experience"}}),
               out.experience, ObsStatus::Ok);

    RepoRecord rec;
    rec.ref = found.ref;
    rec.image = out.image;
    rec.function_description = out.function_description;
    rec.experience = out.experience;
    rec.query_digest = q.digest();
    rec.created_at_ms = now_ms();
    s.store.put(rec);
    ctx.marker("stored:" + found.ref.full_name);

    ctx.record(make_action(ActionKind::Submit, {}),
               arg_or(resp.arguments, "summary"), ObsStatus::Ok);
    out.success = true;
    return out;
  }
}

}  // namespace repoforge
