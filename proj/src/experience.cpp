// SPDX-License-Identifier: Apache-2.0
#include "repoforge/experience.hpp"

#include "repoforge/util.hpp"

namespace repoforge {

namespace {

std::string flatten(std::string s) {
  s = replace_all(std::move(s), "\r", "");
  return replace_all(std::move(s), "\n", " | ");
}

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

}  // namespace

ExperienceEngine::ExperienceEngine(Gateway& gateway, RepoHost& host, RunBudget budget)
    : gateway_(gateway), host_(host), budget_(budget) {}

ProblemStatement ExperienceEngine::summarize_problem(const Query& query,
                                                     const std::string& command,
                                                     const std::string& error) {
  auto resp = gateway_.complete_with_retry(
      subtask_request(TemplateKind::ProblemAbstraction, {{"query", query.text},
                                                         {"command", command},
                                                         {"error", error}}));
  ProblemStatement out;
  out.statement = arg_or(resp.arguments, "statement");
  out.command = command;
  out.error = error;
  return out;
}

std::optional<ThreadJudgment> ExperienceEngine::explore_threads(
    const RepoRef& ref, const std::string& problem, ThreadKind kind,
    StepSink* sink) {
  auto threads =
      host_.search_threads(ref, problem, kind, budget_.max_threads_reviewed);
  for (const auto& t : threads) {
    std::map<std::string, std::string> bindings = {
        {"problem", problem},
        {"thread_id", std::to_string(t.id)},
        {"title", t.title},
        {"body", t.body}};
    std::string diff;
    if (kind == ThreadKind::PullRequest) {
      for (const auto& f : host_.fetch_pr_files(ref, t.id)) diff += f.diff;
      bindings["diff"] = diff;
    }
    const TemplateKind tpl = kind == ThreadKind::PullRequest
                                 ? TemplateKind::PrExploration
                                 : TemplateKind::IssuesExploration;
    auto resp = gateway_.complete_with_retry(subtask_request(tpl, bindings));
    ThreadJudgment j;
    j.thread_id = t.id;
    j.kind = kind;
    j.applicable = arg_or(resp.arguments, "applicable") == "true";
    j.solution = arg_or(resp.arguments, "solution");
    j.diff = diff;
    j.title = t.title;
    if (sink) {
      Action a;
      a.kind = ActionKind::LlmSubtask;
      a.args = {{"subtask", "judge-thread"},
                {"thread", std::string(to_string(kind)) + "#" + std::to_string(t.id)}};
      a.issued_at_ms = now_ms();
      std::string payload = j.applicable ? "applicable" : "not-applicable";
      if (!j.solution.empty()) payload += ": " + j.solution;
      sink->record(std::move(a), std::move(payload), ObsStatus::Ok);
    }
    if (j.applicable) return j;
  }
  return std::nullopt;
}

std::optional<ThreadJudgment> ExperienceEngine::find_fix(const RepoRef& ref,
                                                         const std::string& problem,
                                                         ThreadKind first,
                                                         StepSink* sink) {
  if (auto hit = explore_threads(ref, problem, first, sink)) return hit;
  const ThreadKind other = first == ThreadKind::PullRequest
                               ? ThreadKind::Issue
                               : ThreadKind::PullRequest;
  return explore_threads(ref, problem, other, sink);
}

std::string ExperienceEngine::describe_function(const RepoRef& ref, const Query& query,
                                                const History& history) {
  auto resp = gateway_.complete_with_retry(subtask_request(
      TemplateKind::FunctionDescription, {{"repo", ref.full_name},
                                          {"query", query.text},
                                          {"history", render_history_tail(history)}}));
  return arg_or(resp.arguments, "text");
}

std::string ExperienceEngine::summarize_experience(const RepoRef& ref,
                                                   const Query& query,
                                                   const History& history) {
  auto resp = gateway_.complete_with_retry(subtask_request(
      TemplateKind::ExperienceSummarization,
      {{"repo", ref.full_name},
       {"query", query.text},
       {"history", render_history_tail(history)}}));
  return arg_or(resp.arguments, "text");
}

std::string ExperienceEngine::render_history_tail(const History& history,
                                                  std::size_t max_bytes) {
  std::vector<std::string> lines;
  lines.reserve(history.steps().size());
  for (const auto& s : history.steps()) {
    std::string line = "#" + std::to_string(s.seq) + " " + to_string(s.action.kind);
    for (const auto& [k, v] : s.action.args)
      line += " " + k + "=" + clip_bytes(flatten(v), 120, false);
    line += " -> ";
    line += to_string(s.observation.status);
    line += ": " + clip_bytes(flatten(s.observation.payload), 400, true);
    lines.push_back(std::move(line));
  }
  if (lines.empty()) return "(no steps yet)";
  return clip_bytes(join(lines, "\n"), max_bytes, true);
}

}  // namespace repoforge
