// SPDX-License-Identifier: Apache-2.0
#include <nlohmann/json.hpp>

#include "repoforge/errors.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/spool.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

const char* to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::AgentSystem: return "AgentSystem";
    case TemplateKind::StoredRepoRetrieval: return "StoredRepoRetrieval";
    case TemplateKind::TopicGeneration: return "TopicGeneration";
    case TemplateKind::FunctionJudgment: return "FunctionJudgment";
    case TemplateKind::RepoSetup: return "RepoSetup";
    case TemplateKind::FileModification: return "FileModification";
    case TemplateKind::PrExploration: return "PrExploration";
    case TemplateKind::IssuesExploration: return "IssuesExploration";
    case TemplateKind::LongContextProcessing: return "LongContextProcessing";
    case TemplateKind::FunctionDescription: return "FunctionDescription";
    case TemplateKind::ExperienceSummarization: return "ExperienceSummarization";
    case TemplateKind::ProblemAbstraction: return "ProblemAbstraction";
  }
  return "?";
}

TemplateKind template_kind_from_string(const std::string& s) {
  for (TemplateKind k : all_template_kinds())
    if (s == to_string(k)) return k;
  raise(Errc::UnknownTemplate, "unknown template kind '" + s + "'");
}

const std::vector<TemplateKind>& all_template_kinds() {
  static const std::vector<TemplateKind> kAll = {
      TemplateKind::AgentSystem,        TemplateKind::StoredRepoRetrieval,
      TemplateKind::TopicGeneration,    TemplateKind::FunctionJudgment,
      TemplateKind::RepoSetup,          TemplateKind::FileModification,
      TemplateKind::PrExploration,      TemplateKind::IssuesExploration,
      TemplateKind::LongContextProcessing, TemplateKind::FunctionDescription,
      TemplateKind::ExperienceSummarization, TemplateKind::ProblemAbstraction,
  };
  return kAll;
}

TemplateCatalog TemplateCatalog::builtin() {
  TemplateCatalog c;
  c.bodies_[TemplateKind::AgentSystem] =
      "You are RepoForge, an autonomous engineer that extends its abilities by\n"
      "adopting code repositories as tools.\n"
      "User query: {{query}}\n"
      "Phase: {{phase}}\n"
      "Repository: {{repo}}\n"
      "Recent steps:\n{{history}}\n"
      "{{feedback}}\n"
      "Decide the next tool call. Work inside the sandbox workspace; paths are\n"
      "relative to it. Call submit once the phase goal is met.";
  c.bodies_[TemplateKind::StoredRepoRetrieval] =
      "A repository was used successfully in the past. Decide whether it also\n"
      "suits the new query.\n"
      "New query: {{query}}\n"
      "Repository: {{repo}}\n"
      "What it does: {{function_description}}\n"
      "Practice experience: {{experience}}\n"
      "Call judge_suitability with your verdict and a short reason.";
  c.bodies_[TemplateKind::TopicGeneration] =
      "Produce up to five GitHub topic slugs (lowercase, dash-separated) that a\n"
      "repository able to solve this task would be tagged with.\n"
      "Task: {{query}}\n"
      "Call emit_topics with the slugs as a comma-separated list.";
  c.bodies_[TemplateKind::FunctionJudgment] =
      "Judge from its README whether this repository can carry out the task.\n"
      "Task: {{query}}\n"
      "Repository: {{repo}}\n"
      "README:\n{{readme}}\n"
      "Call judge_function with suitable=true/false and a short reason.";
  c.bodies_[TemplateKind::RepoSetup] =
      "Plan the shell commands that prepare this repository for use, following\n"
      "its README. The repository is cloned at {{repo_dir}} inside the\n"
      "workspace; commands run from the workspace root.\n"
      "Task: {{query}}\n"
      "Repository: {{repo}}\n"
      "README:\n{{readme}}\n"
      "Call emit_setup_plan with the commands, one per line.";
  c.bodies_[TemplateKind::FileModification] =
      "Turn the solution guidance into one concrete file edit.\n"
      "Problem: {{problem}}\n"
      "Guidance: {{solution}}\n"
      "Repository: {{repo}}\n"
      "Call propose_edit. Use mode=SearchReplace with search/replace and\n"
      "expected_matches, mode=ReplaceWhole with content, or mode=ApplyDiff\n"
      "with a unified diff.";
  c.bodies_[TemplateKind::PrExploration] =
      "Judge whether this pull request resolves the problem; if it does,\n"
      "summarize how.\n"
      "Problem: {{problem}}\n"
      "Pull request #{{thread_id}}: {{title}}\n"
      "{{body}}\n"
      "Diff:\n{{diff}}\n"
      "Call judge_thread with applicable=true/false and the solution.";
  c.bodies_[TemplateKind::IssuesExploration] =
      "Judge whether this issue thread resolves the problem; if it does,\n"
      "summarize the fix it describes.\n"
      "Problem: {{problem}}\n"
      "Issue #{{thread_id}}: {{title}}\n"
      "{{body}}\n"
      "Call judge_thread with applicable=true/false and the solution.";
  c.bodies_[TemplateKind::LongContextProcessing] =
      "An output stream was too large to read directly. Write a short python3\n"
      "script that reads the file given as argv[1] and prints only what the\n"
      "goal needs.\n"
      "Goal: {{goal}}\n"
      "File: {{file}}\n"
      "First bytes of the stream:\n{{sample}}\n"
      "Call emit_extraction_script with the script source.";
  c.bodies_[TemplateKind::FunctionDescription] =
      "Describe what this repository does and what inputs/outputs it handles,\n"
      "so a later run can decide whether to reuse it.\n"
      "Repository: {{repo}}\n"
      "Original task: {{query}}\n"
      "Work so far:\n{{history}}\n"
      "Call emit_description with the description.";
  c.bodies_[TemplateKind::ExperienceSummarization] =
      "Summarize the practice experience of using this repository: pitfalls\n"
      "hit, fixes applied, and the working invocation.\n"
      "Repository: {{repo}}\n"
      "Task: {{query}}\n"
      "Work so far:\n{{history}}\n"
      "Call emit_experience with the summary.";
  c.bodies_[TemplateKind::ProblemAbstraction] =
      "Condense this failure into a short statement suitable for searching the\n"
      "repository's issue and pull-request threads.\n"
      "Task: {{query}}\n"
      "Failing command: {{command}}\n"
      "Error output:\n{{error}}\n"
      "Call emit_problem with the statement.";
  return c;
}

std::vector<std::string> TemplateCatalog::placeholders(const std::string& body) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = body.find("{{", pos)) != std::string::npos) {
    std::size_t end = body.find("}}", pos + 2);
    if (end == std::string::npos) break;
    out.push_back(body.substr(pos + 2, end - pos - 2));
    pos = end + 2;
  }
  return out;
}

const std::string& TemplateCatalog::body(TemplateKind kind) const {
  auto it = bodies_.find(kind);
  if (it == bodies_.end())
    raise(Errc::UnknownTemplate, std::string("no body for ") + to_string(kind));
  return it->second;
}

std::string TemplateCatalog::render(
    TemplateKind kind, const std::map<std::string, std::string>& bindings) const {
  std::string out = body(kind);
  for (const std::string& name : placeholders(out)) {
    auto it = bindings.find(name);
    if (it == bindings.end())
      raise(Errc::MissingBinding,
            std::string(to_string(kind)) + " needs binding '" + name + "'");
    // Logs and histories matter most at the end; documents at the start.
    bool keep_tail = name == "history" || name == "error" || name == "feedback";
    out = replace_all(out, "{{" + name + "}}",
                      clip_bytes(it->second, kBindingCapBytes, keep_tail));
  }
  return out;
}

void CostLedger::record_call(PhaseId phase, const Usage& usage) {
  ++calls_;
  prompt_ += usage.prompt_tokens;
  completion_ += usage.completion_tokens;
  ++phase_calls_[phase];
  phase_tokens_[phase] += usage.prompt_tokens + usage.completion_tokens;
}

void CostLedger::record_retry() { ++retries_; }

std::int64_t CostLedger::calls_in(PhaseId phase) const {
  auto it = phase_calls_.find(phase);
  return it == phase_calls_.end() ? 0 : it->second;
}

std::string CostLedger::to_json_text() const {
  json per = json::object();
  for (const auto& [p, c] : phase_calls_) {
    per[to_string(p)] = {{"llm_calls", c},
                         {"tokens", phase_tokens_.at(p)}};
  }
  json j = {{"llm_calls", calls_},
            {"prompt_tokens", prompt_},
            {"completion_tokens", completion_},
            {"total_tokens", prompt_ + completion_},
            {"retries", retries_},
            {"per_phase", per}};
  return j.dump();
}

std::vector<FunctionSchema> phase_function_schemas(PhaseId phase) {
  auto p = [](std::string type, bool required, std::string desc) {
    ParamSpec s;
    s.type = std::move(type);
    s.required = required;
    s.description = std::move(desc);
    return s;
  };
  FunctionSchema submit{"submit", "Finish the current phase.", {}};
  submit.parameters["summary"] = p("string", true, "what was accomplished");

  FunctionSchema run_shell{"run_shell", "Run a shell command in the sandbox.", {}};
  run_shell.parameters["command"] = p("string", true, "POSIX sh command line");

  FunctionSchema read_file{"read_file", "Read a workspace file.", {}};
  read_file.parameters["path"] = p("string", true, "workspace-relative path");

  FunctionSchema write_file{"write_file", "Write a workspace file.", {}};
  write_file.parameters["path"] = p("string", true, "workspace-relative path");
  write_file.parameters["content"] = p("string", true, "full new content");

  std::vector<FunctionSchema> out;
  switch (phase) {
    case PhaseId::Search: {
      FunctionSchema api{"github_api", "Query the repository host.", {}};
      api.parameters["api"] = p("string", true,
                                "search_by_name | search_by_topic | fetch_readme");
      api.parameters["argument"] = p("string", true, "name, topic or owner/repo");
      api.parameters["limit"] = p("int", false, "max results");
      out = {api, submit};
      break;
    }
    case PhaseId::Setup:
      out = {run_shell, read_file, write_file, submit};
      break;
    case PhaseId::Apply: {
      FunctionSchema explore{"explore_issues",
                             "Search the repository's threads for a fix to the "
                             "latest failure and apply it.",
                             {}};
      explore.parameters["hint"] = p("string", false, "extra search terms");
      FunctionSchema apply_submit = submit;
      apply_submit.parameters["answer"] = p("string", true, "answer to the query");
      apply_submit.parameters["artifacts"] =
          p("string", false, "comma-separated workspace paths of outputs");
      out = {run_shell, read_file, write_file, explore, apply_submit};
      break;
    }
    case PhaseId::Store: {
      FunctionSchema commit{"commit_image", "Snapshot the environment.", {}};
      commit.parameters["tag"] = p("string", true, "image tag");
      out = {commit, submit};
      break;
    }
  }
  return out;
}

std::vector<FunctionSchema> subtask_function_schema(TemplateKind kind) {
  auto p = [](std::string type, bool required) {
    ParamSpec s;
    s.type = std::move(type);
    s.required = required;
    return s;
  };
  FunctionSchema f;
  switch (kind) {
    case TemplateKind::StoredRepoRetrieval:
      f.name = "judge_suitability";
      f.parameters["suitable"] = p("bool", true);
      f.parameters["reason"] = p("string", true);
      break;
    case TemplateKind::TopicGeneration:
      f.name = "emit_topics";
      f.parameters["topics"] = p("string", true);  // comma-separated slugs
      break;
    case TemplateKind::FunctionJudgment:
      f.name = "judge_function";
      f.parameters["suitable"] = p("bool", true);
      f.parameters["reason"] = p("string", true);
      break;
    case TemplateKind::RepoSetup:
      f.name = "emit_setup_plan";
      f.parameters["commands"] = p("string", true);  // newline-separated
      break;
    case TemplateKind::FileModification:
      f.name = "propose_edit";
      f.parameters["path"] = p("string", true);
      f.parameters["mode"] = p("string", true);
      f.parameters["search"] = p("string", false);
      f.parameters["replace"] = p("string", false);
      f.parameters["content"] = p("string", false);
      f.parameters["diff"] = p("string", false);
      f.parameters["expected_matches"] = p("int", false);
      break;
    case TemplateKind::PrExploration:
    case TemplateKind::IssuesExploration:
      f.name = "judge_thread";
      f.parameters["applicable"] = p("bool", true);
      f.parameters["solution"] = p("string", false);
      break;
    case TemplateKind::LongContextProcessing:
      f.name = "emit_extraction_script";
      f.parameters["script"] = p("string", true);
      break;
    case TemplateKind::FunctionDescription:
      f.name = "emit_description";
      f.parameters["text"] = p("string", true);
      break;
    case TemplateKind::ExperienceSummarization:
      f.name = "emit_experience";
      f.parameters["text"] = p("string", true);
      break;
    case TemplateKind::ProblemAbstraction:
      f.name = "emit_problem";
      f.parameters["statement"] = p("string", true);
      break;
    case TemplateKind::AgentSystem:
      raise(Errc::UnknownTemplate, "AgentSystem uses phase_function_schemas");
  }
  return {f};
}

}  // namespace repoforge
