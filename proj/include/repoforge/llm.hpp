// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repoforge/types.hpp"

namespace repoforge {

namespace fs = std::filesystem;

/// Prompt template families. Each named subtask in the engine maps to exactly
/// one of these.
enum class TemplateKind {
  AgentSystem,
  StoredRepoRetrieval,
  TopicGeneration,
  FunctionJudgment,
  RepoSetup,
  FileModification,
  PrExploration,
  IssuesExploration,
  LongContextProcessing,
  FunctionDescription,
  ExperienceSummarization,
  ProblemAbstraction,
};

const char* to_string(TemplateKind k);
TemplateKind template_kind_from_string(const std::string& s);
const std::vector<TemplateKind>& all_template_kinds();

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct ParamSpec {
  std::string type = "string";
  bool required = false;
  std::string description;
};

/// Declared function the model may call; name plus typed parameters.
struct FunctionSchema {
  std::string name;
  std::string description;
  std::map<std::string, ParamSpec> parameters;
};

struct LlmRequest {
  TemplateKind template_kind = TemplateKind::AgentSystem;
  std::map<std::string, std::string> bindings;
  std::vector<FunctionSchema> functions;
};

/// A validated function call: the only shape the engine accepts from a model.
struct LlmResponse {
  std::string function_name;
  std::map<std::string, std::string> arguments;
  Usage usage;
};

/// Raw provider outcome before validation. A malformed (non function-call)
/// reply arrives with empty function_name and the prose in `text`.
struct RawCompletion {
  std::string function_name;
  std::map<std::string, std::string> arguments;
  Usage usage;
  std::string text;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual RawCompletion complete(const std::string& prompt, const LlmRequest& req) = 0;
  virtual std::string name() const = 0;
};

/// Placeholder templates ({{name}} markers). Render fails on unbound
/// placeholders; binding values are clipped at kBindingCapBytes.
class TemplateCatalog {
 public:
  static TemplateCatalog builtin();
  std::string render(TemplateKind kind,
                     const std::map<std::string, std::string>& bindings) const;
  const std::string& body(TemplateKind kind) const;
  /// Placeholder names occurring in a template body.
  static std::vector<std::string> placeholders(const std::string& body);

 private:
  std::map<TemplateKind, std::string> bodies_;
};

/// Per-phase call/token accounting. Retries are counted both as calls and in
/// the dedicated retry counter.
class CostLedger {
 public:
  void record_call(PhaseId phase, const Usage& usage);
  void record_retry();
  std::int64_t llm_calls() const { return calls_; }
  std::int64_t prompt_tokens() const { return prompt_; }
  std::int64_t completion_tokens() const { return completion_; }
  std::int64_t total_tokens() const { return prompt_ + completion_; }
  std::int64_t retries() const { return retries_; }
  std::int64_t calls_in(PhaseId phase) const;
  std::string to_json_text() const;

 private:
  std::int64_t calls_ = 0, prompt_ = 0, completion_ = 0, retries_ = 0;
  std::map<PhaseId, std::int64_t> phase_calls_;
  std::map<PhaseId, std::int64_t> phase_tokens_;
};

// ---- scripted backend ------------------------------------------------------

/// One deterministic playbook rule. Matches on template kind plus required
/// prompt substrings; replies with either a fixed function call or a
/// deliberately malformed text.
struct ScriptRule {
  TemplateKind kind = TemplateKind::AgentSystem;
  std::vector<std::string> contains;
  bool once = false;
  int order = 0;  // explicit "order" or the rule's array index
  bool has_explicit_order = false;
  // response (exactly one of function call / malformed text)
  std::string function_name;
  std::map<std::string, std::string> arguments;
  std::optional<std::string> malformed_text;
  Usage usage;
  // runtime
  bool consumed = false;
  int index = 0;
};

/// Deterministic offline stand-in for a model: rules are tried in order and
/// the first match answers. Exhausted `once` rules fall through.
class ScriptedBackend : public LlmBackend {
 public:
  static ScriptedBackend load(const fs::path& rule_file);
  static ScriptedBackend from_json_text(const std::string& text);

  RawCompletion complete(const std::string& prompt, const LlmRequest& req) override;
  std::string name() const override { return "scripted"; }

  /// Number of complete() calls that found a rule (== rules consumed).
  std::int64_t matches_served() const { return served_; }
  const std::vector<ScriptRule>& rules() const { return rules_; }

 private:
  std::vector<ScriptRule> rules_;
  std::int64_t served_ = 0;
};

// ---- live backend ----------------------------------------------------------

struct HttpBackendConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8089"
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4-32k";
  std::string credential_env = "REPOFORGE_API_KEY";  // value is never logged
  double temperature = 0.6;
  int timeout_s = 60;
};

/// OpenAI-style chat-completions client with function calling.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);
  RawCompletion complete(const std::string& prompt, const LlmRequest& req) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig cfg_;
  std::string credential_;
};

// ---- gateway ---------------------------------------------------------------

/// Single choke point between the engine and any model. Renders the template,
/// calls the backend, validates the reply against the declared functions, and
/// books the cost. Validation failures throw (MalformedResponse /
/// SchemaViolation); the retry policy lives at call sites.
class Gateway {
 public:
  Gateway(LlmBackend& backend, TemplateCatalog catalog);

  void set_phase(PhaseId phase) { phase_ = phase; }
  PhaseId phase() const { return phase_; }

  std::string render(TemplateKind kind,
                     const std::map<std::string, std::string>& bindings) const;
  LlmResponse complete(const LlmRequest& req);

  /// complete() plus the standard retry policy: up to `max_retries` fresh
  /// attempts after a malformed or schema-violating reply, the error text
  /// appended to a `feedback` binding. Each retry books an extra call.
  LlmResponse complete_with_retry(LlmRequest req, int max_retries = 3);

  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }
  const TemplateCatalog& catalog() const { return catalog_; }

 private:
  LlmBackend& backend_;
  TemplateCatalog catalog_;
  CostLedger ledger_;
  PhaseId phase_ = PhaseId::Search;
};

/// Function schemas available to the reactive loop in a given phase. Submit is
/// always a member.
std::vector<FunctionSchema> phase_function_schemas(PhaseId phase);
/// Single-function schema set for a named subtask template.
std::vector<FunctionSchema> subtask_function_schema(TemplateKind kind);

}  // namespace repoforge
