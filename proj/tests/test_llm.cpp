// SPDX-License-Identifier: Apache-2.0
// Model plumbing: template rendering, the deterministic scripted backend, and
// the gateway's validation / retry / cost-booking contract.
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <string>

#include "repoforge/errors.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/spool.hpp"
#include "repoforge/util.hpp"

using namespace repoforge;
using nlohmann::json;

namespace {

LlmRequest subtask_req(TemplateKind kind,
                       std::map<std::string, std::string> bindings) {
  LlmRequest req;
  req.template_kind = kind;
  req.bindings = std::move(bindings);
  req.functions = subtask_function_schema(kind);
  return req;
}

std::string rules_text(const std::string& rules_array_json) {
  return "{\"rules\":" + rules_array_json + "}";
}

}  // namespace

// ---- templates -------------------------------------------------------------

TEST_CASE("builtin catalog has a body for every template kind") {
  TemplateCatalog c = TemplateCatalog::builtin();
  for (TemplateKind k : all_template_kinds()) {
    CHECK_FALSE(c.body(k).empty());
    CHECK_FALSE(TemplateCatalog::placeholders(c.body(k)).empty());
  }
}

TEST_CASE("template kind names round-trip") {
  for (TemplateKind k : all_template_kinds())
    CHECK(template_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(template_kind_from_string("NoSuchKind"), Error);
}

TEST_CASE("placeholders extraction") {
  auto names = TemplateCatalog::placeholders("a {{x}} b {{y}} {{x}}");
  CHECK(names == std::vector<std::string>{"x", "y", "x"});
  CHECK(TemplateCatalog::placeholders("no markers").empty());
}

TEST_CASE("render substitutes bindings and rejects missing ones") {
  TemplateCatalog c = TemplateCatalog::builtin();
  std::string out = c.render(TemplateKind::TopicGeneration,
                             {{"query", "fold proteins"}, {"unused", "ignored"}});
  CHECK(out.find("fold proteins") != std::string::npos);
  CHECK(out.find("{{") == std::string::npos);   // nothing left unexpanded
  CHECK(out.find("ignored") == std::string::npos);  // extra bindings are inert

  try {
    c.render(TemplateKind::TopicGeneration, {});
    FAIL("render accepted a missing binding");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingBinding);
    CHECK(std::string(e.what()).find("query") != std::string::npos);
  }
}

TEST_CASE("render clips oversized bindings, keeping the relevant end") {
  TemplateCatalog c = TemplateCatalog::builtin();
  // Documents keep their start...
  std::string big_query = "QSTART" + std::string(kBindingCapBytes + 4000, 'q');
  std::string out = c.render(TemplateKind::TopicGeneration, {{"query", big_query}});
  CHECK(out.find("QSTART") != std::string::npos);
  CHECK(out.find("[...clipped...]") != std::string::npos);
  CHECK(out.size() < big_query.size());

  // ...histories keep their end.
  std::string big_history = std::string(kBindingCapBytes + 4000, 'h') + "HEND";
  out = c.render(TemplateKind::AgentSystem, {{"query", "q"},
                                             {"phase", "Apply"},
                                             {"repo", "o/r"},
                                             {"history", big_history},
                                             {"feedback", ""}});
  CHECK(out.find("HEND") != std::string::npos);
  CHECK(out.find("[...clipped...]") != std::string::npos);
}

// ---- scripted backend --------------------------------------------------------

TEST_CASE("scripted rules match on kind plus prompt substrings, in order") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration", "contains": ["folding"]},
     "respond": {"function": "emit_topics", "arguments": {"topics": "protein-folding"}}},
    {"match": {"kind": "TopicGeneration"},
     "respond": {"function": "emit_topics", "arguments": {"topics": "generic"}}}
  ])"));
  LlmRequest req = subtask_req(TemplateKind::TopicGeneration, {});
  CHECK(b.complete("prompt about folding", req).arguments.at("topics") ==
        "protein-folding");
  CHECK(b.complete("prompt about nothing", req).arguments.at("topics") == "generic");
  CHECK(b.matches_served() == 2);
}

TEST_CASE("consumed once rules fall through to later rules") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "RepoSetup", "once": true},
     "respond": {"function": "emit_setup_plan", "arguments": {"commands": "first"}}},
    {"match": {"kind": "RepoSetup"},
     "respond": {"function": "emit_setup_plan", "arguments": {"commands": "after"}}}
  ])"));
  LlmRequest req = subtask_req(TemplateKind::RepoSetup, {});
  CHECK(b.complete("p", req).arguments.at("commands") == "first");
  CHECK(b.complete("p", req).arguments.at("commands") == "after");
  CHECK(b.complete("p", req).arguments.at("commands") == "after");
  CHECK(b.matches_served() == 3);
}

TEST_CASE("explicit order beats file order") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration", "contains": ["x"], "order": 5},
     "respond": {"function": "emit_topics", "arguments": {"topics": "late"}}},
    {"match": {"kind": "TopicGeneration", "contains": ["x"], "order": 1},
     "respond": {"function": "emit_topics", "arguments": {"topics": "early"}}}
  ])"));
  LlmRequest req = subtask_req(TemplateKind::TopicGeneration, {});
  CHECK(b.complete("x", req).arguments.at("topics") == "early");
}

TEST_CASE("indistinguishable always-live rules are rejected at load") {
  const std::string ambiguous = rules_text(R"([
    {"match": {"kind": "TopicGeneration", "contains": ["b", "a"]},
     "respond": {"function": "emit_topics", "arguments": {"topics": "one"}}},
    {"match": {"kind": "TopicGeneration", "contains": ["a", "b"]},
     "respond": {"function": "emit_topics", "arguments": {"topics": "two"}}}
  ])");
  try {
    ScriptedBackend::from_json_text(ambiguous);
    FAIL("ambiguous playbook was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ScriptAmbiguity);
  }

  // once or an explicit order resolves the ambiguity.
  CHECK_NOTHROW(ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration", "contains": ["a"], "once": true},
     "respond": {"function": "emit_topics", "arguments": {"topics": "one"}}},
    {"match": {"kind": "TopicGeneration", "contains": ["a"]},
     "respond": {"function": "emit_topics", "arguments": {"topics": "two"}}}
  ])")));
  CHECK_NOTHROW(ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration", "contains": ["a"], "order": 1},
     "respond": {"function": "emit_topics", "arguments": {"topics": "one"}}},
    {"match": {"kind": "TopicGeneration", "contains": ["a"]},
     "respond": {"function": "emit_topics", "arguments": {"topics": "two"}}}
  ])")));
}

TEST_CASE("no matching rule names the template and shows the prompt head") {
  auto b = ScriptedBackend::from_json_text(rules_text("[]"));
  LlmRequest req = subtask_req(TemplateKind::ProblemAbstraction, {});
  try {
    b.complete("the prompt that nobody scripted", req);
    FAIL("matched an empty playbook");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoMatchingRule);
    CHECK(std::string(e.what()).find("ProblemAbstraction") != std::string::npos);
    CHECK(std::string(e.what()).find("the prompt that nobody scripted") !=
          std::string::npos);
  }
}

TEST_CASE("malformed responses carry prose and count as served") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration"},
     "respond_malformed": "Sure! Here are some topics you could try.",
     "usage": {"prompt_tokens": 10, "completion_tokens": 5}}
  ])"));
  LlmRequest req = subtask_req(TemplateKind::TopicGeneration, {});
  RawCompletion raw = b.complete("p", req);
  CHECK(raw.function_name.empty());
  CHECK(raw.text == "Sure! Here are some topics you could try.");
  CHECK(raw.usage.prompt_tokens == 10);
  CHECK(b.matches_served() == 1);
}

TEST_CASE("rule files are validated with a parse location") {
  CHECK_THROWS_AS(ScriptedBackend::from_json_text("{\n  \"rules\": [\n  oops"),
                  ScriptParseError);
  try {
    ScriptedBackend::from_json_text("{\n  \"rules\": [\n  oops");
  } catch (const ScriptParseError& e) {
    CHECK(e.line() == 3);
  }
  // exactly one of respond / respond_malformed
  CHECK_THROWS_AS(ScriptedBackend::from_json_text(rules_text(
                      R"([{"match": {"kind": "TopicGeneration"}}])")),
                  ScriptParseError);
  CHECK_THROWS_AS(
      ScriptedBackend::from_json_text(rules_text(
          R"([{"match": {"kind": "TopicGeneration"},
               "respond": {"function": "f"}, "respond_malformed": "x"}])")),
      ScriptParseError);
  CHECK_THROWS_AS(ScriptedBackend::from_json_text(rules_text(
                      R"([{"respond": {"function": "f"}}])")),
                  ScriptParseError);
}

// ---- gateway ---------------------------------------------------------------

TEST_CASE("gateway books cost per phase and validates replies") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration"},
     "respond": {"function": "emit_topics", "arguments": {"topics": "chemistry"}},
     "usage": {"prompt_tokens": 100, "completion_tokens": 20}}
  ])"));
  Gateway g(b, TemplateCatalog::builtin());
  g.set_phase(PhaseId::Search);
  LlmRequest req = subtask_req(TemplateKind::TopicGeneration, {{"query", "q"}});
  LlmResponse resp = g.complete(req);
  CHECK(resp.function_name == "emit_topics");
  CHECK(resp.arguments.at("topics") == "chemistry");
  CHECK(g.ledger().llm_calls() == 1);
  CHECK(g.ledger().calls_in(PhaseId::Search) == 1);
  CHECK(g.ledger().calls_in(PhaseId::Apply) == 0);
  CHECK(g.ledger().prompt_tokens() == 100);
  CHECK(g.ledger().completion_tokens() == 20);
  CHECK(g.ledger().total_tokens() == 120);
  CHECK(g.ledger().retries() == 0);
}

TEST_CASE("a malformed reply is booked before it is rejected") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "TopicGeneration"},
     "respond_malformed": "I would suggest chemistry topics.",
     "usage": {"prompt_tokens": 7, "completion_tokens": 3}}
  ])"));
  Gateway g(b, TemplateCatalog::builtin());
  LlmRequest req = subtask_req(TemplateKind::TopicGeneration, {{"query", "q"}});
  try {
    g.complete(req);
    FAIL("malformed reply was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedResponse);
    CHECK(std::string(e.what()).find("I would suggest") != std::string::npos);
  }
  CHECK(g.ledger().llm_calls() == 1);   // tokens were spent regardless
  CHECK(g.ledger().total_tokens() == 10);
}

TEST_CASE("schema violations: unknown function, bad args") {
  TemplateCatalog catalog = TemplateCatalog::builtin();
  auto run = [&](const std::string& fn, const std::string& args_json) {
    auto b = ScriptedBackend::from_json_text(rules_text(
        R"([{"match": {"kind": "TopicGeneration"},
             "respond": {"function": ")" + fn + R"(", "arguments": )" + args_json +
        "}}]"));
    Gateway g(b, catalog);
    LlmRequest req;
    req.template_kind = TemplateKind::TopicGeneration;
    req.bindings = {{"query", "q"}};
    FunctionSchema f;
    f.name = "emit_topics";
    f.parameters["topics"] = ParamSpec{"string", true, ""};
    f.parameters["limit"] = ParamSpec{"int", false, ""};
    f.parameters["dedupe"] = ParamSpec{"bool", false, ""};
    req.functions = {f};
    return g.complete(req);
  };

  CHECK(run("emit_topics", R"({"topics": "a", "limit": "3", "dedupe": "true"})")
            .arguments.size() == 3);

  auto expect_violation = [&](const std::string& fn, const std::string& args,
                              const std::string& needle) {
    try {
      run(fn, args);
      FAIL_CHECK(("accepted " + fn + " with " + args));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SchemaViolation);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_violation("dance", R"({})", "not in the request's schema set");
  expect_violation("emit_topics", R"({})", "missing required argument 'topics'");
  expect_violation("emit_topics", R"({"topics": "a", "limit": "three"})",
                   "not a valid int");
  expect_violation("emit_topics", R"({"topics": "a", "dedupe": "yes"})",
                   "not a valid bool");
  expect_violation("emit_topics", R"({"topics": "a", "color": "red"})",
                   "unknown argument 'color'");
}

TEST_CASE("retry appends the validation error to the feedback slot") {
  // Rule 2 only matches when the rendered prompt carries the feedback text,
  // so a pass proves the error actually reached the next prompt.
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "AgentSystem", "once": true},
     "respond_malformed": "Let me think about what to run next."},
    {"match": {"kind": "AgentSystem", "contains": ["Previous reply was invalid"]},
     "respond": {"function": "run_shell", "arguments": {"command": "echo ok"}}}
  ])"));
  Gateway g(b, TemplateCatalog::builtin());
  g.set_phase(PhaseId::Apply);
  LlmRequest req;
  req.template_kind = TemplateKind::AgentSystem;
  req.bindings = {{"query", "q"}, {"phase", "Apply"}, {"repo", "o/r"},
                  {"history", ""}, {"feedback", ""}};
  req.functions = phase_function_schemas(PhaseId::Apply);

  LlmResponse resp = g.complete_with_retry(req, 3);
  CHECK(resp.function_name == "run_shell");
  CHECK(g.ledger().llm_calls() == 2);  // the retry is an extra booked call
  CHECK(g.ledger().retries() == 1);
  CHECK(b.matches_served() == 2);
}

TEST_CASE("retries run out and the last error surfaces") {
  auto b = ScriptedBackend::from_json_text(rules_text(R"([
    {"match": {"kind": "AgentSystem"},
     "respond_malformed": "still just prose"}
  ])"));
  Gateway g(b, TemplateCatalog::builtin());
  LlmRequest req;
  req.template_kind = TemplateKind::AgentSystem;
  req.bindings = {{"query", "q"}, {"phase", "Apply"}, {"repo", "o/r"},
                  {"history", ""}, {"feedback", ""}};
  req.functions = phase_function_schemas(PhaseId::Apply);

  CHECK_THROWS_AS(g.complete_with_retry(req, 2), Error);
  CHECK(g.ledger().llm_calls() == 3);  // 1 attempt + 2 retries
  CHECK(g.ledger().retries() == 2);
}

TEST_CASE("non-retryable errors pass straight through") {
  auto b = ScriptedBackend::from_json_text(rules_text("[]"));
  Gateway g(b, TemplateCatalog::builtin());
  LlmRequest req = subtask_req(TemplateKind::TopicGeneration, {});  // no query
  try {
    g.complete_with_retry(req, 3);
    FAIL("rendered without the required binding");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingBinding);
  }
  CHECK(g.ledger().llm_calls() == 0);  // failed before any backend call
  CHECK(g.ledger().retries() == 0);
}

TEST_CASE("cost ledger serializes a full snapshot") {
  CostLedger ledger;
  ledger.record_call(PhaseId::Search, {100, 10});
  ledger.record_call(PhaseId::Apply, {200, 20});
  ledger.record_retry();
  json j = json::parse(ledger.to_json_text());
  CHECK(j.at("llm_calls") == 2);
  CHECK(j.at("prompt_tokens") == 300);
  CHECK(j.at("completion_tokens") == 30);
  CHECK(j.at("total_tokens") == 330);
  CHECK(j.at("retries") == 1);
  CHECK(j.at("per_phase").at("Search").at("llm_calls") == 1);
  CHECK(j.at("per_phase").at("Apply").at("tokens") == 220);
}

// ---- live backend shape ------------------------------------------------------

TEST_CASE("HTTP backend defaults pin provider path, model and credential source") {
  HttpBackendConfig cfg;
  CHECK(cfg.path == "/v1/chat/completions");
  CHECK(cfg.model == "gpt-4-32k");
  CHECK(cfg.credential_env == "REPOFORGE_API_KEY");  // value itself never logged
  CHECK(cfg.temperature == 0.6);
  CHECK(cfg.timeout_s == 60);
}

// ---- function schema sets ------------------------------------------------------

TEST_CASE("every phase schema set includes submit") {
  for (PhaseId p : all_phases()) {
    auto fns = phase_function_schemas(p);
    bool has_submit = false;
    for (const auto& f : fns) has_submit |= f.name == "submit";
    CHECK(has_submit);
  }
  auto apply = phase_function_schemas(PhaseId::Apply);
  std::vector<std::string> names;
  for (const auto& f : apply) names.push_back(f.name);
  CHECK(names == std::vector<std::string>{"run_shell", "read_file", "write_file",
                                          "explore_issues", "submit"});
  auto store = phase_function_schemas(PhaseId::Store);
  CHECK(store.front().name == "commit_image");
}

TEST_CASE("subtask schemas declare one function; AgentSystem has none") {
  for (TemplateKind k : all_template_kinds()) {
    if (k == TemplateKind::AgentSystem) {
      CHECK_THROWS_AS(subtask_function_schema(k), Error);
      continue;
    }
    auto fns = subtask_function_schema(k);
    REQUIRE(fns.size() == 1);
    CHECK_FALSE(fns.front().name.empty());
  }
}
