// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <nlohmann/json.hpp>

#include "repoforge/errors.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

std::map<std::string, std::string> args_from_json(const json& j) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items())
    out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

}  // namespace

ScriptedBackend ScriptedBackend::load(const fs::path& rule_file) {
  return from_json_text(read_file_text(rule_file));
}

ScriptedBackend ScriptedBackend::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScriptParseError(line_of_byte(text, e.byte), e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array())
    throw ScriptParseError(1, "rule file must be an object with a \"rules\" array");

  ScriptedBackend backend;
  int index = 0;
  for (const json& rj : doc["rules"]) {
    ScriptRule r;
    r.index = index++;
    if (!rj.contains("match") || !rj["match"].contains("kind"))
      throw ScriptParseError(1, "rule " + std::to_string(r.index) +
                                    " lacks match.kind");
    const json& m = rj["match"];
    r.kind = template_kind_from_string(m["kind"].get<std::string>());
    if (m.contains("contains"))
      for (const json& c : m["contains"]) r.contains.push_back(c.get<std::string>());
    r.once = m.value("once", false);
    if (m.contains("order")) {
      r.order = m["order"].get<int>();
      r.has_explicit_order = true;
    } else {
      r.order = r.index;
    }
    bool has_call = rj.contains("respond");
    bool has_malformed = rj.contains("respond_malformed");
    if (has_call == has_malformed)
      throw ScriptParseError(
          1, "rule " + std::to_string(r.index) +
                 " must have exactly one of respond / respond_malformed");
    if (has_call) {
      const json& resp = rj["respond"];
      if (!resp.contains("function"))
        throw ScriptParseError(1, "rule " + std::to_string(r.index) +
                                      " respond lacks \"function\"");
      r.function_name = resp["function"].get<std::string>();
      if (resp.contains("arguments")) r.arguments = args_from_json(resp["arguments"]);
    } else {
      r.malformed_text = rj["respond_malformed"].get<std::string>();
    }
    if (rj.contains("usage")) {
      r.usage.prompt_tokens = rj["usage"].value("prompt_tokens", 0);
      r.usage.completion_tokens = rj["usage"].value("completion_tokens", 0);
    }
    backend.rules_.push_back(std::move(r));
  }

  // Two always-live rules that can never be told apart make the playbook
  // order-dependent in a way the author probably did not intend.
  for (std::size_t i = 0; i < backend.rules_.size(); ++i) {
    for (std::size_t j = i + 1; j < backend.rules_.size(); ++j) {
      const ScriptRule& a = backend.rules_[i];
      const ScriptRule& b = backend.rules_[j];
      if (a.kind != b.kind || a.once || b.once) continue;
      if (a.has_explicit_order || b.has_explicit_order) continue;
      auto sa = a.contains, sb = b.contains;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      if (sa == sb)
        raise(Errc::ScriptAmbiguity,
              "rules " + std::to_string(a.index) + " and " + std::to_string(b.index) +
                  " on " + to_string(a.kind) +
                  " are indistinguishable; give one an explicit order or once");
    }
  }

  std::stable_sort(backend.rules_.begin(), backend.rules_.end(),
                   [](const ScriptRule& a, const ScriptRule& b) {
                     if (a.order != b.order) return a.order < b.order;
                     return a.index < b.index;
                   });
  return backend;
}

RawCompletion ScriptedBackend::complete(const std::string& prompt,
                                        const LlmRequest& req) {
  for (ScriptRule& r : rules_) {
    if (r.kind != req.template_kind) continue;
    if (r.once && r.consumed) continue;
    bool all = true;
    for (const std::string& needle : r.contains) {
      if (prompt.find(needle) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    if (r.once) r.consumed = true;
    ++served_;
    RawCompletion out;
    out.usage = r.usage;
    if (r.malformed_text) {
      out.text = *r.malformed_text;
    } else {
      out.function_name = r.function_name;
      out.arguments = r.arguments;
    }
    return out;
  }
  raise(Errc::NoMatchingRule,
        std::string("no rule for ") + to_string(req.template_kind) +
            " prompt starting: " + clip_bytes(prompt, 200, false));
}

}  // namespace repoforge
