// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>

#include "repoforge/errors.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

namespace {

/// True when `value` parses as the declared parameter type.
bool value_fits(const std::string& type, const std::string& value) {
  if (type == "int") {
    if (value.empty()) return false;
    char* end = nullptr;
    std::strtol(value.c_str(), &end, 10);
    return end && *end == '\0';
  }
  if (type == "bool") return value == "true" || value == "false";
  return true;  // string accepts anything
}

}  // namespace

Gateway::Gateway(LlmBackend& backend, TemplateCatalog catalog)
    : backend_(backend), catalog_(std::move(catalog)) {}

std::string Gateway::render(TemplateKind kind,
                            const std::map<std::string, std::string>& bindings) const {
  return catalog_.render(kind, bindings);
}

LlmResponse Gateway::complete(const LlmRequest& req) {
  std::string prompt = render(req.template_kind, req.bindings);
  RawCompletion raw = backend_.complete(prompt, req);
  // A malformed reply still consumed tokens; book it before validating.
  ledger_.record_call(phase_, raw.usage);

  if (raw.function_name.empty())
    raise(Errc::MalformedResponse,
          "backend replied with text instead of a function call: " +
              clip_bytes(raw.text, 200, false));

  const FunctionSchema* schema = nullptr;
  for (const FunctionSchema& f : req.functions)
    if (f.name == raw.function_name) schema = &f;
  if (!schema)
    raise(Errc::SchemaViolation,
          "function '" + raw.function_name + "' is not in the request's schema set");

  for (const auto& [name, spec] : schema->parameters) {
    auto it = raw.arguments.find(name);
    if (it == raw.arguments.end()) {
      if (spec.required)
        raise(Errc::SchemaViolation,
              raw.function_name + " is missing required argument '" + name + "'");
      continue;
    }
    if (!value_fits(spec.type, it->second))
      raise(Errc::SchemaViolation, raw.function_name + " argument '" + name +
                                       "' is not a valid " + spec.type);
  }
  for (const auto& [name, value] : raw.arguments) {
    (void)value;
    if (!schema->parameters.count(name))
      raise(Errc::SchemaViolation,
            raw.function_name + " got unknown argument '" + name + "'");
  }

  LlmResponse out;
  out.function_name = raw.function_name;
  out.arguments = raw.arguments;
  out.usage = raw.usage;
  return out;
}

LlmResponse Gateway::complete_with_retry(LlmRequest req, int max_retries) {
  for (int attempt = 0;; ++attempt) {
    try {
      return complete(req);
    } catch (const Error& e) {
      bool retryable = e.code() == Errc::MalformedResponse ||
                       e.code() == Errc::SchemaViolation;
      if (!retryable || attempt >= max_retries) throw;
      ledger_.record_retry();
      // Feed the validation error back; templates with a feedback slot show it.
      std::string& fb = req.bindings["feedback"];
      fb += std::string(fb.empty() ? "" : "\n") +
            "Previous reply was invalid: " + e.what() +
            " Reply with a single function call.";
    }
  }
}

}  // namespace repoforge
