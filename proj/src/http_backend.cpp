// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "repoforge/errors.hpp"
#include "repoforge/llm.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  const char* cred = std::getenv(cfg_.credential_env.c_str());
  if (!cred || !*cred)
    raise(Errc::BackendUnavailable,
          "credential environment variable " + cfg_.credential_env + " is not set");
  credential_ = cred;  // held in memory only; never logged or serialized
}

RawCompletion HttpBackend::complete(const std::string& prompt,
                                    const LlmRequest& req) {
  json functions = json::array();
  for (const FunctionSchema& f : req.functions) {
    json props = json::object();
    json required = json::array();
    for (const auto& [name, spec] : f.parameters) {
      const char* t = spec.type == "int"    ? "integer"
                      : spec.type == "bool" ? "boolean"
                                            : "string";
      props[name] = {{"type", t}, {"description", spec.description}};
      if (spec.required) required.push_back(name);
    }
    functions.push_back({{"name", f.name},
                         {"description", f.description},
                         {"parameters",
                          {{"type", "object"},
                           {"properties", props},
                           {"required", required}}}});
  }
  json body = {{"model", cfg_.model},
               {"temperature", cfg_.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"functions", functions},
               {"function_call", "auto"}};

  httplib::Client cli(cfg_.endpoint);
  cli.set_connection_timeout(cfg_.timeout_s);
  cli.set_read_timeout(cfg_.timeout_s);
  httplib::Headers headers = {{"Authorization", "Bearer " + credential_}};
  auto res = cli.Post(cfg_.path, headers, body.dump(), "application/json");
  if (!res)
    raise(Errc::NetworkError, "no response from " + cfg_.endpoint +
                                  " (" + httplib::to_string(res.error()) + ")");
  if (res->status == 429) {
    int retry_after = 1;
    if (res->has_header("Retry-After"))
      retry_after = std::atoi(res->get_header_value("Retry-After").c_str());
    throw RateLimitError(retry_after, "model endpoint rate limited");
  }
  if (res->status != 200)
    raise(Errc::HttpError, "status " + std::to_string(res->status) + ": " +
                               clip_bytes(res->body, 300, false));

  json j;
  try {
    j = json::parse(res->body);
  } catch (const json::parse_error& e) {
    raise(Errc::HttpError, std::string("unparseable completion body: ") + e.what());
  }

  RawCompletion out;
  if (j.contains("usage")) {
    out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
    out.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
  }
  if (!j.contains("choices") || j["choices"].empty()) {
    out.text = "(no choices)";
    return out;
  }
  const json& msg = j["choices"][0].value("message", json::object());
  if (msg.contains("function_call")) {
    const json& fc = msg["function_call"];
    out.function_name = fc.value("name", "");
    std::string raw_args = fc.value("arguments", "{}");
    try {
      json parsed = json::parse(raw_args);
      for (const auto& [k, v] : parsed.items())
        out.arguments[k] = v.is_string() ? v.get<std::string>() : v.dump();
    } catch (const json::parse_error&) {
      // Arguments that are not valid JSON make the whole reply malformed.
      out.function_name.clear();
      out.arguments.clear();
      out.text = "unparseable function arguments: " + clip_bytes(raw_args, 200, false);
    }
  } else {
    out.text = msg.value("content", "");
  }
  return out;
}

}  // namespace repoforge
