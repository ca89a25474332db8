// SPDX-License-Identifier: Apache-2.0
#include "repoforge/config.hpp"

#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"
#include "json.hpp"

namespace repoforge {

using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig RunConfig::load(const fs::path& file) {
  if (!fs::exists(file))
    raise(Errc::ConfigInvalid, "config file not found: " + file.string());
  json j = json::parse(read_file_text(file), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(Errc::ConfigInvalid, "config is not a JSON object: " + file.string());

  const fs::path base = fs::absolute(file).parent_path();
  RunConfig cfg;
  try {
    cfg.mode = j.value("mode", cfg.mode);
    if (j.contains("corpus_dir"))
      cfg.corpus_dir = resolve(base, j["corpus_dir"].get<std::string>());
    if (j.contains("state_dir"))
      cfg.state_dir = resolve(base, j["state_dir"].get<std::string>());
    else
      cfg.state_dir = base / "state";

    if (j.contains("llm")) {
      const json& l = j["llm"];
      cfg.llm_backend = l.value("backend", cfg.llm_backend);
      if (l.contains("script_file"))
        cfg.script_file = resolve(base, l["script_file"].get<std::string>());
      cfg.http.endpoint = l.value("endpoint", cfg.http.endpoint);
      cfg.http.path = l.value("path", cfg.http.path);
      cfg.http.model = l.value("model", cfg.http.model);
      cfg.http.credential_env = l.value("credential_env", cfg.http.credential_env);
      cfg.http.temperature = l.value("temperature", cfg.http.temperature);
      cfg.http.timeout_s = l.value("timeout_s", cfg.http.timeout_s);
    }
    if (j.contains("github")) {
      const json& g = j["github"];
      cfg.rest.base_url = g.value("base_url", cfg.rest.base_url);
      cfg.rest.token_env = g.value("token_env", cfg.rest.token_env);
      cfg.rest.timeout_s = g.value("timeout_s", cfg.rest.timeout_s);
    }
    if (j.contains("sandbox")) {
      const json& s = j["sandbox"];
      cfg.sandbox_backend = s.value("backend", cfg.sandbox_backend);
      cfg.sandbox_network = s.value("network", cfg.sandbox_network);
    }
    if (j.contains("budget")) {
      const json& b = j["budget"];
      cfg.budget.max_actions_per_phase =
          b.value("max_actions_per_phase", cfg.budget.max_actions_per_phase);
      cfg.budget.command_timeout_s =
          b.value("command_timeout_s", cfg.budget.command_timeout_s);
      cfg.budget.max_threads_reviewed =
          b.value("max_threads_reviewed", cfg.budget.max_threads_reviewed);
    }
    cfg.retry_limit = j.value("retry_limit", cfg.retry_limit);
  } catch (const json::exception& e) {
    raise(Errc::ConfigInvalid, std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (mode != "fixture" && mode != "live")
    raise(Errc::ConfigInvalid, "mode must be \"fixture\" or \"live\", got \"" + mode + "\"");
  if (llm_backend != "scripted" && llm_backend != "http")
    raise(Errc::ConfigInvalid,
          "llm.backend must be \"scripted\" or \"http\", got \"" + llm_backend + "\"");
  if (sandbox_backend != "process" && sandbox_backend != "docker" &&
      sandbox_backend != "auto")
    raise(Errc::ConfigInvalid, "sandbox.backend must be process, docker or auto");
  if (mode == "fixture") {
    if (corpus_dir.empty())
      raise(Errc::ConfigInvalid, "fixture mode requires corpus_dir");
    if (!fs::is_directory(corpus_dir))
      raise(Errc::ConfigInvalid, "corpus_dir is not a directory: " + corpus_dir.string());
  }
  if (llm_backend == "scripted") {
    if (script_file.empty())
      raise(Errc::ConfigInvalid, "scripted backend requires llm.script_file");
    if (!fs::exists(script_file))
      raise(Errc::ConfigInvalid, "script file not found: " + script_file.string());
  }
  if (llm_backend == "http" && http.endpoint.empty())
    raise(Errc::ConfigInvalid, "http backend requires llm.endpoint");
  if (budget.max_actions_per_phase <= 0 || budget.command_timeout_s <= 0 ||
      budget.max_threads_reviewed <= 0)
    raise(Errc::ConfigInvalid, "budget values must be positive");
  if (retry_limit < 0) raise(Errc::ConfigInvalid, "retry_limit must be >= 0");
}

}  // namespace repoforge
