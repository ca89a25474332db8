// SPDX-License-Identifier: Apache-2.0
#include "repoforge/scenario.hpp"

#include <algorithm>

#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"
#include "json.hpp"

namespace repoforge {

using nlohmann::json;

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& item : v) out.push_back(item.get<std::string>());
  } else {
    raise(Errc::ScenarioInvalid, std::string(key) + " must be a string or array");
  }
  return out;
}

}  // namespace

Scenario Scenario::load(const fs::path& dir) {
  const fs::path file = dir / "scenario.json";
  if (!fs::exists(file))
    raise(Errc::ScenarioInvalid, "missing " + file.string());
  json j = json::parse(read_file_text(file), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(Errc::ScenarioInvalid, file.string() + " is not a JSON object");

  Scenario sc;
  sc.dir = dir;
  try {
    sc.name = j.at("name").get<std::string>();
    sc.description = j.value("description", "");
    const json& q = j.at("query");
    sc.query.text = q.at("text").get<std::string>();
    if (q.contains("repo_hint") && !q["repo_hint"].is_null())
      sc.query.repo_hint = q["repo_hint"].get<std::string>();
    sc.script_file = dir / j.value("script", "rules.json");

    if (j.contains("expect")) {
      const json& e = j["expect"];
      sc.expect.success = e.value("success", true);
      sc.expect.repo = e.value("repo", "");
      if (e.contains("reused_stored"))
        sc.expect.reused_stored = e["reused_stored"].get<bool>();
      sc.expect.answer_contains = string_list(e, "answer_contains");
      sc.expect.artifacts = string_list(e, "artifacts");
      sc.expect.markers = string_list(e, "markers");
      sc.expect.failure_contains = e.value("failure_contains", "");
    }

    for (const json& s : j.value("seed_store", json::array())) {
      SeedRecord seed;
      seed.record.ref = RepoRef::parse(s.at("full_name").get<std::string>());
      seed.record.image.tag = s.at("image_tag").get<std::string>();
      seed.record.image.created_at_ms = s.value("created_at_ms", std::int64_t{0});
      seed.record.function_description = s.at("function_description").get<std::string>();
      seed.record.experience = s.value("experience", "");
      seed.record.query_digest = s.value("query_digest", "");
      seed.record.created_at_ms = s.value("created_at_ms", std::int64_t{0});
      if (s.contains("image_tree"))
        seed.image_tree = dir / s["image_tree"].get<std::string>();
      sc.seeds.push_back(std::move(seed));
    }
  } catch (const json::exception& e) {
    raise(Errc::ScenarioInvalid,
          file.string() + ": " + std::string(e.what()));
  }

  if (sc.name.empty()) raise(Errc::ScenarioInvalid, "scenario name must not be empty");
  if (!sc.query.valid())
    raise(Errc::ScenarioInvalid, sc.name + ": query text must not be empty");
  if (!fs::exists(sc.script_file))
    raise(Errc::ScenarioInvalid,
          sc.name + ": script file not found: " + sc.script_file.string());
  for (const auto& seed : sc.seeds)
    if (!seed.image_tree.empty() && !fs::is_directory(seed.image_tree))
      raise(Errc::ScenarioInvalid,
            sc.name + ": seed image tree not found: " + seed.image_tree.string());
  return sc;
}

std::vector<Scenario> load_scenarios(const fs::path& root) {
  if (!fs::is_directory(root))
    raise(Errc::ScenarioInvalid, "scenario root is not a directory: " + root.string());
  std::vector<Scenario> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    if (!fs::exists(entry.path() / "scenario.json")) continue;
    out.push_back(Scenario::load(entry.path()));
  }
  std::sort(out.begin(), out.end(),
            [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
  if (out.empty())
    raise(Errc::ScenarioInvalid, "no scenarios under " + root.string());
  return out;
}

}  // namespace repoforge
