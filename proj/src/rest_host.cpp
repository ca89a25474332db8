// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "repoforge/errors.hpp"
#include "repoforge/github.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

namespace {

std::string url_encode(std::string_view s) {
  std::string out;
  char buf[4];
  for (char ch : s) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' ||
        c == ':' || c == '/') {
      out += ch;
    } else {
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

RepoCandidate candidate_from_item(const json& item) {
  RepoCandidate c;
  c.ref = RepoRef::parse(item.at("full_name").get<std::string>(),
                         item.value("clone_url", ""));
  if (item.contains("topics"))
    for (const json& t : item["topics"]) c.topics.push_back(t.get<std::string>());
  c.stars = item.value("stargazers_count", 0);
  c.description = item.value("description", "");
  return c;
}

}  // namespace

RestHost::RestHost(RestHostConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.token_env.empty()) {
    const char* t = std::getenv(cfg_.token_env.c_str());
    if (t && *t) token_ = t;  // optional; anonymous access works rate-limited
  }
}

std::string RestHost::get_json(const std::string& path_and_query) {
  httplib::Client cli(cfg_.base_url);
  cli.set_connection_timeout(cfg_.timeout_s);
  cli.set_read_timeout(cfg_.timeout_s);
  cli.set_follow_location(true);
  httplib::Headers headers = {{"Accept", "application/vnd.github+json"},
                              {"User-Agent", "repoforge"}};
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  auto res = cli.Get(path_and_query, headers);
  if (!res)
    raise(Errc::NetworkError, "no response from " + cfg_.base_url + " (" +
                                  httplib::to_string(res.error()) + ")");
  if (res->status == 403 || res->status == 429) {
    bool exhausted = res->get_header_value("x-ratelimit-remaining") == "0";
    if (res->has_header("Retry-After") || exhausted || res->status == 429) {
      int after = 60;
      if (res->has_header("Retry-After"))
        after = std::atoi(res->get_header_value("Retry-After").c_str());
      throw RateLimitError(after, "repository host rate limited " + path_and_query);
    }
  }
  if (res->status == 404)
    raise(Errc::NotFound, path_and_query + " -> 404");
  if (res->status != 200)
    raise(Errc::NetworkError, path_and_query + " -> status " +
                                  std::to_string(res->status) + ": " +
                                  clip_bytes(res->body, 200, false));
  return res->body;
}

std::vector<RepoCandidate> RestHost::search_by_name(const std::string& needle) {
  json j = json::parse(
      get_json("/search/repositories?q=" + url_encode(needle) + "&per_page=10"));
  std::vector<RepoCandidate> out;
  for (const json& item : j.value("items", json::array()))
    out.push_back(candidate_from_item(item));
  sort_candidates(out);
  return out;
}

std::vector<RepoCandidate> RestHost::search_by_topic(const std::string& topic,
                                                     int limit) {
  json j = json::parse(get_json("/search/repositories?q=" +
                                url_encode("topic:" + to_lower(topic)) +
                                "&per_page=" + std::to_string(limit)));
  std::vector<RepoCandidate> out;
  for (const json& item : j.value("items", json::array()))
    out.push_back(candidate_from_item(item));
  sort_candidates(out);
  if (limit > 0 && static_cast<int>(out.size()) > limit) out.resize(limit);
  return out;
}

ReadmeDoc RestHost::fetch_readme(const RepoRef& ref) {
  json j = json::parse(get_json("/repos/" + ref.full_name + "/readme"));
  ReadmeDoc doc;
  doc.ref = ref;
  std::string content = j.value("content", "");
  if (j.value("encoding", "") == "base64")
    doc.text = base64_decode(content);
  else
    doc.text = content;
  return doc;
}

std::vector<ThreadItem> RestHost::search_threads(const RepoRef& ref,
                                                 const std::string& terms,
                                                 ThreadKind kind, int limit) {
  std::string q = "repo:" + ref.full_name + "+type:" +
                  (kind == ThreadKind::Issue ? "issue" : "pr");
  for (const std::string& term : tokenize_terms(terms)) q += "+" + url_encode(term);
  json j = json::parse(
      get_json("/search/issues?q=" + q + "&per_page=" + std::to_string(limit)));
  std::vector<ThreadItem> out;
  for (const json& item : j.value("items", json::array())) {
    ThreadItem t;
    t.id = item.at("number").get<int>();
    t.kind = kind;
    t.title = item.value("title", "");
    if (item.contains("body") && item["body"].is_string())
      t.body = item["body"].get<std::string>();
    t.state = item.value("state", "open");
    out.push_back(std::move(t));
  }
  // Host relevance order is nondeterministic; re-rank locally.
  rank_threads(out, terms);
  if (limit > 0 && static_cast<int>(out.size()) > limit) out.resize(limit);
  return out;
}

std::vector<PrFile> RestHost::fetch_pr_files(const RepoRef& ref, int pr_id) {
  json j = json::parse(get_json("/repos/" + ref.full_name + "/pulls/" +
                                std::to_string(pr_id) + "/files?per_page=100"));
  std::vector<PrFile> out;
  for (const json& item : j) {
    PrFile f;
    f.path = item.at("filename").get<std::string>();
    std::string status = item.value("status", "modified");
    std::string head;
    if (status == "added")
      head = "--- /dev/null\n+++ b/" + f.path + "\n";
    else if (status == "removed")
      head = "--- a/" + f.path + "\n+++ /dev/null\n";
    else
      head = "--- a/" + f.path + "\n+++ b/" + f.path + "\n";
    std::string patch = item.value("patch", "");
    if (patch.empty()) continue;  // binary files carry no text patch
    if (!patch.empty() && patch.back() != '\n') patch += '\n';
    f.diff = head + patch;
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(),
            [](const PrFile& a, const PrFile& b) { return a.path < b.path; });
  return out;
}

void RestHost::materialize(const RepoRef& ref, const fs::path& dest) {
  fs::create_directories(dest.parent_path());
  std::string cmd = "git clone --quiet --depth 1 '" +
                    replace_all(ref.clone_url, "'", "'\\''") + "' '" +
                    replace_all(dest.string(), "'", "'\\''") + "' 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) raise(Errc::NetworkError, "cannot spawn git clone");
  std::string output;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, got);
  int rc = pclose(pipe);
  if (rc != 0)
    raise(Errc::NetworkError,
          "git clone of " + ref.full_name + " failed: " + clip_bytes(output, 300, true));
}

}  // namespace repoforge
