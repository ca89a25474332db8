// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

#include "repoforge/errors.hpp"
#include "repoforge/github.hpp"
#include "repoforge/patch.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

using nlohmann::json;

namespace {

RepoCandidate candidate_from_meta(const json& meta) {
  RepoCandidate c;
  c.ref = RepoRef::parse(meta.at("full_name").get<std::string>(),
                         meta.value("clone_url", ""));
  if (meta.contains("topics"))
    for (const json& t : meta["topics"]) c.topics.push_back(t.get<std::string>());
  c.stars = meta.value("stars", 0);
  c.description = meta.value("description", "");
  return c;
}

ThreadItem thread_from_json(const json& j, ThreadKind kind) {
  ThreadItem t;
  t.id = j.at("number").get<int>();
  t.kind = kind;
  t.title = j.value("title", "");
  t.body = j.value("body", "");
  t.state = j.value("state", "open");
  t.diff = j.value("diff", "");
  return t;
}

std::vector<ThreadItem> read_thread_file(const fs::path& p, ThreadKind kind) {
  std::vector<ThreadItem> out;
  if (!fs::exists(p)) return out;
  std::istringstream in(read_file_text(p));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(thread_from_json(json::parse(line), kind));
  }
  return out;
}

}  // namespace

FixtureCorpus::FixtureCorpus(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_))
    raise(Errc::CorpusInvalid, "corpus root " + root_.string() + " is not a directory");
}

fs::path FixtureCorpus::repo_dir(const std::string& full_name) const {
  RepoRef ref = RepoRef::parse(full_name);
  return root_ / ref.owner() / ref.name();
}

std::vector<RepoCandidate> FixtureCorpus::all() const {
  std::vector<RepoCandidate> out;
  for (const auto& owner : fs::directory_iterator(root_)) {
    if (!owner.is_directory()) continue;
    for (const auto& repo : fs::directory_iterator(owner.path())) {
      if (!repo.is_directory()) continue;
      fs::path meta = repo.path() / "meta.json";
      if (!fs::exists(meta)) continue;
      out.push_back(candidate_from_meta(json::parse(read_file_text(meta))));
    }
  }
  std::sort(out.begin(), out.end(), [](const RepoCandidate& a, const RepoCandidate& b) {
    return a.ref.full_name < b.ref.full_name;
  });
  return out;
}

std::optional<RepoCandidate> FixtureCorpus::find(const std::string& full_name) const {
  fs::path meta = repo_dir(full_name) / "meta.json";
  if (!fs::exists(meta)) return std::nullopt;
  return candidate_from_meta(json::parse(read_file_text(meta)));
}

bool FixtureCorpus::has_readme(const std::string& full_name) const {
  return fs::exists(repo_dir(full_name) / "README.md");
}

std::string FixtureCorpus::readme(const std::string& full_name) const {
  fs::path p = repo_dir(full_name) / "README.md";
  if (!fs::exists(p))
    raise(Errc::NotFound, full_name + " has no README");
  return read_file_text(p);
}

std::vector<ThreadItem> FixtureCorpus::threads(const std::string& full_name,
                                               ThreadKind kind) const {
  fs::path p = repo_dir(full_name) /
               (kind == ThreadKind::Issue ? "issues.jsonl" : "prs.jsonl");
  return read_thread_file(p, kind);
}

std::optional<ThreadItem> FixtureCorpus::thread(const std::string& full_name,
                                                ThreadKind kind, int id) const {
  for (const ThreadItem& t : threads(full_name, kind))
    if (t.id == id) return t;
  return std::nullopt;
}

fs::path FixtureCorpus::files_dir(const std::string& full_name) const {
  fs::path p = repo_dir(full_name) / "files";
  if (!fs::is_directory(p))
    raise(Errc::NotFound, full_name + " has no files/ worktree");
  return p;
}

std::vector<std::string> FixtureCorpus::validate(const fs::path& root) {
  std::vector<std::string> problems;
  if (!fs::is_directory(root)) {
    problems.push_back("corpus root is not a directory: " + root.string());
    return problems;
  }
  for (const auto& owner : fs::directory_iterator(root)) {
    if (!owner.is_directory()) continue;
    for (const auto& repo : fs::directory_iterator(owner.path())) {
      if (!repo.is_directory()) continue;
      std::string where = owner.path().filename().string() + "/" +
                          repo.path().filename().string();
      fs::path meta = repo.path() / "meta.json";
      if (!fs::exists(meta)) {
        problems.push_back(where + ": missing meta.json");
        continue;
      }
      try {
        json m = json::parse(read_file_text(meta));
        std::string full = m.at("full_name").get<std::string>();
        if (full != where)
          problems.push_back(where + ": meta full_name says '" + full + "'");
        RepoRef::parse(full);
      } catch (const std::exception& e) {
        problems.push_back(where + ": bad meta.json: " + e.what());
        continue;
      }
      if (!fs::is_directory(repo.path() / "files"))
        problems.push_back(where + ": missing files/ worktree");
      for (const char* fn : {"issues.jsonl", "prs.jsonl"}) {
        fs::path p = repo.path() / fn;
        if (!fs::exists(p)) continue;
        std::istringstream in(read_file_text(p));
        std::string line;
        int ln = 0;
        while (std::getline(in, line)) {
          ++ln;
          if (trim(line).empty()) continue;
          try {
            json j = json::parse(line);
            j.at("number").get<int>();
            // PR diffs must parse so Apply can turn them into edits.
            if (std::string(fn) == "prs.jsonl" && j.contains("diff"))
              parse_unified_diff(j["diff"].get<std::string>());
          } catch (const std::exception& e) {
            problems.push_back(where + ": " + fn + " line " + std::to_string(ln) +
                               ": " + e.what());
          }
        }
      }
    }
  }
  std::sort(problems.begin(), problems.end());
  return problems;
}

FixtureHost::FixtureHost(FixtureCorpus corpus) : corpus_(std::move(corpus)) {}

std::vector<RepoCandidate> FixtureHost::search_by_name(const std::string& needle) {
  std::vector<RepoCandidate> out;
  for (const RepoCandidate& c : corpus_.all()) {
    bool hit = needle.find('/') != std::string::npos
                   ? to_lower(c.ref.full_name) == to_lower(needle)
                   : contains_ci(c.ref.name(), needle);
    if (hit) out.push_back(c);
  }
  sort_candidates(out);
  return out;
}

std::vector<RepoCandidate> FixtureHost::search_by_topic(const std::string& topic,
                                                        int limit) {
  std::vector<RepoCandidate> out;
  for (const RepoCandidate& c : corpus_.all())
    if (std::find(c.topics.begin(), c.topics.end(), to_lower(topic)) != c.topics.end())
      out.push_back(c);
  sort_candidates(out);
  if (limit > 0 && static_cast<int>(out.size()) > limit) out.resize(limit);
  return out;
}

ReadmeDoc FixtureHost::fetch_readme(const RepoRef& ref) {
  ReadmeDoc doc;
  doc.ref = ref;
  doc.text = corpus_.readme(ref.full_name);
  return doc;
}

std::vector<ThreadItem> FixtureHost::search_threads(const RepoRef& ref,
                                                    const std::string& terms,
                                                    ThreadKind kind, int limit) {
  std::vector<ThreadItem> items = corpus_.threads(ref.full_name, kind);
  rank_threads(items, terms);
  if (limit > 0 && static_cast<int>(items.size()) > limit) items.resize(limit);
  return items;
}

std::vector<PrFile> FixtureHost::fetch_pr_files(const RepoRef& ref, int pr_id) {
  auto t = corpus_.thread(ref.full_name, ThreadKind::PullRequest, pr_id);
  if (!t)
    raise(Errc::NotFound,
          ref.full_name + " has no pull request #" + std::to_string(pr_id));
  return split_diff_by_file(t->diff);
}

void FixtureHost::materialize(const RepoRef& ref, const fs::path& dest) {
  copy_tree(corpus_.files_dir(ref.full_name), dest);
}

}  // namespace repoforge
