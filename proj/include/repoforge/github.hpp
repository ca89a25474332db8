// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace repoforge {

namespace fs = std::filesystem;

struct RepoRef {
  std::string full_name;  // "owner/name"
  std::string clone_url;

  std::string owner() const;
  std::string name() const;
  /// Validates the single-slash owner/name shape.
  static RepoRef parse(const std::string& full_name, std::string clone_url = "");
};

struct RepoCandidate {
  RepoRef ref;
  std::vector<std::string> topics;
  int stars = 0;
  std::string description;
};

struct ReadmeDoc {
  RepoRef ref;
  std::string text;
};

enum class ThreadKind { Issue, PullRequest };
const char* to_string(ThreadKind k);

struct ThreadItem {
  int id = 0;  // issue / PR number
  ThreadKind kind = ThreadKind::Issue;
  std::string title;
  std::string body;
  std::string state;
  std::string diff;  // PullRequest only; whole-PR unified diff
};

struct PrFile {
  std::string path;
  std::string diff;  // per-file unified diff
};

/// Fixed client-side result order: stars descending, then full_name ascending.
/// Applied by every host so server whims never change trajectories.
void sort_candidates(std::vector<RepoCandidate>& items);

/// Fixed thread order: distinct-query-term hits in title+body descending,
/// then id ascending. Terms come from tokenize_terms(terms_text).
void rank_threads(std::vector<ThreadItem>& items, const std::string& terms_text);
/// Distinct query terms of `terms_text` found in `title + body` (the ranking
/// key, exposed for tests).
int thread_term_hits(const ThreadItem& item, const std::string& terms_text);

/// Splits a multi-file unified diff into per-file pieces, sorted by path.
std::vector<PrFile> split_diff_by_file(const std::string& diff);

/// Read-only repository host. Search, read and clone; never any write call.
class RepoHost {
 public:
  virtual ~RepoHost() = default;
  virtual std::vector<RepoCandidate> search_by_name(const std::string& needle) = 0;
  virtual std::vector<RepoCandidate> search_by_topic(const std::string& topic,
                                                     int limit) = 0;
  virtual ReadmeDoc fetch_readme(const RepoRef& ref) = 0;          // NotFound
  virtual std::vector<ThreadItem> search_threads(const RepoRef& ref,
                                                 const std::string& terms,
                                                 ThreadKind kind, int limit) = 0;
  virtual std::vector<PrFile> fetch_pr_files(const RepoRef& ref, int pr_id) = 0;
  virtual void materialize(const RepoRef& ref, const fs::path& dest) = 0;
};

/// On-disk fixture corpus: one directory per repository,
/// <root>/<owner>/<name>/{meta.json, README.md, issues.jsonl, prs.jsonl, files/}.
class FixtureCorpus {
 public:
  explicit FixtureCorpus(fs::path root);

  const fs::path& root() const { return root_; }
  std::vector<RepoCandidate> all() const;  // sorted by full_name
  std::optional<RepoCandidate> find(const std::string& full_name) const;
  bool has_readme(const std::string& full_name) const;
  std::string readme(const std::string& full_name) const;  // NotFound
  std::vector<ThreadItem> threads(const std::string& full_name, ThreadKind kind) const;
  std::optional<ThreadItem> thread(const std::string& full_name, ThreadKind kind,
                                   int id) const;
  fs::path files_dir(const std::string& full_name) const;  // NotFound

  /// Structural validation; returns human-readable problems (empty == valid).
  static std::vector<std::string> validate(const fs::path& root);

 private:
  fs::path repo_dir(const std::string& full_name) const;
  fs::path root_;
};

class FixtureHost : public RepoHost {
 public:
  explicit FixtureHost(FixtureCorpus corpus);
  std::vector<RepoCandidate> search_by_name(const std::string& needle) override;
  std::vector<RepoCandidate> search_by_topic(const std::string& topic,
                                             int limit) override;
  ReadmeDoc fetch_readme(const RepoRef& ref) override;
  std::vector<ThreadItem> search_threads(const RepoRef& ref, const std::string& terms,
                                         ThreadKind kind, int limit) override;
  std::vector<PrFile> fetch_pr_files(const RepoRef& ref, int pr_id) override;
  void materialize(const RepoRef& ref, const fs::path& dest) override;

 private:
  FixtureCorpus corpus_;
};

struct RestHostConfig {
  std::string base_url = "https://api.github.com";
  std::string token_env = "GITHUB_TOKEN";  // optional; value never logged
  int timeout_s = 30;
};

/// GitHub REST v3 client (also speaks to the in-process FixtureService, which
/// serves the same wire format).
class RestHost : public RepoHost {
 public:
  explicit RestHost(RestHostConfig cfg);
  std::vector<RepoCandidate> search_by_name(const std::string& needle) override;
  std::vector<RepoCandidate> search_by_topic(const std::string& topic,
                                             int limit) override;
  ReadmeDoc fetch_readme(const RepoRef& ref) override;
  std::vector<ThreadItem> search_threads(const RepoRef& ref, const std::string& terms,
                                         ThreadKind kind, int limit) override;
  std::vector<PrFile> fetch_pr_files(const RepoRef& ref, int pr_id) override;
  void materialize(const RepoRef& ref, const fs::path& dest) override;

 private:
  std::string get_json(const std::string& path_and_query);
  RestHostConfig cfg_;
  std::string token_;
};

}  // namespace repoforge
