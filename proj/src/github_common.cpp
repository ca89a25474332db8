// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <set>

#include "repoforge/errors.hpp"
#include "repoforge/github.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

std::string RepoRef::owner() const {
  return full_name.substr(0, full_name.find('/'));
}

std::string RepoRef::name() const {
  return full_name.substr(full_name.find('/') + 1);
}

RepoRef RepoRef::parse(const std::string& full_name, std::string clone_url) {
  auto slash = full_name.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == full_name.size() ||
      full_name.find('/', slash + 1) != std::string::npos)
    raise(Errc::ConfigInvalid, "'" + full_name + "' is not an owner/name pair");
  RepoRef ref;
  ref.full_name = full_name;
  ref.clone_url = clone_url.empty()
                      ? "https://github.com/" + full_name + ".git"
                      : std::move(clone_url);
  return ref;
}

const char* to_string(ThreadKind k) {
  return k == ThreadKind::Issue ? "Issue" : "PullRequest";
}

void sort_candidates(std::vector<RepoCandidate>& items) {
  std::sort(items.begin(), items.end(),
            [](const RepoCandidate& a, const RepoCandidate& b) {
              if (a.stars != b.stars) return a.stars > b.stars;
              return a.ref.full_name < b.ref.full_name;
            });
}

int thread_term_hits(const ThreadItem& item, const std::string& terms_text) {
  std::vector<std::string> terms = tokenize_terms(terms_text);
  std::set<std::string> distinct(terms.begin(), terms.end());
  std::string text = to_lower(item.title + " " + item.body);
  int hits = 0;
  for (const std::string& t : distinct)
    if (text.find(t) != std::string::npos) ++hits;
  return hits;
}

void rank_threads(std::vector<ThreadItem>& items, const std::string& terms_text) {
  std::vector<std::pair<int, std::size_t>> keyed;
  keyed.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    keyed.emplace_back(thread_term_hits(items[i], terms_text), i);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [&](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return items[a.second].id < items[b.second].id;
                   });
  std::vector<ThreadItem> out;
  out.reserve(items.size());
  for (const auto& [hits, idx] : keyed) out.push_back(std::move(items[idx]));
  items = std::move(out);
}

namespace {

/// "a/src/x.c" -> "src/x.c"; "/dev/null" stays as-is.
std::string strip_diff_prefix(std::string p) {
  p = trim(p);
  // headers may carry a trailing tab + timestamp
  auto tab = p.find('\t');
  if (tab != std::string::npos) p = p.substr(0, tab);
  if (p.rfind("a/", 0) == 0 || p.rfind("b/", 0) == 0) return p.substr(2);
  return p;
}

}  // namespace

std::vector<PrFile> split_diff_by_file(const std::string& diff) {
  std::vector<std::string> lines = split(diff, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::vector<PrFile> out;
  PrFile cur;
  bool open = false;
  auto flush = [&] {
    if (open && !cur.diff.empty()) out.push_back(cur);
    cur = PrFile{};
    open = false;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    // Git-style decoration is dropped; a file section is the ---/+++ pair
    // plus its hunks.
    if (line.rfind("diff --git", 0) == 0) {
      flush();
      continue;
    }
    if (!open && (line.rfind("index ", 0) == 0 ||
                  line.rfind("new file mode", 0) == 0 ||
                  line.rfind("deleted file mode", 0) == 0))
      continue;
    bool starts_file = line.rfind("--- ", 0) == 0 && i + 1 < lines.size() &&
                       lines[i + 1].rfind("+++ ", 0) == 0;
    if (starts_file) {
      flush();
      open = true;
      std::string old_path = strip_diff_prefix(line.substr(4));
      std::string new_path = strip_diff_prefix(lines[i + 1].substr(4));
      cur.path = new_path == "/dev/null" ? old_path : new_path;
    }
    if (!open) continue;
    cur.diff += line;
    cur.diff += '\n';
  }
  flush();
  std::sort(out.begin(), out.end(),
            [](const PrFile& a, const PrFile& b) { return a.path < b.path; });
  return out;
}

}  // namespace repoforge
