// SPDX-License-Identifier: Apache-2.0
#include "repoforge/patch.hpp"

#include <cstdio>
#include <cstdlib>

#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"

namespace repoforge {

namespace {

std::string strip_prefix(std::string p) {
  p = trim(p);
  auto tab = p.find('\t');
  if (tab != std::string::npos) p = p.substr(0, tab);
  if (p.rfind("a/", 0) == 0 || p.rfind("b/", 0) == 0) return p.substr(2);
  return p;
}

/// Parses "@@ -l[,c] +l[,c] @@ ..." into the four numbers.
bool parse_hunk_header(const std::string& line, Hunk& h) {
  long os = 0, oc = 1, ns = 0, nc = 1;
  int consumed = 0;
  if (std::sscanf(line.c_str(), "@@ -%ld,%ld +%ld,%ld @@%n", &os, &oc, &ns, &nc,
                  &consumed) >= 4 && consumed > 0) {
  } else if (std::sscanf(line.c_str(), "@@ -%ld +%ld,%ld @@%n", &os, &ns, &nc,
                         &consumed) >= 3 && consumed > 0) {
    oc = 1;
  } else if (std::sscanf(line.c_str(), "@@ -%ld,%ld +%ld @@%n", &os, &oc, &ns,
                         &consumed) >= 3 && consumed > 0) {
    nc = 1;
  } else if (std::sscanf(line.c_str(), "@@ -%ld +%ld @@%n", &os, &ns,
                         &consumed) >= 2 && consumed > 0) {
    oc = nc = 1;
  } else {
    return false;
  }
  h.old_start = os;
  h.old_count = oc;
  h.new_start = ns;
  h.new_count = nc;
  return true;
}

/// Document <-> line-vector mapping that keeps the trailing-newline bit.
std::vector<std::string> to_lines(const std::string& doc) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : doc) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

}  // namespace

std::vector<FilePatch> parse_unified_diff(const std::string& text) {
  std::vector<std::string> raw = split(text, '\n');
  if (!raw.empty() && raw.back().empty()) raw.pop_back();

  std::vector<FilePatch> out;
  FilePatch* file = nullptr;
  Hunk* hunk = nullptr;
  long old_left = 0, new_left = 0;
  char last_tag = 0;

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string& line = raw[i];
    if (hunk && (old_left > 0 || new_left > 0)) {
      char tag = line.empty() ? ' ' : line[0];
      std::string body = line.empty() ? "" : line.substr(1);
      if (tag == '\\') {
        // "\ No newline at end of file": after '-' it describes only the old
        // side; after '+' or ' ' the new side ends without a newline.
        if (last_tag != '-') file->new_missing_final_newline = true;
        continue;
      }
      if (tag != ' ' && tag != '+' && tag != '-')
        raise(Errc::DiffParse, "line " + std::to_string(i + 1) +
                                   ": unexpected '" + line + "' inside hunk");
      if (tag == ' ' || tag == '-') {
        if (old_left <= 0)
          raise(Errc::DiffParse, "line " + std::to_string(i + 1) +
                                     ": hunk overruns old count");
        --old_left;
      }
      if (tag == ' ' || tag == '+') {
        if (new_left <= 0)
          raise(Errc::DiffParse, "line " + std::to_string(i + 1) +
                                     ": hunk overruns new count");
        --new_left;
      }
      hunk->lines.push_back({tag, body});
      last_tag = tag;
      continue;
    }
    if (hunk && line.rfind("\\", 0) == 0) {
      if (last_tag != '-') file->new_missing_final_newline = true;
      hunk = nullptr;
      continue;
    }
    hunk = nullptr;
    if (line.rfind("--- ", 0) == 0 && i + 1 < raw.size() &&
        raw[i + 1].rfind("+++ ", 0) == 0) {
      FilePatch p;
      p.old_path = strip_prefix(line.substr(4));
      p.new_path = strip_prefix(raw[i + 1].substr(4));
      p.new_file = p.old_path == "/dev/null";
      p.deleted = p.new_path == "/dev/null";
      out.push_back(std::move(p));
      file = &out.back();
      ++i;  // consume the +++ line
      continue;
    }
    if (line.rfind("@@", 0) == 0) {
      if (!file)
        raise(Errc::DiffParse,
              "line " + std::to_string(i + 1) + ": hunk before file header");
      Hunk h;
      if (!parse_hunk_header(line, h))
        raise(Errc::DiffParse,
              "line " + std::to_string(i + 1) + ": bad hunk header '" + line + "'");
      file->hunks.push_back(h);
      hunk = &file->hunks.back();
      old_left = h.old_count;
      new_left = h.new_count;
      last_tag = 0;
      continue;
    }
    // Anything else (git decorations, commit text) is skipped between files.
  }
  if (hunk && (old_left > 0 || new_left > 0))
    raise(Errc::DiffParse, "diff ends inside a hunk");
  if (out.empty()) raise(Errc::DiffParse, "no file patches found");
  for (const FilePatch& p : out)
    if (p.hunks.empty())
      raise(Errc::DiffParse, "file " + p.target_path() + " has no hunks");
  return out;
}

std::string apply_file_patch(const FilePatch& patch, const std::string& original) {
  if (patch.new_file && !original.empty())
    throw DiffApplyError(1, "patch creates " + patch.new_path +
                                " but the target already has content");

  std::vector<std::string> lines = to_lines(original);
  long offset = 0;

  for (std::size_t hi = 0; hi < patch.hunks.size(); ++hi) {
    const Hunk& h = patch.hunks[hi];
    std::vector<std::string> old_block, new_block;
    for (const DiffLine& dl : h.lines) {
      if (dl.tag == ' ' || dl.tag == '-') old_block.push_back(dl.text);
      if (dl.tag == ' ' || dl.tag == '+') new_block.push_back(dl.text);
    }
    // old_start is 1-based; a zero-length old block inserts after old_start.
    long base = h.old_count == 0 ? h.old_start : h.old_start - 1;
    long want = base + offset;

    auto matches_at = [&](long pos) {
      if (pos < 0 || pos + static_cast<long>(old_block.size()) >
                         static_cast<long>(lines.size()))
        return false;
      for (std::size_t k = 0; k < old_block.size(); ++k)
        if (lines[pos + k] != old_block[k]) return false;
      return true;
    };

    long found = -1;
    long span = static_cast<long>(lines.size()) + 1;
    for (long delta = 0; delta <= span; ++delta) {
      if (matches_at(want - delta)) {
        found = want - delta;
        break;
      }
      if (delta > 0 && matches_at(want + delta)) {
        found = want + delta;
        break;
      }
    }
    if (found < 0)
      throw DiffApplyError(static_cast<int>(hi) + 1,
                           "no position matches the hunk's context in " +
                               patch.target_path());

    lines.erase(lines.begin() + found,
                lines.begin() + found + static_cast<long>(old_block.size()));
    lines.insert(lines.begin() + found, new_block.begin(), new_block.end());
    offset = found + static_cast<long>(new_block.size()) -
             (base + static_cast<long>(old_block.size()));
  }

  if (patch.deleted && !lines.empty())
    throw DiffApplyError(static_cast<int>(patch.hunks.size()),
                         "deletion left content behind in " + patch.old_path);

  std::string result = join(lines, "\n");
  // Unified diffs imply newline-terminated lines unless the "\ No newline"
  // marker said otherwise.
  if (!lines.empty() && !patch.new_missing_final_newline) result += '\n';
  return result;
}

}  // namespace repoforge
