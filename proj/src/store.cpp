// SPDX-License-Identifier: Apache-2.0
#include "repoforge/store.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"
#include "repoforge/util.hpp"
#include "json.hpp"

namespace repoforge {

using nlohmann::json;

std::string record_to_json_text(const RepoRecord& r) {
  json j;
  j["full_name"] = r.ref.full_name;
  j["clone_url"] = r.ref.clone_url;
  j["image"] = {{"tag", r.image.tag}, {"created_at_ms", r.image.created_at_ms}};
  j["function_description"] = r.function_description;
  j["experience"] = r.experience;
  j["query_digest"] = r.query_digest;
  j["created_at_ms"] = r.created_at_ms;
  return j.dump();
}

RepoRecord record_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(Errc::StorePersist, "record blob is not a JSON object");
  RepoRecord r;
  try {
    r.ref = RepoRef::parse(j.at("full_name").get<std::string>(),
                           j.value("clone_url", ""));
    r.image.tag = j.at("image").at("tag").get<std::string>();
    r.image.created_at_ms = j.at("image").value("created_at_ms", std::int64_t{0});
    r.function_description = j.at("function_description").get<std::string>();
    r.experience = j.at("experience").get<std::string>();
    r.query_digest = j.at("query_digest").get<std::string>();
    r.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
  } catch (const json::exception& e) {
    raise(Errc::StorePersist, std::string("record blob missing field: ") + e.what());
  }
  return r;
}

namespace {

struct IndexEntry {
  std::string op;  // "put" | "del"
  std::string full_name;
  std::string query_digest;
  std::string blob;  // put only
  std::size_t order = 0;
};

std::string entry_key(const std::string& full_name, const std::string& query_digest) {
  return full_name + "\x1f" + query_digest;
}

/// Strict per-line parse; any defect makes the line (and with it the file
/// tail) untrusted.
bool parse_index_line(const std::string& line, IndexEntry& out) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  if (!j.contains("op") || !j["op"].is_string()) return false;
  out.op = j["op"].get<std::string>();
  if (out.op != "put" && out.op != "del") return false;
  if (!j.contains("full_name") || !j["full_name"].is_string()) return false;
  if (!j.contains("query_digest") || !j["query_digest"].is_string()) return false;
  out.full_name = j["full_name"].get<std::string>();
  out.query_digest = j["query_digest"].get<std::string>();
  if (out.op == "put") {
    if (!j.contains("blob") || !j["blob"].is_string()) return false;
    out.blob = j["blob"].get<std::string>();
    if (out.blob.size() != 64) return false;
  }
  return true;
}

}  // namespace

RepoStore::RepoStore(fs::path root)
    : root_(std::move(root)),
      index_path_(root_ / "index.jsonl"),
      blobs_dir_(root_ / "blobs") {
  fs::create_directories(blobs_dir_);
}

void RepoStore::io_point(const char* op) const {
  if (hook_) hook_(op);
}

std::string RepoStore::good_index_prefix() const {
  if (!fs::exists(index_path_)) return "";
  std::string text = read_file_text(index_path_);
  std::string good;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn final line: no terminator
    std::string line = text.substr(pos, nl - pos);
    IndexEntry e;
    if (!parse_index_line(line, e)) break;  // damage: distrust the rest
    good.append(line);
    good.push_back('\n');
    pos = nl + 1;
  }
  return good;
}

void RepoStore::append_index_line(const std::string& line) {
  // Self-heal: if the current file has a torn or invalid tail, rewrite the
  // trusted prefix atomically before appending.
  std::string good = good_index_prefix();
  bool damaged = fs::exists(index_path_) &&
                 fs::file_size(index_path_) != good.size();
  io_point("index_open");
  if (damaged) write_file_atomic(index_path_, good);
  std::ofstream out(index_path_, std::ios::binary | std::ios::app);
  if (!out) raise(Errc::StorePersist, "cannot open " + index_path_.string());
  io_point("index_append");
  out << line << '\n';
  io_point("index_flush");
  out.flush();
  if (!out) raise(Errc::StorePersist, "cannot append to " + index_path_.string());
}

void RepoStore::put(const RepoRecord& r) {
  if (r.ref.full_name.empty())
    raise(Errc::StorePersist, "record has no repository name");
  const std::string blob_text = record_to_json_text(r);
  const std::string digest = sha256_hex(blob_text);
  const fs::path blob_path = blobs_dir_ / digest;
  const fs::path tmp_path = blobs_dir_ / (".tmp-" + digest);

  io_point("blob_tmp_write");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::StorePersist, "cannot write " + tmp_path.string());
    out << blob_text;
    out.flush();
    if (!out) raise(Errc::StorePersist, "short write to " + tmp_path.string());
  }
  io_point("blob_rename");
  std::error_code ec;
  fs::rename(tmp_path, blob_path, ec);
  if (ec) raise(Errc::StorePersist, "rename failed: " + ec.message());

  json line;
  line["op"] = "put";
  line["full_name"] = r.ref.full_name;
  line["query_digest"] = r.query_digest;
  line["blob"] = digest;
  append_index_line(line.dump());
}

bool RepoStore::remove(const std::string& full_name, const std::string& query_digest) {
  if (!get(full_name, query_digest)) return false;
  json line;
  line["op"] = "del";
  line["full_name"] = full_name;
  line["query_digest"] = query_digest;
  append_index_line(line.dump());
  return true;
}

std::optional<RepoRecord> RepoStore::get(const std::string& full_name,
                                         const std::string& query_digest) const {
  std::map<std::string, IndexEntry> live;
  std::string text = good_index_prefix();
  std::size_t order = 0;
  for (const auto& line : split(text, '\n')) {
    IndexEntry e;
    if (!parse_index_line(line, e)) continue;
    e.order = order++;
    live[entry_key(e.full_name, e.query_digest)] = e;  // later lines win
  }
  auto it = live.find(entry_key(full_name, query_digest));
  if (it == live.end() || it->second.op == "del") return std::nullopt;
  const fs::path blob = blobs_dir_ / it->second.blob;
  if (!fs::exists(blob)) return std::nullopt;  // defensive: orphaned pointer
  return record_from_json_text(read_file_text(blob));
}

std::vector<RepoRecord> RepoStore::list() const {
  std::map<std::string, IndexEntry> live;
  std::string text = good_index_prefix();
  std::size_t order = 0;
  for (const auto& line : split(text, '\n')) {
    IndexEntry e;
    if (!parse_index_line(line, e)) continue;
    e.order = order++;
    live[entry_key(e.full_name, e.query_digest)] = e;
  }
  std::vector<std::pair<std::size_t, RepoRecord>> rows;
  for (const auto& [key, e] : live) {
    (void)key;
    if (e.op != "put") continue;
    const fs::path blob = blobs_dir_ / e.blob;
    if (!fs::exists(blob)) continue;
    rows.emplace_back(e.order, record_from_json_text(read_file_text(blob)));
  }
  // Most recently written first; the index append order is the write order.
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.ref.full_name < b.second.ref.full_name;
  });
  std::vector<RepoRecord> out;
  out.reserve(rows.size());
  for (auto& [ord, rec] : rows) {
    (void)ord;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RepoRecord> RepoStore::list(
    const std::function<bool(const std::string& tag)>& image_exists) const {
  auto rows = list();
  for (auto& r : rows) r.stale = !(image_exists && image_exists(r.image.tag));
  return rows;
}

std::size_t RepoStore::size() const { return list().size(); }

}  // namespace repoforge
