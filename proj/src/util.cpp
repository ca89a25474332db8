// SPDX-License-Identifier: Apache-2.0
#include "repoforge/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "repoforge/digest.hpp"
#include "repoforge/errors.hpp"

namespace repoforge {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string clip_bytes(std::string_view s, std::size_t max_bytes, bool keep_tail) {
  static const std::string kMarker = "[...clipped...]";
  if (s.size() <= max_bytes) return std::string(s);
  if (keep_tail) return kMarker + std::string(s.substr(s.size() - max_bytes));
  return std::string(s.substr(0, max_bytes)) + kMarker;
}

std::vector<std::string> tokenize_terms(std::string_view text) {
  static const std::set<std::string> kStop = {
      "a", "an", "the", "to", "of", "in", "on", "for",
      "and", "or", "is", "it", "with", "that", "this"};
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2 && !kStop.count(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c))
      cur += static_cast<char>(std::tolower(c));
    else
      flush();
  }
  flush();
  return out;
}

// ---- base64 ----------------------------------------------------------------

static const char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                 static_cast<unsigned char>(bytes[i + 2]);
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
    i += 3;
  }
  if (i + 1 == bytes.size()) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  std::array<int, 256> rev;
  rev.fill(-1);
  for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kB64[i])] = i;
  std::string out;
  unsigned buf = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=' || ch == '\n' || ch == '\r') continue;
    int v = rev[static_cast<unsigned char>(ch)];
    if (v < 0) continue;
    buf = (buf << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((buf >> bits) & 0xFF);
    }
  }
  return out;
}

// ---- filesystem ------------------------------------------------------------

std::string read_file_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) raise(Errc::NotFound, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& p, std::string_view content) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::StorePersist, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) raise(Errc::StorePersist, "short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

void append_line(const fs::path& p, std::string_view line) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::app);
  if (!out) raise(Errc::StorePersist, "cannot open " + p.string());
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  out.flush();
  if (!out) raise(Errc::StorePersist, "short append to " + p.string());
}

void copy_tree(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  fs::copy(from, to,
           fs::copy_options::recursive | fs::copy_options::copy_symlinks |
               fs::copy_options::overwrite_existing);
}

std::string tree_fingerprint(const fs::path& root) {
  std::vector<std::string> entries;
  if (fs::exists(root)) {
    for (auto it = fs::recursive_directory_iterator(
             root, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
      const auto& e = *it;
      std::string rel = fs::relative(e.path(), root).generic_string();
      if (e.is_regular_file())
        entries.push_back(rel + ":" + sha256_hex(read_file_text(e.path())));
      else if (e.is_directory())
        entries.push_back(rel + "/");
      else if (e.is_symlink())
        entries.push_back(rel + "->" + fs::read_symlink(e.path()).string());
    }
  }
  std::sort(entries.begin(), entries.end());
  return sha256_hex(join(entries, "\n"));
}

// ---- misc ------------------------------------------------------------------

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string stable_id(std::string_view scope, std::uint64_t counter) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (char c : scope) mix(static_cast<unsigned char>(c));
  mix(':');
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(counter >> (i * 8)));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double percent_1dp(std::int64_t numer, std::int64_t denom) {
  if (denom <= 0) return 0.0;
  std::int64_t tenths = (2000 * numer + denom) / (2 * denom);
  return static_cast<double>(tenths) / 10.0;
}

double mean_2dp(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  long double sum = 0;
  for (double v : values) sum += v;
  long double mean = sum / static_cast<long double>(values.size());
  return static_cast<double>(std::floor(mean * 100.0L + 0.5L)) / 100.0;
}

double stddev_2dp(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  long double sum = 0;
  for (double v : values) sum += v;
  long double mean = sum / static_cast<long double>(values.size());
  long double acc = 0;
  for (double v : values) acc += (v - mean) * (v - mean);
  long double sd = std::sqrt(acc / static_cast<long double>(values.size()));
  return static_cast<double>(std::floor(sd * 100.0L + 0.5L)) / 100.0;
}

}  // namespace repoforge
