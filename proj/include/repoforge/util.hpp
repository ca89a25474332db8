// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace repoforge {

namespace fs = std::filesystem;

// ---- strings -------------------------------------------------------------

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::string to_lower(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Keeps at most `max_bytes` bytes; when clipped, prepends/appends a marker.
/// keep_tail=true keeps the end of the text (command output convention),
/// otherwise the beginning (document convention).
std::string clip_bytes(std::string_view s, std::size_t max_bytes, bool keep_tail);

/// Lowercase word tokens (alnum runs) of a text, for term-hit ranking.
std::vector<std::string> tokenize_terms(std::string_view text);

// ---- encoding ------------------------------------------------------------

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

// ---- filesystem ----------------------------------------------------------

std::string read_file_text(const fs::path& p);
/// Write-then-rename so readers never observe a half-written file.
void write_file_atomic(const fs::path& p, std::string_view content);
void append_line(const fs::path& p, std::string_view line);
void copy_tree(const fs::path& from, const fs::path& to);
/// Recursive content digest (paths + bytes) for "host tree untouched" checks.
std::string tree_fingerprint(const fs::path& root);

// ---- misc ----------------------------------------------------------------

std::int64_t now_ms();

/// FNV-1a-seeded deterministic id component (no wall clock, no rng): callers
/// pass a scope string and a counter and always get the same id back.
std::string stable_id(std::string_view scope, std::uint64_t counter);

/// Rounds 100 * numer / denom to one decimal, half-up, in integer space.
/// Returns the value as double (exact to one decimal place).
double percent_1dp(std::int64_t numer, std::int64_t denom);

/// Mean of values rounded to two decimals, half-up, in integer space over
/// centi-units. Values are given in raw units.
double mean_2dp(const std::vector<double>& values);

/// Population standard deviation rounded to two decimals.
double stddev_2dp(const std::vector<double>& values);

}  // namespace repoforge
