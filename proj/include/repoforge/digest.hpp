// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace repoforge {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Streaming SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& p);

}  // namespace repoforge
