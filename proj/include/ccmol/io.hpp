#pragma once

#include <filesystem>
#include <string>

namespace ccmol {

/// Writes `contents` to a temporary sibling file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace ccmol
