#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace gasflow::io {

/// Whole-file read. Throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, creating
/// parent directories. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trippable decimal form, locale independent.
std::string format_double(double value);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace gasflow::io
