#pragma once

// Locale-independent number formatting, RFC-4180 CSV and content digests.

#include <filesystem>
#include <string>
#include <vector>

namespace optomech {

// Shortest round-trip text is not used; every value gets 17 significant digits.
// Non-finite values print as nan, inf, -inf.
std::string format_number(double v);

std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes bytes exactly, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace optomech
