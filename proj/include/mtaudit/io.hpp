#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mtaudit::io {

// Throws IoError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs it, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// RFC 4180 quoting: fields containing comma, quote, CR or LF are quoted.
std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace mtaudit::io
