#pragma once

// File helpers shared by the stage outputs: whole-file reads, line iteration,
// CSV quoting and parsing, and SHA-256 digests for run manifests.

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace moocscope {

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never observe
/// a partially written artifact.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Calls fn(line_number, line) for each line; line numbers start at 1 and a
/// trailing '\r' is stripped.
void for_each_line(std::string_view text, const std::function<void(std::size_t, std::string_view)>& fn);

/// Lines of a word-list style file with '#' comments and blank lines removed.
std::vector<std::string> content_lines(std::string_view text);

std::string csv_escape(std::string_view field);

/// Parses CSV text (RFC 4180 quoting, embedded newlines allowed) into rows.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace moocscope
