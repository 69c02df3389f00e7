#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavefill {

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Fixed-point text with `decimals` digits; non-finite values become "nan".
std::string format_fixed(double value, int decimals = 6);

std::vector<std::string_view> split_fields(std::string_view line, char delimiter);
std::string_view trim(std::string_view text);

}  // namespace wavefill
