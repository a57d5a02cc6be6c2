#ifndef POP_TEXT_IO_HPP_
#define POP_TEXT_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pop {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double x);
/// Strict decimal parse of the whole field; nullopt on failure.
std::optional<double> parse_double(std::string_view field);
std::optional<std::size_t> parse_size(std::string_view field);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string to_lower(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace pop

#endif
