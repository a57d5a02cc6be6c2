#include "pop/text_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pop/error.hpp"

namespace pop {

std::string format_double(double x) {
	std::array<char, 64> buf;
	auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
	return std::string(buf.data(), end);
}

std::optional<double> parse_double(std::string_view field) {
	if (field.empty())
		return std::nullopt;
	if (field.front() == '+')
		field.remove_prefix(1);
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
	if (ec != std::errc() || ptr != field.data() + field.size())
		return std::nullopt;
	return value;
}

std::optional<std::size_t> parse_size(std::string_view field) {
	std::size_t value = 0;
	auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
	if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
		return std::nullopt;
	return value;
}

std::string_view trim(std::string_view s) {
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
		s.remove_prefix(1);
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
		s.remove_suffix(1);
	return s;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
	std::vector<std::string_view> out;
	std::size_t i = 0;
	while (i < line.size()) {
		while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
			++i;
		const std::size_t start = i;
		while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
			++i;
		if (i > start)
			out.push_back(line.substr(start, i - start));
	}
	return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
	std::vector<std::string_view> out;
	std::size_t start = 0;
	for (;;) {
		const std::size_t pos = s.find(sep, start);
		if (pos == std::string_view::npos) {
			out.push_back(s.substr(start));
			return out;
		}
		out.push_back(s.substr(start, pos - start));
		start = pos + 1;
	}
}

std::string to_lower(std::string_view s) {
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(),
			[](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return out;
}

std::string read_file(const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ParseError("cannot open " + path.string(), 0);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
	if (path.has_parent_path())
		std::filesystem::create_directories(path.parent_path());
	auto tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw Error("cannot write " + path.string());
		out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
		if (!out)
			throw Error("write failed: " + path.string());
	}
	std::filesystem::rename(tmp, path);
}

} // namespace pop
