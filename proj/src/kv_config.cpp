#include "pop/kv_config.hpp"

#include <charconv>
#include <sstream>

#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

KeyValues KeyValues::parse(const std::string& text) {
	KeyValues kv;
	std::istringstream in(text);
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		auto body = trim(line);
		if (body.empty() || body.front() == '#')
			continue;
		const auto eq = body.find('=');
		if (eq == std::string_view::npos)
			throw ParseError("expected 'key = value'", line_no);
		std::string key(trim(body.substr(0, eq)));
		if (key.empty())
			throw ParseError("empty key", line_no);
		if (kv.values_.count(key))
			throw ParseError("duplicate key '" + key + "'", line_no);
		kv.values_[key] = std::string(trim(body.substr(eq + 1)));
	}
	return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
	return parse(read_file(path));
}

std::optional<std::string> KeyValues::get_string(const std::string& key) const {
	auto it = values_.find(key);
	if (it == values_.end())
		return std::nullopt;
	used_.insert(key);
	return it->second;
}

std::optional<double> KeyValues::get_double(const std::string& key) const {
	auto s = get_string(key);
	if (!s)
		return std::nullopt;
	auto v = parse_double(*s);
	if (!v)
		throw ConfigError("key '" + key + "': '" + *s + "' is not a number");
	return v;
}

std::optional<std::size_t> KeyValues::get_size(const std::string& key) const {
	auto s = get_string(key);
	if (!s)
		return std::nullopt;
	auto v = parse_size(*s);
	if (!v)
		throw ConfigError("key '" + key + "': '" + *s + "' is not a non-negative integer");
	return v;
}

std::optional<std::uint64_t> KeyValues::get_u64(const std::string& key) const {
	auto s = get_string(key);
	if (!s)
		return std::nullopt;
	std::uint64_t v = 0;
	auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
	if (s->empty() || ec != std::errc() || ptr != s->data() + s->size())
		throw ConfigError("key '" + key + "': '" + *s + "' is not a 64-bit unsigned integer");
	return v;
}

std::optional<bool> KeyValues::get_bool(const std::string& key) const {
	auto s = get_string(key);
	if (!s)
		return std::nullopt;
	const std::string v = to_lower(*s);
	if (v == "1" || v == "true" || v == "on" || v == "yes")
		return true;
	if (v == "0" || v == "false" || v == "off" || v == "no")
		return false;
	throw ConfigError("key '" + key + "': '" + *s + "' is not a boolean");
}

void KeyValues::require_all_used() const {
	std::string unknown;
	for (const auto& [key, value] : values_)
		if (!used_.count(key))
			unknown += (unknown.empty() ? "" : ", ") + key;
	if (!unknown.empty())
		throw ConfigError("unknown configuration keys: " + unknown);
}

void KeyValues::merge(const KeyValues& other) {
	for (const auto& [key, value] : other.values_)
		values_[key] = value;
}

std::string KeyValues::serialize() const {
	std::string out;
	for (const auto& [key, value] : values_)
		out += key + " = " + value + "\n";
	return out;
}

} // namespace pop
