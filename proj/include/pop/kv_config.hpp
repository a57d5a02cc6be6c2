#ifndef POP_KV_CONFIG_HPP_
#define POP_KV_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pop {

/**
 * Flat "key = value" configuration. Blank lines and lines starting with '#'
 * are ignored. Typed getters record which keys were read, so callers can
 * reject typos with require_all_used().
 */
class KeyValues {
public:
	KeyValues() = default;
	static KeyValues parse(const std::string& text);
	static KeyValues load(const std::filesystem::path& path);

	void set(const std::string& key, const std::string& value) { values_[key] = value; }
	bool has(const std::string& key) const { return values_.count(key) != 0; }
	const std::map<std::string, std::string>& values() const noexcept { return values_; }

	std::optional<std::string> get_string(const std::string& key) const;
	std::optional<double> get_double(const std::string& key) const;
	std::optional<std::size_t> get_size(const std::string& key) const;
	std::optional<std::uint64_t> get_u64(const std::string& key) const;
	std::optional<bool> get_bool(const std::string& key) const;

	template<typename T>
	void read(const std::string& key, T& target) const;

	/// Throws ConfigError listing keys never read.
	void require_all_used() const;
	/// Merges other over this (other wins).
	void merge(const KeyValues& other);

	std::string serialize() const;

private:
	std::map<std::string, std::string> values_;
	mutable std::set<std::string> used_;
};

template<>
inline void KeyValues::read<double>(const std::string& key, double& target) const {
	if (auto v = get_double(key)) target = *v;
}
template<>
inline void KeyValues::read<std::size_t>(const std::string& key, std::size_t& target) const {
	if (auto v = get_size(key)) target = *v;
}
template<>
inline void KeyValues::read<bool>(const std::string& key, bool& target) const {
	if (auto v = get_bool(key)) target = *v;
}
template<>
inline void KeyValues::read<std::string>(const std::string& key, std::string& target) const {
	if (auto v = get_string(key)) target = *v;
}

} // namespace pop

#endif
