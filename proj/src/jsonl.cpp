#include <sstream>

#include <json.hpp>

#include "pop/datagen.hpp"
#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json optional_string(const std::optional<std::string>& s) {
	return s ? ordered_json(*s) : ordered_json(nullptr);
}

const nlohmann::json& field(const nlohmann::json& obj, const char* key, std::size_t line_no) {
	if (!obj.is_object())
		throw ParseError("expected a JSON object", line_no);
	auto it = obj.find(key);
	if (it == obj.end())
		throw ParseError(std::string("missing field \"") + key + "\"", line_no);
	return *it;
}

std::string string_field(const nlohmann::json& obj, const char* key, std::size_t line_no) {
	const auto& v = field(obj, key, line_no);
	if (!v.is_string())
		throw ParseError(std::string("field \"") + key + "\" must be a string", line_no);
	return v.get<std::string>();
}

std::optional<std::string> nullable_string(const nlohmann::json& obj, const char* key, std::size_t line_no) {
	const auto& v = field(obj, key, line_no);
	if (v.is_null())
		return std::nullopt;
	if (!v.is_string())
		throw ParseError(std::string("field \"") + key + "\" must be a string or null", line_no);
	return v.get<std::string>();
}

} // namespace

std::string act_to_json_line(const ReferenceAct& act) {
	ordered_json j;
	j["id"] = act.id;
	j["query"] = {{"noun", act.query.noun}, {"attribute", optional_string(act.query.attribute)}};
	auto items = ordered_json::array();
	for (const auto& item : act.items)
		items.push_back({{"object", item.object}, {"image_id", item.image_id},
				{"attribute", optional_string(item.attribute)}});
	j["items"] = std::move(items);
	ordered_json gold;
	if (act.gold.is_point()) {
		gold = {{"kind", "point"}, {"index", act.gold.index()}, {"anomaly_kind", nullptr}};
	} else {
		gold = {{"kind", "anomaly"}, {"index", nullptr},
				{"anomaly_kind", act.gold.anomaly_kind() == AnomalyKind::miss ? "miss" : "mult"}};
	}
	j["gold"] = std::move(gold);
	return j.dump();
}

ReferenceAct act_from_json_line(const std::string& line, std::size_t line_no) {
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(line);
	} catch (const nlohmann::json::parse_error& e) {
		throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
	}
	ReferenceAct act;
	act.id = string_field(j, "id", line_no);
	const auto& query = field(j, "query", line_no);
	act.query.noun = string_field(query, "noun", line_no);
	act.query.attribute = nullable_string(query, "attribute", line_no);

	const auto& items = field(j, "items", line_no);
	if (!items.is_array())
		throw ParseError("field \"items\" must be an array", line_no);
	for (const auto& item : items)
		act.items.push_back(Item{string_field(item, "object", line_no), string_field(item, "image_id", line_no),
				nullable_string(item, "attribute", line_no)});

	const auto& gold = field(j, "gold", line_no);
	const std::string kind = string_field(gold, "kind", line_no);
	const auto& index = field(gold, "index", line_no);
	const auto& anomaly = field(gold, "anomaly_kind", line_no);
	if (kind == "point") {
		if (!index.is_number_unsigned() || !anomaly.is_null())
			throw ParseError("point gold needs a non-negative integer index and null anomaly_kind", line_no);
		act.gold = Gold::point(index.get<std::size_t>());
	} else if (kind == "anomaly") {
		if (!index.is_null() || !anomaly.is_string())
			throw ParseError("anomaly gold needs null index and an anomaly_kind", line_no);
		const auto name = anomaly.get<std::string>();
		if (name == "miss")
			act.gold = Gold::anomaly(AnomalyKind::miss);
		else if (name == "mult")
			act.gold = Gold::anomaly(AnomalyKind::mult);
		else
			throw ParseError("anomaly_kind must be \"miss\" or \"mult\"", line_no);
	} else {
		throw ParseError("gold kind must be \"point\" or \"anomaly\"", line_no);
	}
	return act;
}

void write_jsonl(std::span<const ReferenceAct> acts, const std::filesystem::path& path) {
	std::string out;
	for (const auto& act : acts) {
		out += act_to_json_line(act);
		out += '\n';
	}
	write_file(path, out);
}

std::vector<ReferenceAct> parse_jsonl(const std::string& text) {
	std::vector<ReferenceAct> acts;
	std::istringstream in(text);
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		acts.push_back(act_from_json_line(line, line_no));
	}
	return acts;
}

std::vector<ReferenceAct> read_jsonl(const std::filesystem::path& path) {
	return parse_jsonl(read_file(path));
}

} // namespace pop
