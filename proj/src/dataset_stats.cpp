#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "pop/datagen.hpp"

namespace pop {

namespace {

struct Counts {
	std::map<std::string, std::size_t> o;
	std::map<std::pair<std::string, std::string>, std::size_t> oi;
	std::map<std::pair<std::string, std::string>, std::size_t> oa;
	std::map<std::tuple<std::string, std::string, std::string>, std::size_t> oai;
	bool attributes = false;
	std::size_t items = 0;
};

Counts count(std::span<const ReferenceAct> acts) {
	Counts c;
	for (const auto& act : acts) {
		for (const auto& item : act.items) {
			++c.items;
			++c.o[item.object];
			++c.oi[{item.object, item.image_id}];
			if (item.attribute) {
				c.attributes = true;
				++c.oa[{item.object, *item.attribute}];
				++c.oai[{item.object, *item.attribute, item.image_id}];
			}
		}
	}
	return c;
}

template<typename Map>
double mean_frequency(const Map& m) {
	if (m.empty())
		return 0.0;
	std::size_t total = 0;
	for (const auto& [key, n] : m)
		total += n;
	return static_cast<double>(total) / static_cast<double>(m.size());
}

template<typename Map>
double unseen_percent(const Map& test, const Map& train) {
	if (test.empty())
		return 0.0;
	std::size_t unseen = 0;
	for (const auto& [key, n] : test)
		unseen += train.count(key) == 0;
	return 100.0 * static_cast<double>(unseen) / static_cast<double>(test.size());
}

FrequencyRow frequencies(const Counts& c) {
	FrequencyRow row{mean_frequency(c.o), mean_frequency(c.oi), std::nullopt, std::nullopt};
	if (c.attributes) {
		row.object_attribute = mean_frequency(c.oa);
		row.object_attribute_image = mean_frequency(c.oai);
	}
	return row;
}

} // namespace

DatasetStats dataset_stats(std::span<const ReferenceAct> train, std::optional<std::span<const ReferenceAct>> test) {
	DatasetStats stats;
	const Counts tr = count(train);
	stats.acts = train.size();
	stats.items = tr.items;
	stats.train = frequencies(tr);
	if (test) {
		const Counts te = count(*test);
		stats.test = frequencies(te);
		FrequencyRow unseen{unseen_percent(te.o, tr.o), unseen_percent(te.oi, tr.oi), std::nullopt, std::nullopt};
		if (te.attributes) {
			unseen.object_attribute = unseen_percent(te.oa, tr.oa);
			unseen.object_attribute_image = unseen_percent(te.oai, tr.oai);
		}
		stats.unseen_percent = unseen;
	}
	return stats;
}

std::string format_stats(const DatasetStats& stats) {
	auto cell = [](std::optional<double> v) {
		char buf[32];
		if (!v)
			return std::string("     --");
		std::snprintf(buf, sizeof buf, "%7.1f", *v);
		return std::string(buf);
	};
	auto row = [&](const char* name, const FrequencyRow& r) {
		return std::string(name) + cell(r.object) + cell(r.object_image) + cell(r.object_attribute) +
				cell(r.object_attribute_image) + "\n";
	};
	std::string out = "                          O    O+I    O+A  O+A+I\n";
	out += row("train avg. frequency  ", stats.train);
	if (stats.test)
		out += row("test avg. frequency   ", *stats.test);
	if (stats.unseen_percent)
		out += row("unseen in test (%)    ", *stats.unseen_percent);
	return out;
}

} // namespace pop
