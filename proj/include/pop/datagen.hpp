#ifndef POP_DATAGEN_HPP_
#define POP_DATAGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pop/embeddings.hpp"
#include "pop/reference_act.hpp"

namespace pop {

enum class Task { object_only, object_attribute };

std::string to_string(Task task);
/// Accepts "object-only" and "object-attr". Throws ConfigError otherwise.
Task parse_task(const std::string& name);

struct DatasetSpec {
	std::size_t min_len = 2;
	std::size_t max_len = 5;
	double p_miss = 0.15;
	double p_mult = 0.15;
	std::size_t train = 40000;
	std::size_t val = 5000;
	std::size_t test = 10000;
	std::uint64_t seed = 1;

	bool operator==(const DatasetSpec&) const = default;
};

/// Throws ConfigError unless 2 <= min_len <= max_len, p_miss, p_mult >= 0 and p_miss + p_mult < 1.
void validate_spec(const DatasetSpec& spec);

/**
 * Object-Only acts [first, first + count) of a split. Every act draws from
 * its own generator, seeded from (spec.seed, split, act number), so any
 * sharding of a split into ranges reproduces the sequential output exactly.
 *
 * Per act: a length uniform in [min_len, max_len]; that many distinct objects
 * with one uniform image each; the first is the query. With probability p_miss
 * the query slot is replaced by an object absent from the sequence; with
 * probability p_mult a later slot is overwritten by the query object with a
 * fresh image. The sequence is then shuffled.
 */
std::vector<ReferenceAct> gen_object_only(const SyntheticWorld& world, const DatasetSpec& spec,
		const std::string& split, std::size_t count, std::size_t first = 0);

/**
 * Object+Attribute acts. The query pair (a1, o1) comes with two more
 * attributes a2, a3 of o1 and objects o2 (for a2) and o3 (for a3). The
 * confounder pool is {<a2,o1>, <a1,o2>, <a2,o2>, <a3,o1>, <a1,o3>, <a3,o3>}:
 * four share exactly one coordinate with the query, <a2,o2> and <a3,o3>
 * share none. The sequence is the query triple plus l-1 confounders. Anomalies and shuffling as for
 * Object-Only. Requires max_len <= 7.
 */
std::vector<ReferenceAct> gen_object_attribute(const SyntheticWorld& world, const DatasetSpec& spec,
		const std::string& split, std::size_t count, std::size_t first = 0);

std::vector<ReferenceAct> generate(Task task, const SyntheticWorld& world, const DatasetSpec& spec,
		const std::string& split, std::size_t count, std::size_t first = 0);

struct Splits {
	std::vector<ReferenceAct> train;
	std::vector<ReferenceAct> val;
	std::vector<ReferenceAct> test;
};

Splits generate_splits(Task task, const SyntheticWorld& world, const DatasetSpec& spec);

/// Empty string if the act is consistent, otherwise the first violation found.
std::string check_act(const ReferenceAct& act, std::size_t max_len = 5);
/// Throws GenerationError with the act id when check_act fails.
void validate_act(const ReferenceAct& act, std::size_t max_len = 5);

std::string act_to_json_line(const ReferenceAct& act);
/// Throws ParseError (line number attached by read_jsonl).
ReferenceAct act_from_json_line(const std::string& line, std::size_t line_no = 0);

void write_jsonl(std::span<const ReferenceAct> acts, const std::filesystem::path& path);
std::vector<ReferenceAct> read_jsonl(const std::filesystem::path& path);
std::vector<ReferenceAct> parse_jsonl(const std::string& text);

/// Average number of occurrences per distinct combination, over all items.
struct FrequencyRow {
	double object = 0.0;
	double object_image = 0.0;
	std::optional<double> object_attribute;
	std::optional<double> object_attribute_image;
};

struct DatasetStats {
	std::size_t acts = 0;
	std::size_t items = 0;
	FrequencyRow train;
	std::optional<FrequencyRow> test;
	/// Percentage of distinct test combinations never seen in train.
	std::optional<FrequencyRow> unseen_percent;
};

DatasetStats dataset_stats(std::span<const ReferenceAct> train,
		std::optional<std::span<const ReferenceAct>> test = std::nullopt);

std::string format_stats(const DatasetStats& stats);

} // namespace pop

#endif
