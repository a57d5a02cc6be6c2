#ifndef POP_METRICS_HPP_
#define POP_METRICS_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include <json.hpp>

#include "pop/reference_act.hpp"

namespace pop {

enum class GoldCategory : std::size_t { pointing = 0, missref = 1, multref = 2 };
enum class PredictedOutcome : std::size_t { right_point = 0, wrong_point = 1, protest = 2 };

GoldCategory category_of(const Gold& gold);

/// Accuracy itemized by gold category, from raw counts.
struct Metrics {
	std::array<std::size_t, 3> correct{};
	std::array<std::size_t, 3> count{};
	/// confusion[gold category][outcome]
	std::array<std::array<std::size_t, 3>, 3> confusion{};

	void add(const Gold& gold, const Prediction& prediction);

	std::size_t n() const noexcept { return count[0] + count[1] + count[2]; }
	std::size_t n_correct() const noexcept { return correct[0] + correct[1] + correct[2]; }
	/// Percentages; 0 for an empty category.
	double total() const noexcept;
	double pointing() const noexcept { return percent(GoldCategory::pointing); }
	double missref() const noexcept { return percent(GoldCategory::missref); }
	double multref() const noexcept { return percent(GoldCategory::multref); }
	double percent(GoldCategory c) const noexcept;

	bool operator==(const Metrics&) const = default;
};

bool is_correct(const Gold& gold, const Prediction& prediction);

Metrics score(std::span<const Gold> golds, std::span<const Prediction> predictions);

/// Runs the predictor over every act. Acts must expose a `gold` member.
template<typename Act, typename Predictor>
Metrics evaluate(std::span<const Act> acts, Predictor&& predictor) {
	Metrics m;
	for (const auto& act : acts)
		m.add(act.gold, predictor(act));
	return m;
}

nlohmann::json to_json(const Metrics& m);
/// "Total Pointing MissRef MultRef" rounded to integers, as in a results table.
std::string format_row(const std::string& name, const Metrics& m);
std::string format_header();

} // namespace pop

#endif
