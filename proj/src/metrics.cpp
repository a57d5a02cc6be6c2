#include "pop/metrics.hpp"

#include <cstdio>

#include "pop/error.hpp"

namespace pop {

GoldCategory category_of(const Gold& gold) {
	if (gold.is_point())
		return GoldCategory::pointing;
	return gold.anomaly_kind() == AnomalyKind::miss ? GoldCategory::missref : GoldCategory::multref;
}

bool is_correct(const Gold& gold, const Prediction& p) {
	if (gold.is_point())
		return p.is_point() && p.index() == gold.index();
	return p.is_protest();
}

void Metrics::add(const Gold& gold, const Prediction& p) {
	const auto c = static_cast<std::size_t>(category_of(gold));
	++count[c];
	correct[c] += is_correct(gold, p);
	PredictedOutcome o = PredictedOutcome::protest;
	if (p.is_point())
		o = gold.is_point() && p.index() == gold.index() ? PredictedOutcome::right_point : PredictedOutcome::wrong_point;
	++confusion[c][static_cast<std::size_t>(o)];
}

double Metrics::total() const noexcept {
	return n() ? 100.0 * static_cast<double>(n_correct()) / static_cast<double>(n()) : 0.0;
}

double Metrics::percent(GoldCategory c) const noexcept {
	const auto i = static_cast<std::size_t>(c);
	return count[i] ? 100.0 * static_cast<double>(correct[i]) / static_cast<double>(count[i]) : 0.0;
}

Metrics score(std::span<const Gold> golds, std::span<const Prediction> predictions) {
	if (golds.size() != predictions.size())
		throw ContractError("score: gold and prediction counts differ");
	Metrics m;
	for (std::size_t i = 0; i < golds.size(); ++i)
		m.add(golds[i], predictions[i]);
	return m;
}

nlohmann::json to_json(const Metrics& m) {
	static const char* names[] = {"pointing", "missref", "multref"};
	static const char* outcomes[] = {"right_point", "wrong_point", "protest"};
	nlohmann::json j;
	j["total"] = m.total();
	j["pointing"] = m.pointing();
	j["missref"] = m.missref();
	j["multref"] = m.multref();
	j["n"] = m.n();
	j["n_correct"] = m.n_correct();
	for (std::size_t c = 0; c < 3; ++c) {
		j["counts"][names[c]] = {{"correct", m.correct[c]}, {"n", m.count[c]}};
		for (std::size_t o = 0; o < 3; ++o)
			j["confusion"][names[c]][outcomes[o]] = m.confusion[c][o];
	}
	return j;
}

std::string format_header() {
	return "model            Total Pointing MissRef MultRef\n";
}

std::string format_row(const std::string& name, const Metrics& m) {
	char buf[128];
	std::snprintf(buf, sizeof buf, "%-15s %6.0f %8.0f %7.0f %7.0f\n", name.c_str(), m.total(), m.pointing(),
			m.missref(), m.multref());
	return buf;
}

} // namespace pop
