#include "pop/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

Prediction random_predict(const ReferenceAct&, Rng& rng, std::size_t max_len) {
	const std::size_t label = rng.below(max_len + 1);
	return label == max_len ? Prediction::protest() : Prediction::point(label);
}

Prediction majority_predict(const ReferenceAct&) {
	return Prediction::protest();
}

LabelDistribution::LabelDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
	if (probs_.size() < 2)
		throw ContractError("label distribution needs at least one point label and the protest label");
	double sum = 0.0;
	for (double p : probs_) {
		if (!(p >= 0.0))
			throw ContractError("label probabilities must be non-negative");
		sum += p;
	}
	if (std::abs(sum - 1.0) > 1e-12)
		throw ContractError("label probabilities must sum to 1");
	cumulative_.resize(probs_.size());
	double acc = 0.0;
	for (std::size_t i = 0; i < probs_.size(); ++i) {
		acc += probs_[i];
		cumulative_[i] = acc;
	}
}

LabelDistribution LabelDistribution::estimate(std::span<const ReferenceAct> train, std::size_t max_len) {
	if (train.empty())
		throw ContractError("cannot estimate a label distribution from an empty split");
	std::vector<std::size_t> counts(max_len + 1, 0);
	for (const auto& act : train) {
		if (act.gold.is_anomaly())
			++counts[max_len];
		else if (act.gold.index() < max_len)
			++counts[act.gold.index()];
		else
			throw ContractError("gold index beyond max_len in act '" + act.id + "'");
	}
	std::vector<double> probs(max_len + 1);
	for (std::size_t i = 0; i <= max_len; ++i)
		probs[i] = static_cast<double>(counts[i]) / static_cast<double>(train.size());
	// Absorb rounding so the sum is 1 within the constructor's tolerance.
	double sum = 0.0;
	for (double p : probs)
		sum += p;
	for (double& p : probs)
		p /= sum;
	return LabelDistribution(std::move(probs));
}

Prediction LabelDistribution::sample(Rng& rng) const {
	const double u = rng.uniform() * cumulative_.back();
	std::size_t label = 0;
	while (label + 1 < cumulative_.size() && !(u < cumulative_[label]))
		++label;
	// Skip zero-probability labels that a boundary draw could land on.
	while (probs_[label] == 0.0 && label + 1 < probs_.size())
		++label;
	return label == max_len() ? Prediction::protest() : Prediction::point(label);
}

Prediction probability_predict(const ReferenceAct&, const LabelDistribution& dist, Rng& rng) {
	return dist.sample(rng);
}

SyntheticLabeler::SyntheticLabeler(std::vector<std::string> labels, double p_true, std::uint64_t seed) :
		labels_(std::move(labels)), p_true_(p_true), seed_(seed) {
	if (!(p_true >= 0.0 && p_true <= 1.0))
		throw ConfigError("labeler accuracy must lie in [0, 1]");
	if (labels_.size() < 2)
		throw ConfigError("labeler needs at least two labels");
}

std::string SyntheticLabeler::label(const std::string& image_id, const std::string& true_object) const {
	Rng rng(derive_seed(seed_, image_id));
	if (rng.uniform() < p_true_)
		return true_object;
	for (;;) {
		const auto& other = labels_[rng.below(labels_.size())];
		if (other != true_object)
			return other;
	}
}

bool lax_label_match(const std::string& query, const std::string& label) {
	const std::string q = to_lower(trim(query));
	const std::string l = to_lower(trim(label));
	if (q.empty() || l.empty())
		return false;
	return l.find(q) != std::string::npos || q.find(l) != std::string::npos;
}

Prediction cnn_decide(const std::string& query, std::span<const std::string> labels) {
	std::size_t hits = 0;
	std::size_t where = 0;
	for (std::size_t k = 0; k < labels.size(); ++k) {
		if (lax_label_match(query, labels[k])) {
			++hits;
			where = k;
		}
	}
	return hits == 1 ? Prediction::point(where) : Prediction::protest();
}

Prediction cnn_predict(const ReferenceAct& act, const SyntheticLabeler& labeler) {
	if (act.query.attribute)
		throw UnsupportedInputError("the CNN baseline does not handle attributes (act '" + act.id + "')");
	std::vector<std::string> labels;
	labels.reserve(act.items.size());
	for (const auto& item : act.items)
		labels.push_back(labeler.label(item.image_id, item.object));
	return cnn_decide(act.query.noun, labels);
}

Prediction attr_random_predict(const ReferenceAct& act, Rng& rng) {
	if (!act.query.attribute)
		throw UnsupportedInputError("AttrRandom needs attribute-bearing acts (act '" + act.id + "')");
	std::vector<std::size_t> sharing;
	for (std::size_t k = 0; k < act.items.size(); ++k)
		if (act.items[k].attribute == act.query.attribute)
			sharing.push_back(k);
	if (sharing.empty())
		return Prediction::protest();
	return Prediction::point(sharing[rng.below(sharing.size())]);
}

} // namespace pop
