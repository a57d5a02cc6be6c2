#ifndef POP_BASELINES_HPP_
#define POP_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pop/embeddings.hpp"
#include "pop/reference_act.hpp"
#include "pop/rng.hpp"

namespace pop {

/// Uniform over the max_len + 1 fixed labels {Point(0..max_len-1), Protest}.
/// Indices beyond the act's length are kept (and scored wrong).
Prediction random_predict(const ReferenceAct& act, Rng& rng, std::size_t max_len = 5);

/// Always protests.
Prediction majority_predict(const ReferenceAct& act);

/// Relative frequency of each outcome label in a training split.
class LabelDistribution {
public:
	/// probs[i] for Point(i), i < max_len, then probs[max_len] for Protest.
	LabelDistribution(std::vector<double> probs);
	static LabelDistribution estimate(std::span<const ReferenceAct> train, std::size_t max_len = 5);

	std::size_t max_len() const noexcept { return probs_.size() - 1; }
	const std::vector<double>& probs() const noexcept { return probs_; }
	double protest() const noexcept { return probs_.back(); }
	Prediction sample(Rng& rng) const;

private:
	std::vector<double> probs_;
	std::vector<double> cumulative_;
};

/// Samples the marginal label, ignoring the act's length.
Prediction probability_predict(const ReferenceAct& act, const LabelDistribution& dist, Rng& rng);

/**
 * Stands in for a pretrained image classifier: each image gets its true
 * object label with probability p_true, otherwise a uniformly chosen other
 * label. Deterministic per (image id, seed).
 */
class SyntheticLabeler {
public:
	SyntheticLabeler(std::vector<std::string> labels, double p_true, std::uint64_t seed);
	std::string label(const std::string& image_id, const std::string& true_object) const;
	double p_true() const noexcept { return p_true_; }
private:
	std::vector<std::string> labels_;
	double p_true_;
	std::uint64_t seed_;
};

/// Case-insensitive, trimmed, containment in either direction.
bool lax_label_match(const std::string& query, const std::string& label);

/// Decision rule over produced labels: exactly one match points, otherwise protest.
Prediction cnn_decide(const std::string& query, std::span<const std::string> labels);
/// Object-Only only; throws UnsupportedInputError for attribute-bearing acts.
Prediction cnn_predict(const ReferenceAct& act, const SyntheticLabeler& labeler);

/// Uniform choice among items sharing the query attribute; protest if none.
/// Throws UnsupportedInputError for Object-Only acts.
Prediction attr_random_predict(const ReferenceAct& act, Rng& rng);

} // namespace pop

#endif
