#ifndef POP_PIPELINE_MODEL_HPP_
#define POP_PIPELINE_MODEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "pop/checkpoint.hpp"
#include "pop/embeddings.hpp"
#include "pop/numerics.hpp"
#include "pop/reference_act.hpp"
#include "pop/rng.hpp"

namespace pop {

/// Linear maps of queries and candidates into a shared space.
struct PipelineParams {
	Matrix query_map;      ///< d_shared x d_query
	Matrix candidate_map;  ///< d_shared x d_cand

	static PipelineParams zeros(std::size_t d_shared, std::size_t d_query, std::size_t d_cand);
	std::size_t d_shared() const noexcept { return query_map.rows(); }
	bool all_finite() const { return query_map.all_finite() && candidate_map.all_finite(); }
	bool operator==(const PipelineParams&) const = default;
};

PipelineParams init_pipeline_params(std::size_t d_shared, std::size_t d_query, std::size_t d_cand, Rng& rng);

/// Protest when the best cosine is below `miss`, or the top-two gap below `diff`.
struct Thresholds {
	double miss = 0.1;
	double diff = 0.05;
	bool operator==(const Thresholds&) const = default;
};

struct Triple {
	Vector query;
	Vector positive;
	Vector negative;
};

/// One triple per non-gold candidate of every successful act; anomalous acts give none.
std::vector<Triple> extract_pairs(std::span<const EncodedAct> acts);

/**
 * As extract_pairs, but negatives are candidates drawn uniformly from the
 * whole corpus (excluding the positive's own act) instead of the act's other
 * items. Same number of triples.
 */
std::vector<Triple> extract_pairs_corpus(std::span<const EncodedAct> acts, Rng& rng);

/// max(0, margin - cos(Mq q, Mo pos) + cos(Mq q, Mo neg)).
double hinge_loss(const Triple& t, const PipelineParams& params, double margin);

struct PipelineGradients {
	Matrix query_map;
	Matrix candidate_map;
};

/// Subgradient of hinge_loss; zero where the hinge is inactive.
PipelineGradients hinge_gradient(const Triple& t, const PipelineParams& params, double margin);

/// Cosine similarity of the mapped query with each mapped candidate.
Vector pipeline_similarities(const PipelineParams& params, const EncodedAct& act);

/// Threshold rules applied to a similarity profile; lowest index wins ties.
Prediction decide(std::span<const double> sims, const Thresholds& thresholds);
Prediction pipeline_predict(const PipelineParams& params, const Thresholds& thresholds, const EncodedAct& act);

/// Grid values: miss in {-1.00, -0.95, ..., 1.00}, diff in {0.00, 0.01, ..., 0.50}.
std::vector<double> miss_grid();
std::vector<double> diff_grid();

/**
 * Exhaustive grid search maximizing Total accuracy on the validation acts.
 * Ties go to the smaller miss threshold, then the smaller diff threshold.
 */
Thresholds tune_thresholds(const PipelineParams& params, std::span<const EncodedAct> validation);

Checkpoint to_checkpoint(const PipelineParams& params, const Thresholds& thresholds, double margin);
PipelineParams pipeline_params_from_checkpoint(const Checkpoint& ckpt);
Thresholds thresholds_from_checkpoint(const Checkpoint& ckpt);

} // namespace pop

#endif
