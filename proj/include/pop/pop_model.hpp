#ifndef POP_POP_MODEL_HPP_
#define POP_POP_MODEL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pop/checkpoint.hpp"
#include "pop/embeddings.hpp"
#include "pop/numerics.hpp"
#include "pop/reference_act.hpp"
#include "pop/rng.hpp"

namespace pop {

enum class Nonlinearity { relu, sigmoid, tanh, identity };

std::string to_string(Nonlinearity f);
Nonlinearity parse_nonlinearity(const std::string& name);
double apply(Nonlinearity f, double x) noexcept;
/// Derivative expressed through the input x and output y = f(x).
double derivative(Nonlinearity f, double x, double y) noexcept;

struct PopConfig {
	std::size_t d_query = 1;
	std::size_t d_cand = 1;
	std::size_t d_ent = 300;
	std::size_t n_sensors = 100;
	Nonlinearity psi = Nonlinearity::relu;     ///< contrast sharpening on the anomaly pathway
	Nonlinearity phi = Nonlinearity::sigmoid;  ///< bounds the anomaly score
	bool sensor_nonlinearity = true;           ///< apply psi to the sensor cells
	bool use_bias = false;

	bool operator==(const PopConfig&) const = default;
};

/**
 * Learned parameters of the point-or-protest network.
 *
 *   entity_map   V      d_ent x d_cand   shared over candidates
 *   query_map    L      d_ent x d_query
 *   sensor_in    A_in   n_sensors x 2    over [cumulative similarity, cardinality]
 *   sensor_out   A_out  1 x n_sensors
 *
 * Bias vectors exist only when config.use_bias is set (otherwise empty).
 */
struct PopParams {
	PopConfig config;
	Matrix entity_map;
	Matrix query_map;
	Matrix sensor_in;
	Matrix sensor_out;
	Vector entity_bias;
	Vector query_bias;
	Vector sensor_bias;
	Vector score_bias;

	/// Zero-filled parameters of the right shapes.
	static PopParams zeros(const PopConfig& config);

	/// Every parameter block with its name, in a fixed order.
	std::vector<std::pair<std::string, std::span<double>>> blocks();
	std::vector<std::pair<std::string, std::span<const double>>> blocks() const;
	std::size_t parameter_count() const;
	bool all_finite() const;

	bool operator==(const PopParams&) const = default;
};

/// Gradients share the parameter layout.
using PopGradients = PopParams;

void validate_config(const PopConfig& config);

/// Glorot-uniform in (-a, a), a = sqrt(6 / (fan_in + fan_out)); biases zero.
PopParams init_params(const PopConfig& config, Rng& rng);

/// Every intermediate of one forward pass, kept for backpropagation.
struct ForwardTrace {
	std::vector<Vector> entity_vecs;
	Vector query_vec;
	Vector sims;          ///< raw query-entity dot products; these are the pointing logits
	Vector sharpened;     ///< psi(sims)
	double cum_sim = 0.0;
	double cardinality = 0.0;
	Vector sensors_pre;
	Vector sensors;
	double anomaly_raw = 0.0;
	double anomaly_score = 0.0;
	Vector logits;        ///< [sims || anomaly_score]
	Vector probs;

	std::size_t n() const noexcept { return sims.size(); }
};

/// Throws ContractError when the act's dimensions do not match the config.
ForwardTrace forward(const PopParams& params, const EncodedAct& act);

/// Output cell of a gold outcome: the index for Point, n for either anomaly kind.
std::size_t target_cell(const Gold& gold, std::size_t n);

/// Negative log-likelihood of the gold cell.
double loss(const ForwardTrace& trace, const Gold& gold);

/// Exact gradient of loss() with respect to every parameter.
PopGradients backward(const PopParams& params, const EncodedAct& act, const ForwardTrace& trace, const Gold& gold);

/// Argmax over the n+1 cells, lowest index on ties; cell n is a protest.
Prediction predict_from_probs(std::span<const double> probs);
Prediction predict(const PopParams& params, const EncodedAct& act);

Checkpoint to_checkpoint(const PopParams& params);
PopParams pop_params_from_checkpoint(const Checkpoint& ckpt);

} // namespace pop

#endif
