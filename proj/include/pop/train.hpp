#ifndef POP_TRAIN_HPP_
#define POP_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pop/embeddings.hpp"
#include "pop/pipeline_model.hpp"
#include "pop/pop_model.hpp"

namespace pop {

struct TrainConfig {
	double lr0 = 0.09;
	double momentum = 0.09;
	double decay = 1e-4;
	std::size_t epochs = 14;
	std::uint64_t seed = 1;
	bool shuffle = true;

	bool operator==(const TrainConfig&) const = default;
};

void validate_train_config(const TrainConfig& config);

/**
 * Online SGD with classical momentum and inverse-time learning-rate decay:
 *
 *     lr_u     = lr0 / (1 + decay * u)      u = updates so far
 *     velocity = momentum * velocity - lr_u * grad
 *     param   += velocity
 */
class MomentumSgd {
public:
	MomentumSgd(const TrainConfig& config, std::vector<std::size_t> block_sizes);

	double learning_rate() const noexcept { return learning_rate(updates_); }
	double learning_rate(std::size_t update) const noexcept;
	std::size_t updates() const noexcept { return updates_; }

	/// Parameter and gradient blocks must match the sizes given at construction.
	void step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads);

private:
	TrainConfig config_;
	std::vector<Vector> velocity_;
	std::size_t updates_ = 0;
};

struct EpochLog {
	double train_loss = 0.0;
	/// Filled only when validation data is supplied.
	double val_loss = 0.0;
	double val_total = 0.0;
};

struct TrainLog {
	std::vector<EpochLog> epochs;
	std::size_t updates = 0;
	std::size_t zero_norm_events = 0;
};

/// Throws NumericError naming the act when a loss is not finite.
TrainLog train_pop(PopParams& params, std::span<const EncodedAct> data, const TrainConfig& config,
		std::span<const EncodedAct> validation = {});

TrainLog train_pipeline(PipelineParams& params, std::span<const Triple> triples, const TrainConfig& config,
		double margin);

} // namespace pop

#endif
