#include "pop/train.hpp"

#include <cmath>
#include <numeric>

#include "pop/error.hpp"
#include "pop/metrics.hpp"

namespace pop {

void validate_train_config(const TrainConfig& c) {
	if (!(c.lr0 > 0.0))
		throw ConfigError("learning rate must be positive");
	if (!(c.momentum >= 0.0 && c.momentum < 1.0))
		throw ConfigError("momentum must lie in [0, 1)");
	if (!(c.decay >= 0.0))
		throw ConfigError("learning-rate decay must be non-negative");
}

MomentumSgd::MomentumSgd(const TrainConfig& config, std::vector<std::size_t> block_sizes) : config_(config) {
	validate_train_config(config);
	for (std::size_t n : block_sizes)
		velocity_.emplace_back(n, 0.0);
}

double MomentumSgd::learning_rate(std::size_t update) const noexcept {
	return config_.lr0 / (1.0 + config_.decay * static_cast<double>(update));
}

void MomentumSgd::step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads) {
	if (params.size() != velocity_.size() || grads.size() != velocity_.size())
		throw ContractError("optimizer: block count mismatch");
	const double lr = learning_rate();
	for (std::size_t b = 0; b < velocity_.size(); ++b) {
		auto& v = velocity_[b];
		if (params[b].size() != v.size() || grads[b].size() != v.size())
			throw ContractError("optimizer: block size mismatch");
		for (std::size_t i = 0; i < v.size(); ++i) {
			v[i] = config_.momentum * v[i] - lr * grads[b][i];
			params[b][i] += v[i];
		}
	}
	++updates_;
}

namespace {

std::vector<std::size_t> epoch_order(std::size_t n, bool shuffle, Rng& rng) {
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	if (shuffle)
		rng.shuffle(std::span(order));
	return order;
}

} // namespace

TrainLog train_pop(PopParams& params, std::span<const EncodedAct> data, const TrainConfig& config,
		std::span<const EncodedAct> validation) {
	validate_train_config(config);
	if (data.empty())
		throw ContractError("train_pop: no training data");
	std::vector<std::size_t> sizes;
	for (const auto& block : params.blocks())
		sizes.push_back(block.second.size());
	MomentumSgd sgd(config, sizes);
	Rng rng(config.seed);
	TrainLog log;

	for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
		double sum = 0.0;
		for (std::size_t i : epoch_order(data.size(), config.shuffle, rng)) {
			const EncodedAct& act = data[i];
			const ForwardTrace trace = forward(params, act);
			const double l = loss(trace, act.gold);
			if (!std::isfinite(l))
				throw NumericError("non-finite loss on act '" + act.id + "' (epoch " + std::to_string(epoch) +
						", update " + std::to_string(sgd.updates()) + ", anomaly_raw " +
						std::to_string(trace.anomaly_raw) + ")");
			sum += l;
			PopGradients g = backward(params, act, trace, act.gold);
			std::vector<std::span<double>> p;
			std::vector<std::span<const double>> d;
			for (auto& block : params.blocks())
				p.push_back(block.second);
			for (auto& block : g.blocks())
				d.emplace_back(block.second);
			sgd.step(p, d);
		}
		EpochLog e;
		e.train_loss = sum / static_cast<double>(data.size());
		if (!validation.empty()) {
			double vsum = 0.0;
			Metrics m;
			for (const auto& act : validation) {
				const ForwardTrace t = forward(params, act);
				vsum += loss(t, act.gold);
				m.add(act.gold, predict_from_probs(t.probs));
			}
			e.val_loss = vsum / static_cast<double>(validation.size());
			e.val_total = m.total();
		}
		log.epochs.push_back(e);
	}
	if (!params.all_finite())
		throw NumericError("parameters became non-finite during training");
	log.updates = sgd.updates();
	return log;
}

TrainLog train_pipeline(PipelineParams& params, std::span<const Triple> triples, const TrainConfig& config,
		double margin) {
	validate_train_config(config);
	if (triples.empty())
		throw ContractError("train_pipeline: no training triples");
	MomentumSgd sgd(config, {params.query_map.size(), params.candidate_map.size()});
	Rng rng(config.seed);
	TrainLog log;
	for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
		double sum = 0.0;
		for (std::size_t i : epoch_order(triples.size(), config.shuffle, rng)) {
			const Triple& t = triples[i];
			const Vector q = matvec(params.query_map, t.query);
			if (norm(q) == 0.0 || norm(matvec(params.candidate_map, t.positive)) == 0.0 ||
					norm(matvec(params.candidate_map, t.negative)) == 0.0)
				++log.zero_norm_events;
			const double l = hinge_loss(t, params, margin);
			if (!std::isfinite(l))
				throw NumericError("non-finite hinge loss at triple " + std::to_string(i));
			sum += l;
			const PipelineGradients g = hinge_gradient(t, params, margin);
			const std::span<double> p[] = {params.query_map.data(), params.candidate_map.data()};
			const std::span<const double> d[] = {g.query_map.data(), g.candidate_map.data()};
			sgd.step(p, d);
		}
		log.epochs.push_back(EpochLog{sum / static_cast<double>(triples.size()), 0.0, 0.0});
	}
	log.updates = sgd.updates();
	return log;
}

} // namespace pop
