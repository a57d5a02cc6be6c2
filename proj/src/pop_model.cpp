#include "pop/pop_model.hpp"

#include <cmath>

#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

std::string to_string(Nonlinearity f) {
	switch (f) {
	case Nonlinearity::relu: return "relu";
	case Nonlinearity::sigmoid: return "sigmoid";
	case Nonlinearity::tanh: return "tanh";
	case Nonlinearity::identity: return "identity";
	}
	return "identity";
}

Nonlinearity parse_nonlinearity(const std::string& name) {
	if (name == "relu")
		return Nonlinearity::relu;
	if (name == "sigmoid")
		return Nonlinearity::sigmoid;
	if (name == "tanh")
		return Nonlinearity::tanh;
	if (name == "identity")
		return Nonlinearity::identity;
	throw ConfigError("unknown nonlinearity '" + name + "'");
}

double apply(Nonlinearity f, double x) noexcept {
	switch (f) {
	case Nonlinearity::relu: return x > 0.0 ? x : 0.0;
	case Nonlinearity::sigmoid: return sigmoid(x);
	case Nonlinearity::tanh: return std::tanh(x);
	case Nonlinearity::identity: return x;
	}
	return x;
}

double derivative(Nonlinearity f, double x, double y) noexcept {
	switch (f) {
	case Nonlinearity::relu: return relu_derivative(x);
	case Nonlinearity::sigmoid: return y * (1.0 - y);
	case Nonlinearity::tanh: return 1.0 - y * y;
	case Nonlinearity::identity: return 1.0;
	}
	return 1.0;
}

void validate_config(const PopConfig& c) {
	if (c.d_query < 1 || c.d_cand < 1 || c.d_ent < 1 || c.n_sensors < 1)
		throw ConfigError("PoP dimensions must all be at least 1");
}

PopParams PopParams::zeros(const PopConfig& config) {
	validate_config(config);
	PopParams p;
	p.config = config;
	p.entity_map = Matrix(config.d_ent, config.d_cand);
	p.query_map = Matrix(config.d_ent, config.d_query);
	p.sensor_in = Matrix(config.n_sensors, 2);
	p.sensor_out = Matrix(1, config.n_sensors);
	if (config.use_bias) {
		p.entity_bias.assign(config.d_ent, 0.0);
		p.query_bias.assign(config.d_ent, 0.0);
		p.sensor_bias.assign(config.n_sensors, 0.0);
		p.score_bias.assign(1, 0.0);
	}
	return p;
}

std::vector<std::pair<std::string, std::span<double>>> PopParams::blocks() {
	std::vector<std::pair<std::string, std::span<double>>> out = {
		{"V", entity_map.data()}, {"L", query_map.data()}, {"A_in", sensor_in.data()}, {"A_out", sensor_out.data()},
	};
	if (config.use_bias) {
		out.emplace_back("b_V", entity_bias);
		out.emplace_back("b_L", query_bias);
		out.emplace_back("b_in", sensor_bias);
		out.emplace_back("b_out", score_bias);
	}
	return out;
}

std::vector<std::pair<std::string, std::span<const double>>> PopParams::blocks() const {
	std::vector<std::pair<std::string, std::span<const double>>> out;
	for (auto& [name, span] : const_cast<PopParams*>(this)->blocks())
		out.emplace_back(name, span);
	return out;
}

std::size_t PopParams::parameter_count() const {
	std::size_t n = 0;
	for (const auto& block : blocks())
		n += block.second.size();
	return n;
}

bool PopParams::all_finite() const {
	for (const auto& block : blocks())
		for (double x : block.second)
			if (!std::isfinite(x))
				return false;
	return true;
}

PopParams init_params(const PopConfig& config, Rng& rng) {
	PopParams p = PopParams::zeros(config);
	auto glorot = [&rng](Matrix& m) {
		const double a = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
		for (double& x : m.data()) {
			// uniform() is in [0,1); reject the single value that would land on -a.
			do {
				x = rng.uniform(-a, a);
			} while (x == -a);
		}
	};
	glorot(p.entity_map);
	glorot(p.query_map);
	glorot(p.sensor_in);
	glorot(p.sensor_out);
	return p;
}

ForwardTrace forward(const PopParams& params, const EncodedAct& act) {
	const PopConfig& c = params.config;
	if (act.candidates.empty())
		throw ContractError("forward: act '" + act.id + "' has no candidates");
	if (act.query.size() != c.d_query)
		throw ContractError("forward: query dim " + std::to_string(act.query.size()) + " != " +
				std::to_string(c.d_query));

	ForwardTrace t;
	const std::size_t n = act.candidates.size();
	t.query_vec = matvec(params.query_map, act.query);
	if (c.use_bias)
		axpy(1.0, params.query_bias, t.query_vec);

	t.entity_vecs.reserve(n);
	t.sims.resize(n);
	t.sharpened.resize(n);
	for (std::size_t k = 0; k < n; ++k) {
		if (act.candidates[k].size() != c.d_cand)
			throw ContractError("forward: candidate dim " + std::to_string(act.candidates[k].size()) + " != " +
					std::to_string(c.d_cand));
		Vector e = matvec(params.entity_map, act.candidates[k]);
		if (c.use_bias)
			axpy(1.0, params.entity_bias, e);
		t.sims[k] = dot(t.query_vec, e);
		t.sharpened[k] = apply(c.psi, t.sims[k]);
		t.cum_sim += t.sharpened[k];
		t.entity_vecs.push_back(std::move(e));
	}
	t.cardinality = static_cast<double>(n);

	t.sensors_pre.resize(c.n_sensors);
	t.sensors.resize(c.n_sensors);
	for (std::size_t s = 0; s < c.n_sensors; ++s) {
		double pre = params.sensor_in(s, 0) * t.cum_sim + params.sensor_in(s, 1) * t.cardinality;
		if (c.use_bias)
			pre += params.sensor_bias[s];
		t.sensors_pre[s] = pre;
		t.sensors[s] = c.sensor_nonlinearity ? apply(c.psi, pre) : pre;
	}
	t.anomaly_raw = dot(params.sensor_out.row(0), t.sensors);
	if (c.use_bias)
		t.anomaly_raw += params.score_bias[0];
	t.anomaly_score = apply(c.phi, t.anomaly_raw);

	t.logits = t.sims;
	t.logits.push_back(t.anomaly_score);
	t.probs = softmax(t.logits);
	return t;
}

std::size_t target_cell(const Gold& gold, std::size_t n) {
	if (gold.is_anomaly())
		return n;
	if (gold.index() >= n)
		throw ContractError("gold index " + std::to_string(gold.index()) + " out of range for " +
				std::to_string(n) + " candidates");
	return gold.index();
}

double loss(const ForwardTrace& trace, const Gold& gold) {
	return -std::log(trace.probs[target_cell(gold, trace.n())]);
}

PopGradients backward(const PopParams& params, const EncodedAct& act, const ForwardTrace& t, const Gold& gold) {
	const PopConfig& c = params.config;
	const std::size_t n = t.n();
	PopGradients g = PopParams::zeros(c);

	// Softmax + negative log-likelihood.
	Vector d_logits = t.probs;
	d_logits[target_cell(gold, n)] -= 1.0;

	// Anomaly pathway, top to bottom.
	const double d_score = d_logits[n];
	const double d_raw = d_score * derivative(c.phi, t.anomaly_raw, t.anomaly_score);
	if (c.use_bias)
		g.score_bias[0] = d_raw;
	double d_cum = 0.0;
	for (std::size_t s = 0; s < c.n_sensors; ++s) {
		g.sensor_out(0, s) = d_raw * t.sensors[s];
		double d_pre = d_raw * params.sensor_out(0, s);
		if (c.sensor_nonlinearity)
			d_pre *= derivative(c.psi, t.sensors_pre[s], t.sensors[s]);
		g.sensor_in(s, 0) = d_pre * t.cum_sim;
		g.sensor_in(s, 1) = d_pre * t.cardinality;
		if (c.use_bias)
			g.sensor_bias[s] = d_pre;
		d_cum += d_pre * params.sensor_in(s, 0);
	}

	// Each similarity feeds its logit directly and the cumulative sum through psi.
	Vector d_query(c.d_ent, 0.0);
	for (std::size_t k = 0; k < n; ++k) {
		const double d_sim = d_logits[k] + d_cum * derivative(c.psi, t.sims[k], t.sharpened[k]);
		axpy(d_sim, t.entity_vecs[k], d_query);
		// d entity_k = d_sim * query_vec
		add_outer(g.entity_map, d_sim, t.query_vec, act.candidates[k]);
		if (c.use_bias)
			axpy(d_sim, t.query_vec, g.entity_bias);
	}
	add_outer(g.query_map, 1.0, d_query, act.query);
	if (c.use_bias)
		g.query_bias = d_query;
	return g;
}

Prediction predict_from_probs(std::span<const double> probs) {
	if (probs.size() < 2)
		throw ContractError("predict: need at least one candidate cell plus the protest cell");
	const std::size_t best = argmax(probs);
	return best + 1 == probs.size() ? Prediction::protest() : Prediction::point(best);
}

Prediction predict(const PopParams& params, const EncodedAct& act) {
	return predict_from_probs(forward(params, act).probs);
}

namespace {

Matrix as_row(const Vector& v) {
	return Matrix(1, v.size(), v);
}

} // namespace

Checkpoint to_checkpoint(const PopParams& p) {
	Checkpoint ckpt;
	ckpt.kind = "pop";
	const PopConfig& c = p.config;
	ckpt.meta = {
		{"d_query", std::to_string(c.d_query)},
		{"d_cand", std::to_string(c.d_cand)},
		{"d_ent", std::to_string(c.d_ent)},
		{"n_sensors", std::to_string(c.n_sensors)},
		{"psi", to_string(c.psi)},
		{"phi", to_string(c.phi)},
		{"sensor_nonlinearity", c.sensor_nonlinearity ? "1" : "0"},
		{"use_bias", c.use_bias ? "1" : "0"},
	};
	ckpt.matrices = {{"V", p.entity_map}, {"L", p.query_map}, {"A_in", p.sensor_in}, {"A_out", p.sensor_out}};
	if (c.use_bias) {
		ckpt.matrices.emplace_back("b_V", as_row(p.entity_bias));
		ckpt.matrices.emplace_back("b_L", as_row(p.query_bias));
		ckpt.matrices.emplace_back("b_in", as_row(p.sensor_bias));
		ckpt.matrices.emplace_back("b_out", as_row(p.score_bias));
	}
	return ckpt;
}

PopParams pop_params_from_checkpoint(const Checkpoint& ckpt) {
	auto size_meta = [&](const char* key) {
		auto v = parse_size(ckpt.meta_at(key));
		if (!v)
			throw ParseError(std::string("checkpoint meta '") + key + "' is not a count", 0);
		return *v;
	};
	PopConfig c;
	c.d_query = size_meta("d_query");
	c.d_cand = size_meta("d_cand");
	c.d_ent = size_meta("d_ent");
	c.n_sensors = size_meta("n_sensors");
	c.psi = parse_nonlinearity(ckpt.meta_at("psi"));
	c.phi = parse_nonlinearity(ckpt.meta_at("phi"));
	c.sensor_nonlinearity = ckpt.meta_at("sensor_nonlinearity") == "1";
	c.use_bias = ckpt.meta_at("use_bias") == "1";

	PopParams p = PopParams::zeros(c);
	auto take = [&](const char* name, std::span<double> dst) {
		const Matrix& m = ckpt.matrix(name);
		if (m.size() != dst.size())
			throw ParseError(std::string("checkpoint matrix '") + name + "' has the wrong shape", 0);
		std::copy(m.data().begin(), m.data().end(), dst.begin());
	};
	for (auto& [name, span] : p.blocks())
		take(name.c_str(), span);
	return p;
}

} // namespace pop
