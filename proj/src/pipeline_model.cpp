#include "pop/pipeline_model.hpp"

#include <cmath>

#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

PipelineParams PipelineParams::zeros(std::size_t d_shared, std::size_t d_query, std::size_t d_cand) {
	if (d_shared < 1 || d_query < 1 || d_cand < 1)
		throw ConfigError("pipeline dimensions must all be at least 1");
	return PipelineParams{Matrix(d_shared, d_query), Matrix(d_shared, d_cand)};
}

PipelineParams init_pipeline_params(std::size_t d_shared, std::size_t d_query, std::size_t d_cand, Rng& rng) {
	PipelineParams p = PipelineParams::zeros(d_shared, d_query, d_cand);
	for (Matrix* m : {&p.query_map, &p.candidate_map}) {
		const double a = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
		for (double& x : m->data())
			x = rng.uniform(-a, a);
	}
	return p;
}

std::vector<Triple> extract_pairs(std::span<const EncodedAct> acts) {
	std::vector<Triple> out;
	for (const auto& act : acts) {
		if (!act.gold.is_point())
			continue;
		const std::size_t gold = act.gold.index();
		for (std::size_t k = 0; k < act.candidates.size(); ++k)
			if (k != gold)
				out.push_back(Triple{act.query, act.candidates[gold], act.candidates[k]});
	}
	return out;
}

std::vector<Triple> extract_pairs_corpus(std::span<const EncodedAct> acts, Rng& rng) {
	std::vector<Triple> out;
	if (acts.size() < 2)
		return out;
	for (std::size_t a = 0; a < acts.size(); ++a) {
		const auto& act = acts[a];
		if (!act.gold.is_point())
			continue;
		const std::size_t gold = act.gold.index();
		for (std::size_t k = 0; k + 1 < act.candidates.size(); ++k) {
			std::size_t other;
			do {
				other = rng.below(acts.size());
			} while (other == a);
			const auto& pool = acts[other].candidates;
			out.push_back(Triple{act.query, act.candidates[gold], pool[rng.below(pool.size())]});
		}
	}
	return out;
}

namespace {

struct Mapped {
	Vector q, p, n;
	double cos_pos, cos_neg;
};

Mapped map_triple(const Triple& t, const PipelineParams& params) {
	Mapped m{matvec(params.query_map, t.query), matvec(params.candidate_map, t.positive),
			matvec(params.candidate_map, t.negative), 0.0, 0.0};
	m.cos_pos = cosine(m.q, m.p);
	m.cos_neg = cosine(m.q, m.n);
	return m;
}

/// d cos(a, b) / d a, zero when either norm vanishes (cosine is defined as 0 there).
Vector cosine_grad(std::span<const double> a, std::span<const double> b) {
	const double na = norm(a);
	const double nb = norm(b);
	Vector g(a.size(), 0.0);
	if (na == 0.0 || nb == 0.0)
		return g;
	const double c = dot(a, b) / (na * nb);
	for (std::size_t i = 0; i < a.size(); ++i)
		g[i] = b[i] / (na * nb) - c * a[i] / (na * na);
	return g;
}

} // namespace

double hinge_loss(const Triple& t, const PipelineParams& params, double margin) {
	if (!(margin > 0.0))
		throw ContractError("hinge_loss: margin must be positive");
	const Mapped m = map_triple(t, params);
	return std::max(0.0, margin - m.cos_pos + m.cos_neg);
}

PipelineGradients hinge_gradient(const Triple& t, const PipelineParams& params, double margin) {
	PipelineGradients g{Matrix(params.query_map.rows(), params.query_map.cols()),
			Matrix(params.candidate_map.rows(), params.candidate_map.cols())};
	const Mapped m = map_triple(t, params);
	if (margin - m.cos_pos + m.cos_neg <= 0.0)
		return g;
	// loss = margin - cos(q, p) + cos(q, n)
	Vector d_q = cosine_grad(m.q, m.n);
	axpy(-1.0, cosine_grad(m.q, m.p), d_q);
	const Vector d_p = cosine_grad(m.p, m.q);
	const Vector d_n = cosine_grad(m.n, m.q);
	add_outer(g.query_map, 1.0, d_q, t.query);
	add_outer(g.candidate_map, -1.0, d_p, t.positive);
	add_outer(g.candidate_map, 1.0, d_n, t.negative);
	return g;
}

Vector pipeline_similarities(const PipelineParams& params, const EncodedAct& act) {
	const Vector q = matvec(params.query_map, act.query);
	Vector sims;
	sims.reserve(act.candidates.size());
	for (const auto& cand : act.candidates)
		sims.push_back(cosine(q, matvec(params.candidate_map, cand)));
	return sims;
}

Prediction decide(std::span<const double> sims, const Thresholds& th) {
	if (sims.empty())
		throw ContractError("pipeline_predict: act has no candidates");
	const std::size_t best = argmax(sims);
	if (sims[best] < th.miss)
		return Prediction::protest();
	if (sims.size() >= 2) {
		double second = -INFINITY;
		for (std::size_t k = 0; k < sims.size(); ++k)
			if (k != best)
				second = std::max(second, sims[k]);
		if (sims[best] - second < th.diff)
			return Prediction::protest();
	}
	return Prediction::point(best);
}

Prediction pipeline_predict(const PipelineParams& params, const Thresholds& thresholds, const EncodedAct& act) {
	return decide(pipeline_similarities(params, act), thresholds);
}

std::vector<double> miss_grid() {
	std::vector<double> g;
	for (int i = -20; i <= 20; ++i)
		g.push_back(static_cast<double>(i * 5) / 100.0);
	return g;
}

std::vector<double> diff_grid() {
	std::vector<double> g;
	for (int i = 0; i <= 50; ++i)
		g.push_back(static_cast<double>(i) / 100.0);
	return g;
}

Thresholds tune_thresholds(const PipelineParams& params, std::span<const EncodedAct> validation) {
	std::vector<Vector> sims;
	sims.reserve(validation.size());
	for (const auto& act : validation)
		sims.push_back(pipeline_similarities(params, act));

	Thresholds best{miss_grid().front(), diff_grid().front()};
	std::size_t best_correct = 0;
	bool first = true;
	// Grids ascend, so a strict improvement test keeps the smallest thresholds on ties.
	for (double miss : miss_grid()) {
		for (double diff : diff_grid()) {
			const Thresholds th{miss, diff};
			std::size_t correct = 0;
			for (std::size_t i = 0; i < validation.size(); ++i) {
				const Prediction p = decide(sims[i], th);
				const Gold& g = validation[i].gold;
				correct += g.is_point() ? (p.is_point() && p.index() == g.index()) : p.is_protest();
			}
			if (first || correct > best_correct) {
				best = th;
				best_correct = correct;
				first = false;
			}
		}
	}
	return best;
}

Checkpoint to_checkpoint(const PipelineParams& params, const Thresholds& thresholds, double margin) {
	Checkpoint ckpt;
	ckpt.kind = "pipeline";
	ckpt.meta = {
		{"d_shared", std::to_string(params.d_shared())},
		{"margin", format_double(margin)},
		{"theta_miss", format_double(thresholds.miss)},
		{"theta_diff", format_double(thresholds.diff)},
	};
	ckpt.matrices = {{"M_q", params.query_map}, {"M_o", params.candidate_map}};
	return ckpt;
}

PipelineParams pipeline_params_from_checkpoint(const Checkpoint& ckpt) {
	if (ckpt.kind != "pipeline")
		throw ParseError("checkpoint kind '" + ckpt.kind + "' is not a pipeline", 0);
	PipelineParams p{ckpt.matrix("M_q"), ckpt.matrix("M_o")};
	if (p.query_map.rows() != p.candidate_map.rows())
		throw ParseError("pipeline maps disagree on the shared dimension", 0);
	return p;
}

Thresholds thresholds_from_checkpoint(const Checkpoint& ckpt) {
	auto get = [&](const char* key) {
		auto v = parse_double(ckpt.meta_at(key));
		if (!v)
			throw ParseError(std::string("checkpoint meta '") + key + "' is not a number", 0);
		return *v;
	};
	return Thresholds{get("theta_miss"), get("theta_diff")};
}

} // namespace pop
