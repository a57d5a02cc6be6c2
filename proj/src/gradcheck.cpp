#include "pop/gradcheck.hpp"

#include <algorithm>

namespace pop {

double GradcheckReport::max_rel_error() const {
	double worst = 0.0;
	for (const auto& t : trials)
		worst = std::max(worst, t.max_rel_error);
	return worst;
}

namespace {

Vector flatten(const PopParams& p) {
	Vector out;
	for (const auto& [name, block] : p.blocks())
		out.insert(out.end(), block.begin(), block.end());
	return out;
}

void unflatten(PopParams& p, std::span<const double> flat) {
	std::size_t off = 0;
	for (auto& [name, block] : p.blocks()) {
		std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
				flat.begin() + static_cast<std::ptrdiff_t>(off + block.size()), block.begin());
		off += block.size();
	}
}

double max_error(std::span<const double> analytic, std::span<const double> numeric) {
	double worst = 0.0;
	for (std::size_t i = 0; i < analytic.size(); ++i)
		worst = std::max(worst, relative_error(analytic[i], numeric[i]));
	return worst;
}

Vector random_vector(Rng& rng, std::size_t n) {
	Vector v(n);
	for (double& x : v)
		x = rng.uniform(-1.0, 1.0);
	return v;
}

} // namespace

double check_pop_gradient(const PopParams& params, const EncodedAct& act, double h) {
	const ForwardTrace trace = forward(params, act);
	const Vector analytic = flatten(backward(params, act, trace, act.gold));
	PopParams probe = params;
	const Vector numeric = finite_diff_grad([&](std::span<const double> x) {
		unflatten(probe, x);
		return loss(forward(probe, act), act.gold);
	}, flatten(params), h);
	return max_error(analytic, numeric);
}

double check_pipeline_gradient(const PipelineParams& params, const Triple& triple, double margin, double h) {
	const PipelineGradients g = hinge_gradient(triple, params, margin);
	Vector analytic(g.query_map.data().begin(), g.query_map.data().end());
	analytic.insert(analytic.end(), g.candidate_map.data().begin(), g.candidate_map.data().end());

	Vector flat(params.query_map.data().begin(), params.query_map.data().end());
	flat.insert(flat.end(), params.candidate_map.data().begin(), params.candidate_map.data().end());
	PipelineParams probe = params;
	const std::size_t nq = params.query_map.size();
	const Vector numeric = finite_diff_grad([&](std::span<const double> x) {
		std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nq), probe.query_map.data().begin());
		std::copy(x.begin() + static_cast<std::ptrdiff_t>(nq), x.end(), probe.candidate_map.data().begin());
		return hinge_loss(triple, probe, margin);
	}, flat, h);
	return max_error(analytic, numeric);
}

GradcheckReport gradcheck_pop(std::size_t trials, Rng& rng, double h) {
	GradcheckReport report;
	for (std::size_t t = 0; t < trials; ++t) {
		PopConfig c;
		c.d_query = 2 + rng.below(3);
		c.d_cand = 2 + rng.below(3);
		c.d_ent = 4;
		c.n_sensors = 3;
		c.use_bias = t % 4 == 3;
		c.sensor_nonlinearity = t % 5 != 4;
		PopParams p = PopParams::zeros(c);
		for (auto& [name, block] : p.blocks())
			for (double& x : block)
				x = rng.uniform(-1.0, 1.0);

		const std::size_t n = 2 + t % 4;
		EncodedAct act;
		act.id = "gradcheck-" + std::to_string(t);
		act.query = random_vector(rng, c.d_query);
		for (std::size_t k = 0; k < n; ++k)
			act.candidates.push_back(random_vector(rng, c.d_cand));
		switch (t % 3) {
		case 0: act.gold = Gold::point(rng.below(n)); break;
		case 1: act.gold = Gold::anomaly(AnomalyKind::miss); break;
		default: act.gold = Gold::anomaly(AnomalyKind::mult); break;
		}
		const std::string gold = act.gold.is_point() ? "point(" + std::to_string(act.gold.index()) + ")"
				: act.gold.anomaly_kind() == AnomalyKind::miss ? "miss" : "mult";
		report.trials.push_back(GradcheckTrial{
			"pop n=" + std::to_string(n) + " gold=" + gold + (c.use_bias ? " bias" : "") +
					(c.sensor_nonlinearity ? "" : " linear-sensors"),
			check_pop_gradient(p, act, h), p.parameter_count()});
	}
	return report;
}

GradcheckReport gradcheck_pipeline(std::size_t trials, Rng& rng, double h) {
	GradcheckReport report;
	for (std::size_t t = 0; t < trials; ++t) {
		const std::size_t d_shared = 3 + rng.below(3);
		const std::size_t dq = 2 + rng.below(3);
		const std::size_t dc = 2 + rng.below(3);
		PipelineParams p = PipelineParams::zeros(d_shared, dq, dc);
		for (Matrix* m : {&p.query_map, &p.candidate_map})
			for (double& x : m->data())
				x = rng.uniform(-1.0, 1.0);
		const Triple triple{random_vector(rng, dq), random_vector(rng, dc), random_vector(rng, dc)};
		const double margin = rng.uniform(0.5, 2.5);
		report.trials.push_back(GradcheckTrial{
			"pipeline margin=" + std::to_string(margin), check_pipeline_gradient(p, triple, margin, h),
			p.query_map.size() + p.candidate_map.size()});
	}
	return report;
}

} // namespace pop
