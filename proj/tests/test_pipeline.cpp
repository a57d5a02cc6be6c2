#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "pop/datagen.hpp"
#include "pop/gradcheck.hpp"
#include "pop/pipeline_model.hpp"
#include "pop/train.hpp"

using namespace pop;

namespace {

PipelineParams identity_maps(std::size_t d) {
	PipelineParams p = PipelineParams::zeros(d, d, d);
	for (std::size_t i = 0; i < d; ++i)
		p.query_map(i, i) = p.candidate_map(i, i) = 1.0;
	return p;
}

Vector at_cosine(double c) {
	return {c, std::sqrt(1.0 - c * c)};
}

EncodedAct act_with(std::vector<Vector> cands, Gold gold) {
	return EncodedAct{"a", {1.0, 0.0}, std::move(cands), gold};
}

} // namespace

TEST(PipelineDecide, MicroSuite) {
	const Thresholds th{0.1, 0.05};
	EXPECT_EQ(decide(Vector{0.05, 0.08}, th), Prediction::protest());
	EXPECT_EQ(decide(Vector{0.90, 0.88}, th), Prediction::protest());
	EXPECT_EQ(decide(Vector{0.90, 0.30}, th), Prediction::point(0));
	EXPECT_EQ(decide(Vector{0.30}, Thresholds{0.1, 0.5}), Prediction::point(0));
}

TEST(PipelineDecide, MicroSuiteThroughMaps) {
	const PipelineParams p = identity_maps(2);
	const Thresholds th{0.1, 0.05};
	EXPECT_EQ(pipeline_predict(p, th, act_with({at_cosine(0.05), at_cosine(0.08)}, Gold::point(0))), Prediction::protest());
	EXPECT_EQ(pipeline_predict(p, th, act_with({at_cosine(0.90), at_cosine(0.88)}, Gold::point(0))), Prediction::protest());
	EXPECT_EQ(pipeline_predict(p, th, act_with({at_cosine(0.90), at_cosine(0.30)}, Gold::point(0))), Prediction::point(0));
	const Vector s = pipeline_similarities(p, act_with({at_cosine(0.9), {-3.0, 0.0}}, Gold::point(0)));
	EXPECT_NEAR(s[0], 0.9, 1e-15);
	EXPECT_NEAR(s[1], -1.0, 1e-15);
}

TEST(PipelineDecide, Monotonicity) {
	Rng rng(31);
	for (int trial = 0; trial < 2000; ++trial) {
		Vector sims(2 + rng.below(4));
		for (auto& s : sims) s = rng.uniform(-1, 1);
		const double m1 = rng.uniform(-1, 1), m2 = rng.uniform(m1, 1);
		const double d1 = rng.uniform(0, 0.5), d2 = rng.uniform(d1, 0.5);
		if (decide(sims, {m1, d1}).is_protest()) {
			EXPECT_TRUE(decide(sims, {m2, d1}).is_protest());
			EXPECT_TRUE(decide(sims, {m1, d2}).is_protest());
		}
	}
}

TEST(PipelineDecide, PermutationInvariant) {
	Rng rng(32);
	for (int trial = 0; trial < 500; ++trial) {
		Vector sims(2 + rng.below(4));
		for (auto& s : sims) s = rng.uniform(-1, 1);
		Vector perm = sims;
		rng.shuffle(std::span<double>(perm));
		const Thresholds th{rng.uniform(-1, 1), rng.uniform(0, 0.3)};
		const Prediction a = decide(sims, th), b = decide(perm, th);
		ASSERT_EQ(a.is_protest(), b.is_protest());
		if (a.is_point()) {
			EXPECT_EQ(sims[a.index()], perm[b.index()]);
		}
	}
}

TEST(PipelinePairs, Counts) {
	Rng rng(1);
	std::vector<EncodedAct> acts;
	acts.push_back(act_with(std::vector<Vector>(5, Vector{1, 0}), Gold::point(2)));
	acts.push_back(act_with(std::vector<Vector>(4, Vector{1, 0}), Gold::anomaly(AnomalyKind::miss)));
	acts.push_back(act_with(std::vector<Vector>(3, Vector{1, 0}), Gold::anomaly(AnomalyKind::mult)));
	acts.push_back(act_with({Vector{0, 1}, Vector{1, 1}}, Gold::point(1)));
	EXPECT_EQ(extract_pairs(std::span<const EncodedAct>(acts.data(), 1)).size(), 4u);
	EXPECT_TRUE(extract_pairs(std::span<const EncodedAct>(acts.data() + 1, 2)).empty());
	const auto last = extract_pairs(std::span<const EncodedAct>(acts.data() + 3, 1));
	ASSERT_EQ(last.size(), 1u);
	EXPECT_EQ(last[0].positive, (Vector{1, 1}));
	EXPECT_EQ(last[0].negative, (Vector{0, 1}));
	EXPECT_EQ(extract_pairs_corpus(acts, rng).size(), 5u);
}

TEST(PipelineHinge, Examples) {
	const PipelineParams p = identity_maps(2);
	EXPECT_EQ(hinge_loss({{1, 0}, at_cosine(0.9), at_cosine(0.3)}, p, 0.5), 0.0);
	EXPECT_NEAR(hinge_loss({{1, 0}, at_cosine(0.4), at_cosine(0.3)}, p, 0.5), 0.4, 1e-15);
	EXPECT_EQ(hinge_loss({{1, 0}, at_cosine(0.7), at_cosine(0.7)}, p, 0.5), 0.5);
	const PipelineGradients g = hinge_gradient({{1, 0}, at_cosine(0.9), at_cosine(0.3)}, p, 0.5);
	for (double x : g.query_map.data())
		EXPECT_EQ(x, 0.0);
}

TEST(PipelineHinge, NonNegative) {
	Rng rng(2);
	for (int t = 0; t < 300; ++t) {
		PipelineParams p = init_pipeline_params(3, 2, 2, rng);
		Triple tr{{rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}};
		EXPECT_GE(hinge_loss(tr, p, rng.uniform(0, 2)), 0.0);
	}
}

TEST(PipelineHinge, GradientMatchesFiniteDifferences) {
	Rng rng(3);
	const GradcheckReport r = gradcheck_pipeline(10, rng);
	EXPECT_EQ(r.trials.size(), 10u);
	EXPECT_LT(r.max_rel_error(), 1e-4);
}

TEST(PipelineTune, NoAnomaliesNeverProtests) {
	Rng rng(4);
	const PipelineParams p = init_pipeline_params(4, 2, 2, rng);
	std::vector<EncodedAct> val;
	for (int i = 0; i < 50; ++i)
		val.push_back(act_with({{rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}}, Gold::point(i % 2)));
	EXPECT_EQ(tune_thresholds(p, val), (Thresholds{-1.0, 0.0}));
}

TEST(PipelineTune, GridShape) {
	const auto m = miss_grid(), d = diff_grid();
	EXPECT_EQ(m.size(), 41u);
	EXPECT_EQ(d.size(), 51u);
	EXPECT_EQ(m.front(), -1.0);
	EXPECT_EQ(m.back(), 1.0);
	EXPECT_EQ(d.back(), 0.5);
	for (double tuned : {0.1, 0.4})
		EXPECT_NE(std::find_if(m.begin(), m.end(), [&](double x) { return std::abs(x - tuned) < 1e-12; }), m.end());
	for (double tuned : {0.05, 0.07})
		EXPECT_NE(std::find_if(d.begin(), d.end(), [&](double x) { return std::abs(x - tuned) < 1e-12; }), d.end());
}

TEST(PipelineTrain, ZeroEpochsAndLearning) {
	WorldConfig wc;
	wc.classes = 40;
	wc.images_per_class = 5;
	wc.attributes = 20;
	const SyntheticWorld w = build_synthetic_world(wc);
	DatasetSpec s;
	const auto acts = encode_all(gen_object_only(w, s, "train", 1500), w);
	const auto triples = extract_pairs(acts);
	Rng rng(5);
	PipelineParams p = init_pipeline_params(50, wc.d_word, wc.d_img, rng);
	const PipelineParams start = p;
	TrainConfig tc;
	tc.epochs = 0;
	train_pipeline(p, triples, tc, 0.5);
	EXPECT_EQ(p, start);

	auto mean_hinge = [&](const PipelineParams& q) {
		double sum = 0.0;
		for (const auto& t : triples)
			sum += hinge_loss(t, q, 0.5);
		return sum / static_cast<double>(triples.size());
	};
	tc.epochs = 10;
	const double before = mean_hinge(p);
	train_pipeline(p, triples, tc, 0.5);
	EXPECT_LT(mean_hinge(p), 0.05 * before);
	EXPECT_TRUE(p.all_finite());

	const Thresholds th{0.3, 0.07};
	const PipelineParams back = pipeline_params_from_checkpoint(parse_checkpoint(serialize_checkpoint(to_checkpoint(p, th, 0.5))));
	EXPECT_EQ(back, p);
	EXPECT_EQ(thresholds_from_checkpoint(to_checkpoint(p, th, 0.5)), th);
}
