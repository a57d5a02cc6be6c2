#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>

#include "pop/error.hpp"
#include "pop/experiment.hpp"
#include "pop/text_io.hpp"

using namespace pop;

namespace {

Manifest tiny_manifest(ModelKind model) {
	KeyValues kv = KeyValues::parse(
			"task = object-only\n"
			"world.classes = 30\n"
			"world.images_per_class = 4\n"
			"world.attributes = 15\n"
			"data.train = 300\n"
			"data.val = 60\n"
			"data.test = 100\n"
			"train.epochs = 2\n"
			"pop.d_ent = 20\n"
			"pop.n_sensors = 8\n"
			"pipeline.d_shared = 20\n");
	kv.set("model", to_string(model));
	return manifest_from_kv(kv);
}

} // namespace

TEST(Metrics, SevenOfTen) {
	Metrics m;
	for (int i = 0; i < 7; ++i)
		m.add(Gold::point(0), Prediction::point(0));
	for (int i = 0; i < 3; ++i)
		m.add(Gold::point(0), Prediction::point(1));
	EXPECT_EQ(m.total(), 70.0);
}

TEST(Metrics, AnomalyPointedIsWrong) {
	Metrics m;
	m.add(Gold::anomaly(AnomalyKind::miss), Prediction::point(0));
	EXPECT_EQ(m.count[1], 1u);
	EXPECT_EQ(m.missref(), 0.0);
	EXPECT_EQ(m.confusion[1][static_cast<std::size_t>(PredictedOutcome::wrong_point)], 1u);
	EXPECT_TRUE(is_correct(Gold::anomaly(AnomalyKind::mult), Prediction::protest()));
	EXPECT_FALSE(is_correct(Gold::point(1), Prediction::protest()));
	EXPECT_EQ(Metrics{}.total(), 0.0);
}

TEST(Metrics, WeightedIdentityAndOrderInvariance) {
	Rng rng(5);
	std::vector<Gold> golds;
	std::vector<Prediction> preds;
	for (int i = 0; i < 997; ++i) {
		const auto k = rng.below(3);
		golds.push_back(k == 0 ? Gold::point(rng.below(3)) : Gold::anomaly(k == 1 ? AnomalyKind::miss : AnomalyKind::mult));
		const auto p = rng.below(4);
		preds.push_back(p == 3 ? Prediction::protest() : Prediction::point(p));
	}
	const Metrics m = score(golds, preds);
	const double lhs = m.total() * static_cast<double>(m.n());
	const double rhs = m.pointing() * m.count[0] + m.missref() * m.count[1] + m.multref() * m.count[2];
	EXPECT_NEAR(lhs, rhs, 1e-9);

	std::vector<std::size_t> order(golds.size());
	for (std::size_t i = 0; i < order.size(); ++i)
		order[i] = i;
	rng.shuffle(std::span<std::size_t>(order));
	std::vector<Gold> g2;
	std::vector<Prediction> p2;
	for (auto i : order) {
		g2.push_back(golds[i]);
		p2.push_back(preds[i]);
	}
	EXPECT_EQ(score(g2, p2), m);
	EXPECT_THROW(score(golds, std::span<const Prediction>(preds).first(3)), ContractError);
}

TEST(KeyValues, ParseAndErrors) {
	const KeyValues kv = KeyValues::parse("# comment\n a = 1 \n\nb=two words\n");
	EXPECT_EQ(kv.get_string("b"), "two words");
	EXPECT_EQ(kv.get_size("a"), 1u);
	EXPECT_THROW(KeyValues::parse("a = 1\na = 2\n"), ParseError);
	EXPECT_THROW(KeyValues::parse("novalue\n"), ParseError);
	const KeyValues bad = KeyValues::parse("x = abc\n");
	EXPECT_THROW(bad.get_double("x"), ConfigError);
	EXPECT_THROW(bad.get_bool("x"), ConfigError);
}

TEST(Manifest, RoundTripAndUnknownKeys) {
	const Manifest m = tiny_manifest(ModelKind::trpop);
	const KeyValues kv = manifest_to_kv(m);
	EXPECT_EQ(manifest_to_kv(manifest_from_kv(KeyValues::parse(kv.serialize()))).serialize(), kv.serialize());
	EXPECT_THROW(manifest_from_kv(KeyValues::parse("trian.epochs = 3\n")), ConfigError);
	EXPECT_THROW(manifest_from_kv(KeyValues::parse("model = lstm\n")), ConfigError);
	EXPECT_THROW(manifest_from_kv(KeyValues::parse("data.p_miss = 0.9\n")), ConfigError);
}

TEST(Manifest, PopAndTrpopDifferInEncodingAndEpochs) {
	Manifest pop = manifest_from_kv(KeyValues::parse("model = pop\n"));
	Manifest tr = manifest_from_kv(KeyValues::parse("model = trpop\n"));
	EXPECT_EQ(effective_epochs(pop), 14u);
	EXPECT_EQ(effective_epochs(tr), 36u);
	EXPECT_EQ(effective_encoding(pop).mode, EncodingMode::dense);
	EXPECT_EQ(effective_encoding(tr).mode, EncodingMode::one_hot);
	auto a = manifest_to_kv(pop).values(), b = manifest_to_kv(tr).values();
	a.erase("model");
	b.erase("model");
	EXPECT_EQ(a, b);
}

TEST(Experiment, ReproducibleReports) {
	for (ModelKind kind : {ModelKind::pop, ModelKind::pipeline, ModelKind::probability}) {
		const Manifest m = tiny_manifest(kind);
		const ExperimentResult a = run_experiment(m), b = run_experiment(m);
		ASSERT_TRUE(a.ok) << a.report.dump();
		EXPECT_EQ(a.report.dump(2), b.report.dump(2));
		EXPECT_TRUE(a.report.contains("dataset_stats"));
		EXPECT_TRUE(a.report["metrics"].contains("total"));
	}
}

TEST(Experiment, FailureNamesStage) {
	Manifest m = tiny_manifest(ModelKind::attr_random);
	const ExperimentResult r = run_experiment(m);
	EXPECT_FALSE(r.ok);
	EXPECT_EQ(r.report["status"], "failed");
	EXPECT_EQ(r.report["failed_stage"], "evaluate");

	m = tiny_manifest(ModelKind::pop);
	m.world.attrs_per_object = 40;
	EXPECT_EQ(run_experiment(m).report["failed_stage"], "world");
}

TEST(Experiment, WritesBundle) {
	const ExperimentResult r = run_experiment(tiny_manifest(ModelKind::pipeline));
	const auto dir = std::filesystem::temp_directory_path() / "pop_bundle_test";
	write_experiment(r, dir, 1.5);
	for (const char* f : {"report.json", "report.txt", "checkpoint.ckpt", "timing.json"})
		EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
	const Checkpoint ck = load_checkpoint(dir / "checkpoint.ckpt");
	EXPECT_EQ(ck.kind, "pipeline");
	EXPECT_EQ(read_file(dir / "report.json"), r.report.dump(2) + "\n");
	std::filesystem::remove_all(dir);
}

TEST(Experiment, ImgShuffleRecordsSeed) {
	KeyValues kv = manifest_to_kv(tiny_manifest(ModelKind::imgshuffle));
	kv.set("task", "object-attr");
	kv.set("imgshuffle.seed", "77");
	const ExperimentResult r = run_experiment(manifest_from_kv(kv));
	ASSERT_TRUE(r.ok) << r.report.dump();
	EXPECT_EQ(r.report["imgshuffle_seed"], 77);
}
