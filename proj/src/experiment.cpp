#include "pop/experiment.hpp"

#include <chrono>
#include <ctime>

#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

namespace {

struct Named {
	ModelKind kind;
	const char* name;
};

constexpr Named model_names[] = {
	{ModelKind::pop, "pop"},
	{ModelKind::trpop, "trpop"},
	{ModelKind::pipeline, "pipeline"},
	{ModelKind::random, "random"},
	{ModelKind::majority, "majority"},
	{ModelKind::probability, "probability"},
	{ModelKind::cnn, "cnn"},
	{ModelKind::attr_random, "attr-random"},
	{ModelKind::imgshuffle, "imgshuffle"},
};

} // namespace

std::string to_string(ModelKind kind) {
	for (const auto& n : model_names)
		if (n.kind == kind)
			return n.name;
	return "?";
}

ModelKind parse_model_kind(const std::string& name) {
	for (const auto& n : model_names)
		if (name == n.name)
			return n.kind;
	throw ConfigError("unknown model '" + name + "'");
}

bool is_trainable(ModelKind kind) {
	return kind == ModelKind::pop || kind == ModelKind::trpop || kind == ModelKind::pipeline ||
			kind == ModelKind::imgshuffle;
}

Manifest manifest_from_kv(const KeyValues& kv) {
	Manifest m;
	if (auto v = kv.get_string("task"))
		m.task = parse_task(*v);
	if (auto v = kv.get_string("model"))
		m.model = parse_model_kind(*v);

	kv.read("world.classes", m.world.classes);
	kv.read("world.images_per_class", m.world.images_per_class);
	kv.read("world.attributes", m.world.attributes);
	kv.read("world.attrs_per_object", m.world.attrs_per_object);
	kv.read("world.d_img", m.world.d_img);
	kv.read("world.d_word", m.world.d_word);
	kv.read("world.sigma", m.world.sigma);
	kv.read("world.sigma_word", m.world.sigma_word);
	if (auto v = kv.get_u64("world.seed"))
		m.world.seed = *v;
	if (auto v = kv.get_string("world.dir"))
		m.world_dir = *v;

	kv.read("data.min_len", m.data.min_len);
	kv.read("data.max_len", m.data.max_len);
	kv.read("data.p_miss", m.data.p_miss);
	kv.read("data.p_mult", m.data.p_mult);
	kv.read("data.train", m.data.train);
	kv.read("data.val", m.data.val);
	kv.read("data.test", m.data.test);
	if (auto v = kv.get_u64("data.seed"))
		m.data.seed = *v;

	kv.read("train.lr0", m.train.lr0);
	kv.read("train.momentum", m.train.momentum);
	kv.read("train.decay", m.train.decay);
	if (auto v = kv.get_size("train.epochs")) {
		m.train.epochs = *v;
		m.epochs_set = true;
	}
	if (auto v = kv.get_u64("train.seed"))
		m.train.seed = *v;
	kv.read("train.shuffle", m.train.shuffle);

	kv.read("pop.d_ent", m.pop.d_ent);
	kv.read("pop.n_sensors", m.pop.n_sensors);
	if (auto v = kv.get_string("pop.psi"))
		m.pop.psi = parse_nonlinearity(*v);
	if (auto v = kv.get_string("pop.phi"))
		m.pop.phi = parse_nonlinearity(*v);
	kv.read("pop.sensor_nonlinearity", m.pop.sensor_nonlinearity);
	kv.read("pop.use_bias", m.pop.use_bias);

	kv.read("pipeline.d_shared", m.d_shared);
	kv.read("pipeline.margin", m.margin);
	kv.read("pipeline.corpus_negatives", m.corpus_negatives);

	if (auto v = kv.get_u64("baseline.seed"))
		m.baseline_seed = *v;
	kv.read("cnn.p_true", m.p_true);
	if (auto v = kv.get_u64("imgshuffle.seed"))
		m.shuffle_seed = *v;

	kv.read("encode.normalize_blocks", m.encode.normalize_blocks);
	kv.read("encode.allow_unknown", m.encode.allow_unknown);
	kv.read("encode.drop_attributes", m.encode.drop_attributes);

	kv.require_all_used();
	validate_spec(m.data);
	validate_train_config(m.train);
	return m;
}

KeyValues manifest_to_kv(const Manifest& m) {
	KeyValues kv;
	auto b = [](bool x) { return std::string(x ? "true" : "false"); };
	kv.set("task", to_string(m.task));
	kv.set("model", to_string(m.model));
	kv.set("world.classes", std::to_string(m.world.classes));
	kv.set("world.images_per_class", std::to_string(m.world.images_per_class));
	kv.set("world.attributes", std::to_string(m.world.attributes));
	kv.set("world.attrs_per_object", std::to_string(m.world.attrs_per_object));
	kv.set("world.d_img", std::to_string(m.world.d_img));
	kv.set("world.d_word", std::to_string(m.world.d_word));
	kv.set("world.sigma", format_double(m.world.sigma));
	kv.set("world.sigma_word", format_double(m.world.sigma_word));
	kv.set("world.seed", std::to_string(m.world.seed));
	if (m.world_dir)
		kv.set("world.dir", m.world_dir->string());
	kv.set("data.min_len", std::to_string(m.data.min_len));
	kv.set("data.max_len", std::to_string(m.data.max_len));
	kv.set("data.p_miss", format_double(m.data.p_miss));
	kv.set("data.p_mult", format_double(m.data.p_mult));
	kv.set("data.train", std::to_string(m.data.train));
	kv.set("data.val", std::to_string(m.data.val));
	kv.set("data.test", std::to_string(m.data.test));
	kv.set("data.seed", std::to_string(m.data.seed));
	kv.set("train.lr0", format_double(m.train.lr0));
	kv.set("train.momentum", format_double(m.train.momentum));
	kv.set("train.decay", format_double(m.train.decay));
	if (m.epochs_set)
		kv.set("train.epochs", std::to_string(m.train.epochs));
	kv.set("train.seed", std::to_string(m.train.seed));
	kv.set("train.shuffle", b(m.train.shuffle));
	kv.set("pop.d_ent", std::to_string(m.pop.d_ent));
	kv.set("pop.n_sensors", std::to_string(m.pop.n_sensors));
	kv.set("pop.psi", to_string(m.pop.psi));
	kv.set("pop.phi", to_string(m.pop.phi));
	kv.set("pop.sensor_nonlinearity", b(m.pop.sensor_nonlinearity));
	kv.set("pop.use_bias", b(m.pop.use_bias));
	kv.set("pipeline.d_shared", std::to_string(m.d_shared));
	kv.set("pipeline.margin", format_double(m.margin));
	kv.set("pipeline.corpus_negatives", b(m.corpus_negatives));
	kv.set("baseline.seed", std::to_string(m.baseline_seed));
	kv.set("cnn.p_true", format_double(m.p_true));
	kv.set("imgshuffle.seed", std::to_string(m.shuffle_seed));
	kv.set("encode.normalize_blocks", b(m.encode.normalize_blocks));
	kv.set("encode.allow_unknown", b(m.encode.allow_unknown));
	kv.set("encode.drop_attributes", b(m.encode.drop_attributes));
	return kv;
}

std::size_t effective_epochs(const Manifest& m) {
	if (m.epochs_set)
		return m.train.epochs;
	return m.model == ModelKind::trpop ? 36 : 14;
}

EncodeOptions effective_encoding(const Manifest& m) {
	EncodeOptions o = m.encode;
	o.mode = m.model == ModelKind::trpop ? EncodingMode::one_hot : EncodingMode::dense;
	return o;
}

SyntheticWorld make_world(const Manifest& m) {
	return m.world_dir ? load_world(*m.world_dir) : build_synthetic_world(m.world);
}

TrainedPop fit_pop(const Manifest& m, std::span<const EncodedAct> train, std::span<const EncodedAct> val) {
	if (train.empty())
		throw ContractError("no training acts");
	PopConfig config = m.pop;
	config.d_query = train.front().query.size();
	config.d_cand = train.front().candidates.front().size();
	Rng rng(derive_seed(m.train.seed, "init"));
	TrainedPop out{init_params(config, rng), {}};
	TrainConfig tc = m.train;
	tc.epochs = effective_epochs(m);
	out.log = train_pop(out.params, train, tc, val);
	return out;
}

TrainedPipeline fit_pipeline(const Manifest& m, std::span<const EncodedAct> train, std::span<const EncodedAct> val) {
	if (train.empty())
		throw ContractError("no training acts");
	Rng rng(derive_seed(m.train.seed, "init"));
	TrainedPipeline out{init_pipeline_params(m.d_shared, train.front().query.size(),
			train.front().candidates.front().size(), rng), {}, {}};
	Rng pair_rng(derive_seed(m.train.seed, "pairs"));
	const auto triples = m.corpus_negatives ? extract_pairs_corpus(train, pair_rng) : extract_pairs(train);
	TrainConfig tc = m.train;
	tc.epochs = effective_epochs(m);
	out.log = train_pipeline(out.params, triples, tc, m.margin);
	out.thresholds = tune_thresholds(out.params, val);
	return out;
}

Metrics evaluate_baseline(ModelKind kind, std::span<const ReferenceAct> test, std::span<const ReferenceAct> train,
		const SyntheticWorld& world, std::uint64_t seed, std::size_t max_len, double p_true) {
	auto act_rng = [seed](const ReferenceAct& act) { return Rng(derive_seed(seed, act.id)); };
	switch (kind) {
	case ModelKind::random:
		return evaluate(test, [&](const ReferenceAct& a) {
			Rng rng = act_rng(a);
			return random_predict(a, rng, max_len);
		});
	case ModelKind::majority:
		return evaluate(test, [](const ReferenceAct& a) { return majority_predict(a); });
	case ModelKind::probability: {
		const auto dist = LabelDistribution::estimate(train, max_len);
		return evaluate(test, [&](const ReferenceAct& a) {
			Rng rng = act_rng(a);
			return probability_predict(a, dist, rng);
		});
	}
	case ModelKind::cnn: {
		const SyntheticLabeler labeler(world.objects, p_true, seed);
		return evaluate(test, [&](const ReferenceAct& a) { return cnn_predict(a, labeler); });
	}
	case ModelKind::attr_random:
		return evaluate(test, [&](const ReferenceAct& a) {
			Rng rng = act_rng(a);
			return attr_random_predict(a, rng);
		});
	default:
		throw ContractError("model '" + to_string(kind) + "' is not a non-learned baseline");
	}
}

ImgShuffleResult run_imgshuffle(const Manifest& m, const SyntheticWorld& world, const Splits& splits) {
	const ShuffledWorld shuffled = shuffle_images(world, m.shuffle_seed);
	EncodeOptions enc = m.encode;
	enc.mode = EncodingMode::dense;
	const auto train = encode_all(splits.train, shuffled.world, enc);
	const auto test = encode_all(splits.test, shuffled.world, enc);
	Manifest pm = m;
	pm.model = ModelKind::pop;
	auto fitted = fit_pop(pm, train);
	ImgShuffleResult out;
	out.metrics = evaluate(std::span<const EncodedAct>(test),
			[&](const EncodedAct& a) { return predict(fitted.params, a); });
	out.shuffle_seed = shuffled.seed;
	out.log = std::move(fitted.log);
	return out;
}

nlohmann::json to_json(const DatasetStats& stats) {
	auto row = [](const FrequencyRow& r) {
		nlohmann::json j;
		j["O"] = r.object;
		j["O+I"] = r.object_image;
		j["O+A"] = r.object_attribute ? nlohmann::json(*r.object_attribute) : nlohmann::json(nullptr);
		j["O+A+I"] = r.object_attribute_image ? nlohmann::json(*r.object_attribute_image) : nlohmann::json(nullptr);
		return j;
	};
	nlohmann::json j;
	j["acts"] = stats.acts;
	j["items"] = stats.items;
	j["train_avg_frequency"] = row(stats.train);
	if (stats.test)
		j["test_avg_frequency"] = row(*stats.test);
	if (stats.unseen_percent)
		j["unseen_in_test_percent"] = row(*stats.unseen_percent);
	return j;
}

nlohmann::json to_json(const TrainLog& log) {
	nlohmann::json j;
	j["updates"] = log.updates;
	j["zero_norm_events"] = log.zero_norm_events;
	j["epochs"] = nlohmann::json::array();
	for (std::size_t e = 0; e < log.epochs.size(); ++e)
		j["epochs"].push_back({{"epoch", e + 1}, {"train_loss", log.epochs[e].train_loss},
				{"val_loss", log.epochs[e].val_loss}, {"val_total", log.epochs[e].val_total}});
	return j;
}

namespace {

/// Fraction of acts on which the protest cell wins.
double protest_rate(const PopParams& params, std::span<const EncodedAct> acts) {
	if (acts.empty())
		return 0.0;
	std::size_t n = 0;
	for (const auto& a : acts)
		n += predict(params, a).is_protest();
	return static_cast<double>(n) / static_cast<double>(acts.size());
}

} // namespace

ExperimentResult run_experiment(const Manifest& m) {
	ExperimentResult result;
	auto& r = result.report;
	r["status"] = "ok";
	r["model"] = to_string(m.model);
	r["task"] = to_string(m.task);
	r["manifest"] = manifest_to_kv(m).values();
	r["seeds"] = {{"world", m.world.seed}, {"data", m.data.seed}, {"train", m.train.seed},
			{"baseline", m.baseline_seed}, {"imgshuffle", m.shuffle_seed}};
	r["epochs"] = is_trainable(m.model) ? effective_epochs(m) : 0;

	std::string stage = "world";
	try {
		const SyntheticWorld world = make_world(m);

		stage = "generate";
		const Splits splits = generate_splits(m.task, world, m.data);
		const DatasetStats stats = dataset_stats(splits.train, std::span<const ReferenceAct>(splits.test));
		r["dataset_stats"] = to_json(stats);
		result.summary += "dataset statistics\n" + format_stats(stats) + "\n";

		Metrics metrics;
		switch (m.model) {
		case ModelKind::pop:
		case ModelKind::trpop: {
			stage = "encode";
			const EncodeOptions enc = effective_encoding(m);
			const auto train = encode_all(splits.train, world, enc);
			const auto val = encode_all(splits.val, world, enc);
			const auto test = encode_all(splits.test, world, enc);
			stage = "train";
			auto fitted = fit_pop(m, train, val);
			r["train_log"] = to_json(fitted.log);
			stage = "evaluate";
			metrics = evaluate(std::span<const EncodedAct>(test),
					[&](const EncodedAct& a) { return predict(fitted.params, a); });
			r["diagnostics"] = {{"test_protest_rate", protest_rate(fitted.params, test)}};
			result.checkpoint = to_checkpoint(fitted.params);
			break;
		}
		case ModelKind::pipeline: {
			stage = "encode";
			const EncodeOptions enc = effective_encoding(m);
			const auto train = encode_all(splits.train, world, enc);
			const auto val = encode_all(splits.val, world, enc);
			const auto test = encode_all(splits.test, world, enc);
			stage = "train";
			auto fitted = fit_pipeline(m, train, val);
			r["train_log"] = to_json(fitted.log);
			r["thresholds"] = {{"theta_miss", fitted.thresholds.miss}, {"theta_diff", fitted.thresholds.diff}};
			stage = "evaluate";
			metrics = evaluate(std::span<const EncodedAct>(test),
					[&](const EncodedAct& a) { return pipeline_predict(fitted.params, fitted.thresholds, a); });
			result.checkpoint = to_checkpoint(fitted.params, fitted.thresholds, m.margin);
			break;
		}
		case ModelKind::imgshuffle: {
			if (m.task != Task::object_attribute)
				throw ConfigError("imgshuffle runs on the object-attr task");
			stage = "train";
			auto res = run_imgshuffle(m, world, splits);
			r["train_log"] = to_json(res.log);
			r["imgshuffle_seed"] = res.shuffle_seed;
			metrics = res.metrics;
			break;
		}
		default:
			stage = "evaluate";
			metrics = evaluate_baseline(m.model, splits.test, splits.train, world, m.baseline_seed, m.data.max_len,
					m.p_true);
			break;
		}
		r["metrics"] = to_json(metrics);
		result.summary += format_header() + format_row(to_string(m.model), metrics);
	} catch (const std::exception& e) {
		r["status"] = "failed";
		r["failed_stage"] = stage;
		r["error"] = e.what();
		result.ok = false;
		result.summary += "FAILED at stage '" + stage + "': " + e.what() + "\n";
	}
	return result;
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir, double elapsed_seconds) {
	std::filesystem::create_directories(out_dir);
	write_file(out_dir / "report.json", result.report.dump(2) + "\n");
	write_file(out_dir / "report.txt", result.summary);
	if (result.checkpoint)
		save_checkpoint(*result.checkpoint, out_dir / "checkpoint.ckpt");
	const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	char stamp[64];
	std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
	nlohmann::json timing = {{"finished_at", stamp}, {"elapsed_seconds", elapsed_seconds}};
	write_file(out_dir / "timing.json", timing.dump(2) + "\n");
}

} // namespace pop
