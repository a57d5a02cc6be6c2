// popctl: dataset generation, training, evaluation and baselines for the
// point-or-protest reference resolver.
//
// Exit codes: 0 success, 1 usage error, 2 data/contract error, 3 numeric failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pop/error.hpp"
#include "pop/experiment.hpp"
#include "pop/gradcheck.hpp"
#include "pop/text_io.hpp"

namespace fs = std::filesystem;
using namespace pop;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_numeric = 3;

KeyValues load_kv(const std::string& path) {
	return path.empty() ? KeyValues() : KeyValues::load(path);
}

/// Data directories carry the manifest that produced them.
Manifest data_manifest(const fs::path& data_dir, const std::string& config_path) {
	KeyValues kv = KeyValues::load(data_dir / "manifest.cfg");
	kv.merge(load_kv(config_path));
	return manifest_from_kv(kv);
}

/// Trainable checkpoints embed the manifest, so evaluation can rebuild the world.
void embed_manifest(Checkpoint& ckpt, const Manifest& m) {
	const KeyValues kv = manifest_to_kv(m);
	for (const auto& [key, value] : kv.values())
		ckpt.meta["manifest." + key] = value;
}

Manifest manifest_of(const Checkpoint& ckpt) {
	KeyValues kv;
	for (const auto& [key, value] : ckpt.meta)
		if (key.rfind("manifest.", 0) == 0)
			kv.set(key.substr(9), value);
	return manifest_from_kv(kv);
}

void print_metrics(const std::string& name, const Metrics& m) {
	std::cout << format_header() << format_row(name, m);
}

void write_report(const std::string& path, const nlohmann::json& report) {
	if (!path.empty())
		write_file(path, report.dump(2) + "\n");
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"point-or-protest reference resolution toolkit"};
	app.require_subcommand(1);

	// gen-data
	std::string task = "object-only", spec_path, out_dir;
	std::uint64_t world_seed = 1;
	bool export_world = false;
	auto* gen = app.add_subcommand("gen-data", "generate train/val/test reference acts");
	gen->add_option("--task", task, "object-only | object-attr")->check(CLI::IsMember({"object-only", "object-attr"}));
	gen->add_option("--world-seed", world_seed, "seed of the synthetic embedding world");
	gen->add_option("--spec", spec_path, "key-value file with world.* and data.* settings");
	gen->add_option("--out", out_dir, "output directory")->required();
	gen->add_flag("--export-world", export_world, "also write the world's vector and compatibility files");

	// train
	std::string model = "pop", data_dir, config_path, ckpt_out;
	auto* train = app.add_subcommand("train", "train PoP, TRPoP or the Pipeline");
	train->add_option("--model", model)->check(CLI::IsMember({"pop", "trpop", "pipeline"}));
	train->add_option("--data", data_dir, "directory written by gen-data")->required();
	train->add_option("--config", config_path, "key-value overrides (train.*, pop.*, pipeline.*)");
	train->add_option("--out-checkpoint", ckpt_out)->required();

	// tune-thresholds
	std::string ckpt_path, val_path;
	auto* tune = app.add_subcommand("tune-thresholds", "grid-search the Pipeline's protest thresholds");
	tune->add_option("--checkpoint", ckpt_path)->required();
	tune->add_option("--val", val_path, "validation JSONL")->required();

	// eval
	std::string test_path, report_path;
	auto* eval = app.add_subcommand("eval", "evaluate a trained checkpoint");
	eval->add_option("--model", model);
	eval->add_option("--checkpoint", ckpt_path)->required();
	eval->add_option("--test", test_path)->required();
	eval->add_option("--report", report_path, "write metrics JSON here");

	// baseline
	std::string kind;
	std::uint64_t baseline_seed = 1;
	double p_true = 0.5;
	auto* base = app.add_subcommand("baseline", "evaluate a baseline");
	base->add_option("--kind", kind)->required()->check(
			CLI::IsMember({"random", "majority", "probability", "cnn", "attr-random", "imgshuffle"}));
	base->add_option("--data", data_dir)->required();
	base->add_option("--seed", baseline_seed);
	base->add_option("--p-true", p_true, "CNN labeler accuracy");
	base->add_option("--config", config_path);
	base->add_option("--report", report_path);

	// gradcheck
	std::size_t trials = 20;
	double tolerance = 1e-4;
	std::uint64_t gc_seed = 1;
	auto* grad = app.add_subcommand("gradcheck", "compare analytic gradients with finite differences");
	grad->add_option("--model", model)->check(CLI::IsMember({"pop", "trpop", "pipeline"}));
	grad->add_option("--trials", trials);
	grad->add_option("--tolerance", tolerance);
	grad->add_option("--seed", gc_seed);

	// stats
	std::string train_path;
	auto* stats = app.add_subcommand("stats", "dataset statistics");
	stats->add_option("--train", train_path)->required();
	stats->add_option("--test", test_path);
	stats->add_option("--out", report_path, "write JSON here");

	// run
	std::string manifest_path;
	auto* run = app.add_subcommand("run", "run an experiment manifest end to end");
	run->add_option("--manifest", manifest_path)->required();
	run->add_option("--out", out_dir)->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return exit_usage;
	}

	try {
		if (*gen) {
			KeyValues kv = load_kv(spec_path);
			kv.set("task", task);
			if (gen->count("--world-seed"))
				kv.set("world.seed", std::to_string(world_seed));
			const Manifest m = manifest_from_kv(kv);
			const SyntheticWorld world = make_world(m);
			const Splits splits = generate_splits(m.task, world, m.data);
			const fs::path out(out_dir);
			write_jsonl(splits.train, out / "train.jsonl");
			write_jsonl(splits.val, out / "val.jsonl");
			write_jsonl(splits.test, out / "test.jsonl");
			write_file(out / "manifest.cfg", manifest_to_kv(m).serialize());
			if (export_world)
				save_world(world, out / "world");
			std::cout << "wrote " << splits.train.size() << "/" << splits.val.size() << "/" << splits.test.size()
					<< " acts to " << out.string() << "\n";
		} else if (*train) {
			Manifest m = data_manifest(data_dir, config_path);
			m.model = parse_model_kind(model);
			const SyntheticWorld world = make_world(m);
			const EncodeOptions enc = effective_encoding(m);
			const auto train_acts = encode_all(read_jsonl(fs::path(data_dir) / "train.jsonl"), world, enc);
			const auto val_acts = encode_all(read_jsonl(fs::path(data_dir) / "val.jsonl"), world, enc);
			Checkpoint ckpt;
			TrainLog log;
			if (m.model == ModelKind::pipeline) {
				auto fitted = fit_pipeline(m, train_acts, val_acts);
				ckpt = to_checkpoint(fitted.params, fitted.thresholds, m.margin);
				log = fitted.log;
				std::cout << "tuned thresholds: miss " << fitted.thresholds.miss << ", diff "
						<< fitted.thresholds.diff << "\n";
			} else {
				auto fitted = fit_pop(m, train_acts, val_acts);
				ckpt = to_checkpoint(fitted.params);
				log = fitted.log;
			}
			embed_manifest(ckpt, m);
			save_checkpoint(ckpt, ckpt_out);
			for (std::size_t e = 0; e < log.epochs.size(); ++e)
				if (m.model == ModelKind::pipeline)
					std::printf("epoch %zu  hinge loss %.5f\n", e + 1, log.epochs[e].train_loss);
				else
					std::printf("epoch %zu  train loss %.5f  val loss %.5f  val total %.1f\n", e + 1,
							log.epochs[e].train_loss, log.epochs[e].val_loss, log.epochs[e].val_total);
		} else if (*tune) {
			Checkpoint ckpt = load_checkpoint(ckpt_path);
			const Manifest m = manifest_of(ckpt);
			const SyntheticWorld world = make_world(m);
			const auto val = encode_all(read_jsonl(val_path), world, effective_encoding(m));
			const PipelineParams params = pipeline_params_from_checkpoint(ckpt);
			const Thresholds th = tune_thresholds(params, val);
			ckpt.meta["theta_miss"] = format_double(th.miss);
			ckpt.meta["theta_diff"] = format_double(th.diff);
			save_checkpoint(ckpt, ckpt_path);
			std::cout << "theta_miss " << format_double(th.miss) << "\ntheta_diff " << format_double(th.diff) << "\n";
		} else if (*eval) {
			const Checkpoint ckpt = load_checkpoint(ckpt_path);
			const Manifest m = manifest_of(ckpt);
			if (eval->count("--model") && parse_model_kind(model) != m.model)
				throw ConfigError("checkpoint holds a '" + to_string(m.model) + "' model, not '" + model + "'");
			const SyntheticWorld world = make_world(m);
			const auto test = encode_all(read_jsonl(test_path), world, effective_encoding(m));
			Metrics metrics;
			if (ckpt.kind == "pipeline") {
				const auto params = pipeline_params_from_checkpoint(ckpt);
				const auto th = thresholds_from_checkpoint(ckpt);
				metrics = evaluate(std::span<const EncodedAct>(test),
						[&](const EncodedAct& a) { return pipeline_predict(params, th, a); });
			} else {
				const auto params = pop_params_from_checkpoint(ckpt);
				metrics = evaluate(std::span<const EncodedAct>(test),
						[&](const EncodedAct& a) { return predict(params, a); });
			}
			print_metrics(to_string(m.model), metrics);
			write_report(report_path, nlohmann::json{{"model", to_string(m.model)}, {"metrics", to_json(metrics)}});
		} else if (*base) {
			Manifest m = data_manifest(data_dir, config_path);
			m.model = parse_model_kind(kind);
			const SyntheticWorld world = make_world(m);
			const auto train_acts = read_jsonl(fs::path(data_dir) / "train.jsonl");
			const auto test_acts = read_jsonl(fs::path(data_dir) / "test.jsonl");
			nlohmann::json report{{"model", kind}, {"seed", baseline_seed}};
			Metrics metrics;
			if (m.model == ModelKind::imgshuffle) {
				if (base->count("--seed"))
					m.shuffle_seed = baseline_seed;
				Splits splits{train_acts, {}, test_acts};
				auto res = run_imgshuffle(m, world, splits);
				metrics = res.metrics;
				report["imgshuffle_seed"] = res.shuffle_seed;
			} else {
				metrics = evaluate_baseline(m.model, test_acts, train_acts, world, baseline_seed, m.data.max_len, p_true);
			}
			report["metrics"] = to_json(metrics);
			print_metrics(kind, metrics);
			write_report(report_path, report);
		} else if (*grad) {
			Rng rng(gc_seed);
			const GradcheckReport report = model == "pipeline" ? gradcheck_pipeline(trials, rng)
					: gradcheck_pop(trials, rng);
			for (const auto& t : report.trials)
				std::printf("%-48s params %4zu  max rel err %.3e\n", t.description.c_str(), t.parameters,
						t.max_rel_error);
			const bool ok = report.passed(tolerance);
			std::printf("%s: max relative error %.3e (tolerance %.1e)\n", ok ? "PASS" : "FAIL",
					report.max_rel_error(), tolerance);
			return ok ? 0 : exit_numeric;
		} else if (*stats) {
			const auto train_acts = read_jsonl(train_path);
			std::vector<ReferenceAct> test_acts;
			if (!test_path.empty())
				test_acts = read_jsonl(test_path);
			const DatasetStats s = test_path.empty() ? dataset_stats(train_acts)
					: dataset_stats(train_acts, std::span<const ReferenceAct>(test_acts));
			std::cout << format_stats(s);
			write_report(report_path, to_json(s));
		} else if (*run) {
			const Manifest m = manifest_from_kv(KeyValues::load(manifest_path));
			const auto t0 = std::chrono::steady_clock::now();
			const ExperimentResult result = run_experiment(m);
			const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
			write_experiment(result, out_dir, elapsed);
			std::cout << result.summary;
			if (!result.ok) {
				const std::string stage = result.report.value("failed_stage", "");
				return stage == "train" && result.report.value("error", "").find("non-finite") != std::string::npos
						? exit_numeric : exit_data;
			}
		}
	} catch (const NumericError& e) {
		std::cerr << "numeric failure: " << e.what() << "\n";
		return exit_numeric;
	} catch (const ConfigError& e) {
		std::cerr << "configuration error: " << e.what() << "\n";
		return exit_data;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return exit_data;
	}
	return 0;
}
