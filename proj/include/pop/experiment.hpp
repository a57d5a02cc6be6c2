#ifndef POP_EXPERIMENT_HPP_
#define POP_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "pop/baselines.hpp"
#include "pop/checkpoint.hpp"
#include "pop/datagen.hpp"
#include "pop/embeddings.hpp"
#include "pop/kv_config.hpp"
#include "pop/metrics.hpp"
#include "pop/pipeline_model.hpp"
#include "pop/pop_model.hpp"
#include "pop/train.hpp"

namespace pop {

enum class ModelKind { pop, trpop, pipeline, random, majority, probability, cnn, attr_random, imgshuffle };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
bool is_trainable(ModelKind kind);

/// Everything needed to reproduce one run. Keys are listed in the README.
struct Manifest {
	Task task = Task::object_only;
	ModelKind model = ModelKind::pop;
	WorldConfig world;
	std::optional<std::filesystem::path> world_dir;  ///< load vectors from files instead of synthesizing
	DatasetSpec data;
	TrainConfig train;
	bool epochs_set = false;                         ///< train.epochs given explicitly
	PopConfig pop;
	std::size_t d_shared = 300;
	double margin = 0.5;
	bool corpus_negatives = false;
	std::uint64_t baseline_seed = 1;
	double p_true = 0.5;
	std::uint64_t shuffle_seed = 1;
	EncodeOptions encode;
};

/// Throws ConfigError for unknown keys or bad values.
Manifest manifest_from_kv(const KeyValues& kv);
KeyValues manifest_to_kv(const Manifest& m);

/// Epoch count actually used: explicit value, else 14 (36 for TRPoP).
std::size_t effective_epochs(const Manifest& m);
EncodeOptions effective_encoding(const Manifest& m);

SyntheticWorld make_world(const Manifest& m);

struct TrainedPop {
	PopParams params;
	TrainLog log;
};

/// Initializes from train.seed and trains on the encoded acts.
TrainedPop fit_pop(const Manifest& m, std::span<const EncodedAct> train, std::span<const EncodedAct> val = {});

struct TrainedPipeline {
	PipelineParams params;
	Thresholds thresholds;
	TrainLog log;
};

/// Max-margin training, then threshold tuning on val.
TrainedPipeline fit_pipeline(const Manifest& m, std::span<const EncodedAct> train, std::span<const EncodedAct> val);

/// Predictions of a non-learned baseline; random draws use per-act seeds, so order does not matter.
Metrics evaluate_baseline(ModelKind kind, std::span<const ReferenceAct> test, std::span<const ReferenceAct> train,
		const SyntheticWorld& world, std::uint64_t seed, std::size_t max_len, double p_true = 0.5);

struct ImgShuffleResult {
	Metrics metrics;
	std::uint64_t shuffle_seed = 0;
	TrainLog log;
};

/// PoP trained and tested on a world whose image vectors are consistently permuted.
ImgShuffleResult run_imgshuffle(const Manifest& m, const SyntheticWorld& world, const Splits& splits);

struct ExperimentResult {
	nlohmann::json report;
	std::string summary;
	std::optional<Checkpoint> checkpoint;
	bool ok = true;
};

/// End to end: world, splits, encoding, training, tuning, evaluation. Never throws;
/// failures yield a partial report naming the failed stage.
ExperimentResult run_experiment(const Manifest& m);

/// Writes report.json, report.txt, checkpoint.ckpt (if any) and timing.json.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir, double elapsed_seconds);

nlohmann::json to_json(const DatasetStats& stats);
nlohmann::json to_json(const TrainLog& log);

} // namespace pop

#endif
