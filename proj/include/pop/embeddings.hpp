#ifndef POP_EMBEDDINGS_HPP_
#define POP_EMBEDDINGS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pop/numerics.hpp"
#include "pop/reference_act.hpp"

namespace pop {

/// Token -> vector map with a fixed dimension; keeps insertion order.
class EmbeddingTable {
public:
	explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim) { }

	std::size_t dim() const noexcept { return dim_; }
	std::size_t size() const noexcept { return tokens_.size(); }
	bool contains(const std::string& token) const { return index_.count(token) != 0; }

	/// Throws ContractError on empty or duplicate token, or wrong length.
	void add(std::string token, Vector vec);
	/// nullptr if absent.
	const Vector* find(const std::string& token) const;
	const Vector& at(const std::string& token) const;
	Vector& mutable_at(std::size_t i) { return vectors_[i]; }

	const std::vector<std::string>& tokens() const noexcept { return tokens_; }
	const Vector& vector(std::size_t i) const { return vectors_[i]; }

	bool operator==(const EmbeddingTable& o) const { return dim_ == o.dim_ && tokens_ == o.tokens_ && vectors_ == o.vectors_; }

private:
	std::size_t dim_;
	std::vector<std::string> tokens_;
	std::vector<Vector> vectors_;
	std::unordered_map<std::string, std::size_t> index_;
};

/// Reads "<count> <dim>" then "<token> v1 ... vdim" rows.
EmbeddingTable load_table(const std::filesystem::path& path);
EmbeddingTable parse_table(const std::string& text);
void save_table(const EmbeddingTable& table, const std::filesystem::path& path);

/// Ordered token list with O(1) index lookup.
class Vocabulary {
public:
	Vocabulary() = default;
	explicit Vocabulary(std::vector<std::string> tokens);
	std::size_t size() const noexcept { return tokens_.size(); }
	const std::vector<std::string>& tokens() const noexcept { return tokens_; }
	/// Throws EncodingError for an unknown token.
	std::size_t index(const std::string& token) const;
	bool contains(const std::string& token) const { return index_.count(token) != 0; }
private:
	std::vector<std::string> tokens_;
	std::unordered_map<std::string, std::size_t> index_;
};

Vector one_hot(const std::string& token, const Vocabulary& vocab);

using CompatMap = std::map<std::string, std::vector<std::string>>;

/// One line per object: "<object>: <attr1>,<attr2>,...".
CompatMap parse_compat(const std::string& text);
CompatMap load_compat(const std::filesystem::path& path);
void save_compat(const CompatMap& compat, const std::filesystem::path& path);

struct WorldConfig {
	std::size_t classes = 200;
	std::size_t images_per_class = 10;
	std::size_t attributes = 100;
	std::size_t attrs_per_object = 6;
	std::size_t d_img = 64;
	std::size_t d_word = 32;
	double sigma = 0.1;       ///< per-coordinate std of image noise around the class centroid
	double sigma_word = 0.2;  ///< per-coordinate std of word-vector noise
	std::uint64_t seed = 1;

	bool operator==(const WorldConfig&) const = default;
};

/**
 * Stand-in for CNN image features and cbow word vectors. Image ids have the
 * form "<object>#<k>".
 */
struct SyntheticWorld {
	WorldConfig config;
	std::vector<std::string> objects;
	std::vector<std::string> attributes;
	std::map<std::string, std::vector<std::string>> images;  ///< object -> image ids
	EmbeddingTable image_vecs;
	EmbeddingTable word_vecs;
	EmbeddingTable attr_vecs;
	CompatMap compat;                                         ///< object -> compatible attributes
	CompatMap compat_inverse;                                 ///< attribute -> compatible objects
	std::unordered_map<std::string, std::string> image_owner; ///< image id -> object
	Vocabulary noun_vocab;
	Vocabulary attr_vocab;

	/// Rebuilds compat_inverse and the vocabularies from the primary fields.
	void reindex();
	/// Object owning an image id. Throws EncodingError if unknown.
	const std::string& object_of(const std::string& image_id) const;

	bool operator==(const SyntheticWorld& o) const {
		return config == o.config && objects == o.objects && attributes == o.attributes && images == o.images &&
				image_vecs == o.image_vecs && word_vecs == o.word_vecs && attr_vecs == o.attr_vecs && compat == o.compat;
	}
};

/// Throws ConfigError when a world invariant is broken (no images, compat set < 3, unknown attribute...).
void validate_world(const SyntheticWorld& world);

SyntheticWorld build_synthetic_world(const WorldConfig& config);

/// Writes image.vec, word.vec, attr.vec and compat.txt into dir.
void save_world(const SyntheticWorld& world, const std::filesystem::path& dir);
/// Assembles a world from the four files written by save_world (or produced externally).
SyntheticWorld load_world(const std::filesystem::path& dir);

struct ShuffledWorld {
	SyntheticWorld world;
	/// source[k] = index (in image_vecs order) of the vector now held by image k.
	std::vector<std::size_t> source;
	std::uint64_t seed = 0;
};

/**
 * Reassigns image vectors by a random cyclic permutation (Sattolo), so no
 * image keeps its own vector. The permutation is fixed by the seed and must
 * be applied to train and test encodings alike.
 */
ShuffledWorld shuffle_images(const SyntheticWorld& world, std::uint64_t seed);

enum class EncodingMode { dense, one_hot };

struct EncodeOptions {
	EncodingMode mode = EncodingMode::dense;
	/// Dense mode only: unknown words encode as zero vectors instead of failing.
	bool allow_unknown = false;
	/// L2-normalize each concatenated block.
	bool normalize_blocks = false;
	/// Encode an Object+Attribute act as if it had no attributes.
	bool drop_attributes = false;
};

struct EncodedAct {
	std::string id;
	Vector query;
	std::vector<Vector> candidates;
	Gold gold = Gold::anomaly(AnomalyKind::miss);

	std::size_t cardinality() const noexcept { return candidates.size(); }
};

EncodedAct encode_act(const ReferenceAct& act, const SyntheticWorld& world, const EncodeOptions& options = {});
std::vector<EncodedAct> encode_all(std::span<const ReferenceAct> acts, const SyntheticWorld& world,
		const EncodeOptions& options = {});

/// Input dimensions implied by a world and encoding: {query dim, candidate dim}.
std::pair<std::size_t, std::size_t> encoded_dims(const SyntheticWorld& world, bool with_attributes,
		const EncodeOptions& options);

} // namespace pop

#endif
