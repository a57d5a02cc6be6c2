#include "pop/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "pop/error.hpp"
#include "pop/rng.hpp"
#include "pop/text_io.hpp"

namespace pop {

// ---------------------------------------------------------------- tables

void EmbeddingTable::add(std::string token, Vector vec) {
	if (token.empty())
		throw ContractError("embedding table: empty token");
	if (vec.size() != dim_)
		throw ContractError("embedding table: vector for '" + token + "' has length " +
				std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
	if (index_.count(token))
		throw ContractError("embedding table: duplicate token '" + token + "'");
	index_.emplace(token, tokens_.size());
	tokens_.push_back(std::move(token));
	vectors_.push_back(std::move(vec));
}

const Vector* EmbeddingTable::find(const std::string& token) const {
	auto it = index_.find(token);
	return it == index_.end() ? nullptr : &vectors_[it->second];
}

const Vector& EmbeddingTable::at(const std::string& token) const {
	if (const Vector* v = find(token))
		return *v;
	throw EncodingError("unknown token '" + token + "'");
}

EmbeddingTable parse_table(const std::string& text) {
	std::istringstream in(text);
	std::string line;
	std::size_t line_no = 0;
	std::optional<std::size_t> count, dim;
	while (std::getline(in, line)) {
		++line_no;
		if (!trim(line).empty())
			break;
	}
	if (trim(line).empty())
		throw ParseError("missing header", line_no ? line_no : 1);
	auto header = split_whitespace(line);
	if (header.size() != 2 || !(count = parse_size(header[0])) || !(dim = parse_size(header[1])) || *dim == 0)
		throw ParseError("malformed header, expected '<count> <dim>'", line_no);

	EmbeddingTable table(*dim);
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		auto fields = split_whitespace(line);
		if (fields.size() != *dim + 1)
			throw ParseError("expected token and " + std::to_string(*dim) + " values, got " +
					std::to_string(fields.size() - 1) + " values", line_no);
		Vector vec(*dim);
		for (std::size_t i = 0; i < *dim; ++i) {
			auto v = parse_double(fields[i + 1]);
			if (!v || !std::isfinite(*v))
				throw ParseError("bad number '" + std::string(fields[i + 1]) + "'", line_no);
			vec[i] = *v;
		}
		std::string token(fields[0]);
		if (table.contains(token))
			throw ParseError("duplicate token '" + token + "'", line_no);
		table.add(std::move(token), std::move(vec));
	}
	if (table.size() != *count)
		throw ParseError("header declares " + std::to_string(*count) + " rows, found " +
				std::to_string(table.size()), line_no);
	return table;
}

EmbeddingTable load_table(const std::filesystem::path& path) {
	return parse_table(read_file(path));
}

void save_table(const EmbeddingTable& table, const std::filesystem::path& path) {
	std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
	for (std::size_t i = 0; i < table.size(); ++i) {
		out += table.tokens()[i];
		for (double x : table.vector(i)) {
			out += ' ';
			out += format_double(x);
		}
		out += '\n';
	}
	write_file(path, out);
}

// ---------------------------------------------------------------- vocabularies

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
	for (std::size_t i = 0; i < tokens_.size(); ++i)
		if (!index_.emplace(tokens_[i], i).second)
			throw ContractError("vocabulary: duplicate token '" + tokens_[i] + "'");
}

std::size_t Vocabulary::index(const std::string& token) const {
	auto it = index_.find(token);
	if (it == index_.end())
		throw EncodingError("token '" + token + "' is not in the vocabulary");
	return it->second;
}

Vector one_hot(const std::string& token, const Vocabulary& vocab) {
	Vector v(vocab.size(), 0.0);
	v[vocab.index(token)] = 1.0;
	return v;
}

// ---------------------------------------------------------------- compatibility

CompatMap parse_compat(const std::string& text) {
	CompatMap compat;
	std::istringstream in(text);
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line)) {
		++line_no;
		auto body = trim(line);
		if (body.empty())
			continue;
		const auto colon = body.find(':');
		if (colon == std::string_view::npos)
			throw ParseError("expected '<object>: <attr>,...'", line_no);
		std::string object(trim(body.substr(0, colon)));
		if (object.empty())
			throw ParseError("empty object name", line_no);
		if (compat.count(object))
			throw ParseError("duplicate object '" + object + "'", line_no);
		std::vector<std::string> attrs;
		for (auto field : split(body.substr(colon + 1), ',')) {
			auto a = trim(field);
			if (a.empty())
				throw ParseError("empty attribute", line_no);
			attrs.emplace_back(a);
		}
		compat.emplace(std::move(object), std::move(attrs));
	}
	return compat;
}

CompatMap load_compat(const std::filesystem::path& path) {
	return parse_compat(read_file(path));
}

void save_compat(const CompatMap& compat, const std::filesystem::path& path) {
	std::string out;
	for (const auto& [object, attrs] : compat) {
		out += object + ":";
		for (std::size_t i = 0; i < attrs.size(); ++i)
			out += (i ? "," : " ") + attrs[i];
		out += '\n';
	}
	write_file(path, out);
}

// ---------------------------------------------------------------- worlds

void SyntheticWorld::reindex() {
	compat_inverse.clear();
	for (const auto& object : objects) {
		auto it = compat.find(object);
		if (it == compat.end())
			continue;
		for (const auto& attr : it->second)
			compat_inverse[attr].push_back(object);
	}
	image_owner.clear();
	for (const auto& [object, ids] : images)
		for (const auto& id : ids)
			image_owner.emplace(id, object);
	noun_vocab = Vocabulary(objects);
	attr_vocab = Vocabulary(attributes);
}

const std::string& SyntheticWorld::object_of(const std::string& image_id) const {
	auto it = image_owner.find(image_id);
	if (it == image_owner.end())
		throw EncodingError("unknown image id '" + image_id + "'");
	return it->second;
}

void validate_world(const SyntheticWorld& world) {
	std::set<std::string> seen_images;
	for (const auto& object : world.objects) {
		auto it = world.images.find(object);
		if (it == world.images.end() || it->second.empty())
			throw ConfigError("object '" + object + "' has no images");
		for (const auto& id : it->second) {
			if (!seen_images.insert(id).second)
				throw ConfigError("image id '" + id + "' listed under more than one object");
			if (!world.image_vecs.contains(id))
				throw ConfigError("image id '" + id + "' has no vector");
		}
		if (!world.word_vecs.contains(object))
			throw ConfigError("object '" + object + "' has no word vector");
	}
	for (const auto& [object, attrs] : world.compat) {
		if (attrs.size() < 3)
			throw ConfigError("object '" + object + "' has fewer than 3 compatible attributes");
		for (const auto& a : attrs)
			if (!world.attr_vecs.contains(a))
				throw ConfigError("attribute '" + a + "' (compatible with '" + object + "') has no vector");
	}
}

namespace {

std::string numbered(const std::string& prefix, std::size_t i, std::size_t count) {
	const std::size_t width = std::max<std::size_t>(4, std::to_string(count).size());
	std::string digits = std::to_string(i);
	return prefix + std::string(width - digits.size(), '0') + digits;
}

Vector gaussian(Rng& rng, std::size_t dim, double scale) {
	Vector v(dim);
	for (double& x : v)
		x = scale * rng.normal();
	return v;
}

Vector unit_gaussian(Rng& rng, std::size_t dim) {
	Vector v;
	double n = 0.0;
	do {
		v = gaussian(rng, dim, 1.0);
		n = norm(v);
	} while (n == 0.0);
	for (double& x : v)
		x /= n;
	return v;
}

} // namespace

SyntheticWorld build_synthetic_world(const WorldConfig& config) {
	if (config.classes < 2)
		throw ConfigError("world needs at least 2 object classes");
	if (config.images_per_class < 1)
		throw ConfigError("world needs at least 1 image per class");
	if (!(config.sigma >= 0.0) || !(config.sigma_word >= 0.0))
		throw ConfigError("noise scales must be non-negative");
	if (config.d_img < 1 || config.d_word < 1)
		throw ConfigError("embedding dimensions must be positive");
	if (config.attrs_per_object < 3 || config.attributes < config.attrs_per_object)
		throw ConfigError("need attrs_per_object >= 3 and attributes >= attrs_per_object");

	Rng rng(config.seed);
	SyntheticWorld world;
	world.config = config;
	world.image_vecs = EmbeddingTable(config.d_img);
	world.word_vecs = EmbeddingTable(config.d_word);
	world.attr_vecs = EmbeddingTable(config.d_word);

	// Cross-modal map with unit expected row-space gain: ||R mu|| ~ 1 for unit mu.
	Matrix cross(config.d_word, config.d_img);
	const double cross_scale = 1.0 / std::sqrt(static_cast<double>(config.d_word));
	for (double& x : cross.data())
		x = cross_scale * rng.normal();

	for (std::size_t c = 0; c < config.classes; ++c) {
		std::string object = numbered("obj", c + 1, config.classes);
		const Vector centroid = unit_gaussian(rng, config.d_img);
		auto& ids = world.images[object];
		for (std::size_t k = 0; k < config.images_per_class; ++k) {
			Vector img = centroid;
			if (config.sigma > 0.0)
				axpy(config.sigma, gaussian(rng, config.d_img, 1.0), img);
			std::string id = object + "#" + std::to_string(k);
			world.image_vecs.add(id, std::move(img));
			ids.push_back(std::move(id));
		}
		Vector word = matvec(cross, centroid);
		if (config.sigma_word > 0.0)
			axpy(config.sigma_word, gaussian(rng, config.d_word, 1.0), word);
		world.word_vecs.add(object, std::move(word));
		world.objects.push_back(std::move(object));
	}

	for (std::size_t a = 0; a < config.attributes; ++a) {
		std::string attr = numbered("attr", a + 1, config.attributes);
		world.attr_vecs.add(attr, unit_gaussian(rng, config.d_word));
		world.attributes.push_back(std::move(attr));
	}

	// Bipartite compatibility: each object draws attrs_per_object distinct
	// attributes; attributes left with fewer than two objects are topped up.
	std::vector<std::vector<bool>> has(config.classes, std::vector<bool>(config.attributes, false));
	std::vector<std::size_t> attr_degree(config.attributes, 0);
	std::vector<std::size_t> pool(config.attributes);
	for (std::size_t c = 0; c < config.classes; ++c) {
		std::iota(pool.begin(), pool.end(), 0);
		for (std::size_t k = 0; k < config.attrs_per_object; ++k) {
			const std::size_t j = k + rng.below(pool.size() - k);
			std::swap(pool[k], pool[j]);
			has[c][pool[k]] = true;
			++attr_degree[pool[k]];
		}
	}
	for (std::size_t a = 0; a < config.attributes; ++a) {
		while (attr_degree[a] < 2) {
			const std::size_t c = rng.below(config.classes);
			if (!has[c][a]) {
				has[c][a] = true;
				++attr_degree[a];
			}
		}
	}
	for (std::size_t c = 0; c < config.classes; ++c) {
		auto& attrs = world.compat[world.objects[c]];
		for (std::size_t a = 0; a < config.attributes; ++a)
			if (has[c][a])
				attrs.push_back(world.attributes[a]);
	}

	world.reindex();
	validate_world(world);
	return world;
}

void save_world(const SyntheticWorld& world, const std::filesystem::path& dir) {
	save_table(world.image_vecs, dir / "image.vec");
	save_table(world.word_vecs, dir / "word.vec");
	save_table(world.attr_vecs, dir / "attr.vec");
	save_compat(world.compat, dir / "compat.txt");
}

SyntheticWorld load_world(const std::filesystem::path& dir) {
	SyntheticWorld world;
	world.image_vecs = load_table(dir / "image.vec");
	world.word_vecs = load_table(dir / "word.vec");
	world.attr_vecs = load_table(dir / "attr.vec");
	if (std::filesystem::exists(dir / "compat.txt"))
		world.compat = load_compat(dir / "compat.txt");
	world.objects = world.word_vecs.tokens();
	world.attributes = world.attr_vecs.tokens();
	for (const auto& id : world.image_vecs.tokens()) {
		const auto hash = id.rfind('#');
		if (hash == std::string::npos || hash == 0)
			throw ParseError("image id '" + id + "' is not of the form <object>#<k>", 0);
		std::string object = id.substr(0, hash);
		if (!world.word_vecs.contains(object))
			throw ParseError("image id '" + id + "' names an object without a word vector", 0);
		world.images[object].push_back(id);
	}
	auto& cfg = world.config;
	cfg.classes = world.objects.size();
	cfg.attributes = world.attributes.size();
	cfg.d_img = world.image_vecs.dim();
	cfg.d_word = world.word_vecs.dim();
	cfg.images_per_class = 0;
	cfg.attrs_per_object = 0;
	cfg.sigma = cfg.sigma_word = 0.0;
	cfg.seed = 0;
	world.reindex();
	validate_world(world);
	return world;
}

ShuffledWorld shuffle_images(const SyntheticWorld& world, std::uint64_t seed) {
	const std::size_t n = world.image_vecs.size();
	if (n < 2)
		throw ContractError("shuffle_images: need at least 2 images");
	std::vector<std::size_t> source(n);
	std::iota(source.begin(), source.end(), 0);
	// Sattolo's algorithm: a uniformly random n-cycle, hence a derangement.
	Rng rng(seed);
	for (std::size_t i = n - 1; i > 0; --i) {
		const std::size_t j = rng.below(i);
		std::swap(source[i], source[j]);
	}
	ShuffledWorld out{world, source, seed};
	for (std::size_t k = 0; k < n; ++k)
		out.world.image_vecs.mutable_at(k) = world.image_vecs.vector(source[k]);
	return out;
}

// ---------------------------------------------------------------- encoding

namespace {

Vector normalized_if(Vector v, bool normalize) {
	if (normalize) {
		const double n = norm(v);
		if (n > 0.0)
			for (double& x : v)
				x /= n;
	}
	return v;
}

Vector word_vector(const std::string& token, const EmbeddingTable& table, const Vocabulary& vocab,
		const EncodeOptions& options) {
	if (options.mode == EncodingMode::one_hot)
		return one_hot(token, vocab);
	if (const Vector* v = table.find(token))
		return normalized_if(*v, options.normalize_blocks);
	if (options.allow_unknown)
		return Vector(table.dim(), 0.0);
	throw EncodingError("no vector for word '" + token + "'");
}

} // namespace

EncodedAct encode_act(const ReferenceAct& act, const SyntheticWorld& world, const EncodeOptions& options) {
	if (act.items.empty())
		throw ContractError("act '" + act.id + "' has no candidates");
	const bool attrs = act.query.attribute.has_value() && !options.drop_attributes;

	EncodedAct out;
	out.id = act.id;
	out.gold = act.gold;
	out.query = word_vector(act.query.noun, world.word_vecs, world.noun_vocab, options);
	if (attrs)
		out.query = concat(out.query, word_vector(*act.query.attribute, world.attr_vecs, world.attr_vocab, options));

	out.candidates.reserve(act.items.size());
	for (const auto& item : act.items) {
		const Vector* img = world.image_vecs.find(item.image_id);
		if (!img)
			throw EncodingError("no vector for image '" + item.image_id + "'");
		Vector cand = normalized_if(*img, options.normalize_blocks);
		if (attrs) {
			if (!item.attribute)
				throw EncodingError("act '" + act.id + "' mixes items with and without attributes");
			cand = concat(cand, word_vector(*item.attribute, world.attr_vecs, world.attr_vocab, options));
		}
		out.candidates.push_back(std::move(cand));
	}
	return out;
}

std::vector<EncodedAct> encode_all(std::span<const ReferenceAct> acts, const SyntheticWorld& world,
		const EncodeOptions& options) {
	std::vector<EncodedAct> out;
	out.reserve(acts.size());
	for (const auto& act : acts)
		out.push_back(encode_act(act, world, options));
	return out;
}

std::pair<std::size_t, std::size_t> encoded_dims(const SyntheticWorld& world, bool with_attributes,
		const EncodeOptions& options) {
	const bool one_hot_mode = options.mode == EncodingMode::one_hot;
	const std::size_t noun = one_hot_mode ? world.noun_vocab.size() : world.word_vecs.dim();
	const std::size_t attr = one_hot_mode ? world.attr_vocab.size() : world.attr_vecs.dim();
	const bool attrs = with_attributes && !options.drop_attributes;
	return {noun + (attrs ? attr : 0), world.image_vecs.dim() + (attrs ? attr : 0)};
}

} // namespace pop
