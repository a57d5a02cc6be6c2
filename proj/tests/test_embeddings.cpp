#include <algorithm>
#include <filesystem>
#include <map>

#include <gtest/gtest.h>

#include "pop/embeddings.hpp"
#include "pop/error.hpp"
#include "pop/text_io.hpp"

using namespace pop;

namespace {

WorldConfig small_world(std::uint64_t seed = 3) {
	WorldConfig c;
	c.classes = 20;
	c.images_per_class = 4;
	c.attributes = 12;
	c.d_img = 8;
	c.d_word = 5;
	c.seed = seed;
	return c;
}

std::size_t parse_error_line(const std::string& text) {
	try {
		parse_table(text);
	} catch (const ParseError& e) {
		return e.line();
	}
	return 0;
}

} // namespace

TEST(EmbeddingTable, ParsesValidFile) {
	const EmbeddingTable t = parse_table("2 3\ncup 1 2 3\nmug 0.5 -1 0\n");
	EXPECT_EQ(t.size(), 2u);
	EXPECT_EQ(t.dim(), 3u);
	EXPECT_EQ(t.at("mug"), (Vector{0.5, -1, 0}));
	EXPECT_EQ(t.find("plate"), nullptr);
}

TEST(EmbeddingTable, ErrorsNameTheLine) {
	EXPECT_EQ(parse_error_line("2 3\ncup 1 2 3\nmug 1 2\n"), 3u);
	EXPECT_EQ(parse_error_line("2 3\ncup 1 2 3\ncup 4 5 6\n"), 3u);
	EXPECT_EQ(parse_error_line("two three\n"), 1u);
	EXPECT_EQ(parse_error_line("2 3\ncup 1 2 x\n"), 2u);
	try {
		parse_table("");
		FAIL();
	} catch (const ParseError& e) {
		EXPECT_NE(std::string(e.what()).find("missing header"), std::string::npos);
	}
}

TEST(EmbeddingTable, SaveLoadRoundTrip) {
	EmbeddingTable t(2);
	t.add("a", {0.1, 1.0 / 3.0});
	t.add("b", {-2e-300, 7});
	const auto dir = std::filesystem::temp_directory_path() / "pop_table_test";
	save_table(t, dir / "t.vec");
	EXPECT_EQ(load_table(dir / "t.vec"), t);
	std::filesystem::remove_all(dir);
}

TEST(OneHot, Encoding) {
	const Vocabulary vocab({"cup", "mug", "plate"});
	EXPECT_EQ(one_hot("mug", vocab), (Vector{0, 1, 0}));
	EXPECT_THROW(one_hot("bowl", vocab), EncodingError);
}

TEST(Compat, ParseAndErrors) {
	const CompatMap m = parse_compat("cup: red,big,old\nmug: blue, small ,new\n");
	EXPECT_EQ(m.at("mug"), (std::vector<std::string>{"blue", "small", "new"}));
	EXPECT_THROW(parse_compat("cup red\n"), ParseError);
}

TEST(SyntheticWorld, ShapeAndInvariants) {
	const SyntheticWorld w = build_synthetic_world(small_world());
	EXPECT_EQ(w.objects.size(), 20u);
	EXPECT_EQ(w.image_vecs.size(), 80u);
	EXPECT_EQ(w.image_vecs.dim(), 8u);
	EXPECT_EQ(w.word_vecs.dim(), 5u);
	EXPECT_NO_THROW(validate_world(w));
	for (const auto& [object, attrs] : w.compat)
		EXPECT_GE(attrs.size(), 3u);
	for (const auto& a : w.attributes)
		EXPECT_GE(w.compat_inverse.at(a).size(), 2u) << a;
	for (const auto& [object, ids] : w.images)
		for (const auto& id : ids)
			EXPECT_EQ(w.object_of(id), object);
}

TEST(SyntheticWorld, Deterministic) {
	EXPECT_EQ(build_synthetic_world(small_world(5)), build_synthetic_world(small_world(5)));
	EXPECT_FALSE(build_synthetic_world(small_world(5)) == build_synthetic_world(small_world(6)));
}

TEST(SyntheticWorld, ZeroNoiseImagesCoincide) {
	WorldConfig c = small_world();
	c.sigma = 0.0;
	const SyntheticWorld w = build_synthetic_world(c);
	for (const auto& [object, ids] : w.images)
		for (const auto& id : ids)
			EXPECT_EQ(w.image_vecs.at(id), w.image_vecs.at(ids.front()));
}

TEST(SyntheticWorld, RejectsBadConfig) {
	WorldConfig c = small_world();
	c.classes = 1;
	EXPECT_THROW(build_synthetic_world(c), ConfigError);
	c = small_world();
	c.sigma = -0.1;
	EXPECT_THROW(build_synthetic_world(c), ConfigError);
	c = small_world();
	c.attrs_per_object = 2;
	EXPECT_THROW(build_synthetic_world(c), ConfigError);
}

TEST(SyntheticWorld, NearestCentroidRecoversClass) {
	const SyntheticWorld w = build_synthetic_world(WorldConfig{});
	std::map<std::string, Vector> centroid;
	for (const auto& [object, ids] : w.images) {
		Vector c(w.image_vecs.dim(), 0.0);
		for (const auto& id : ids)
			for (std::size_t i = 0; i < c.size(); ++i)
				c[i] += w.image_vecs.at(id)[i] / static_cast<double>(ids.size());
		centroid[object] = c;
	}
	std::size_t right = 0, total = 0;
	for (const auto& [object, ids] : w.images) {
		for (const auto& id : ids) {
			const Vector& v = w.image_vecs.at(id);
			std::string best;
			double best_d = 1e300;
			for (const auto& [o, c] : centroid) {
				double d = 0.0;
				for (std::size_t i = 0; i < c.size(); ++i)
					d += (v[i] - c[i]) * (v[i] - c[i]);
				if (d < best_d) {
					best_d = d;
					best = o;
				}
			}
			right += best == object;
			++total;
		}
	}
	EXPECT_GT(static_cast<double>(right) / static_cast<double>(total), 0.99);
}

TEST(SyntheticWorld, SaveLoadRoundTrip) {
	const SyntheticWorld w = build_synthetic_world(small_world());
	const auto dir = std::filesystem::temp_directory_path() / "pop_world_test";
	save_world(w, dir);
	const SyntheticWorld back = load_world(dir);
	EXPECT_EQ(back.objects, w.objects);
	EXPECT_EQ(back.image_vecs, w.image_vecs);
	EXPECT_EQ(back.word_vecs, w.word_vecs);
	EXPECT_EQ(back.attr_vecs, w.attr_vecs);
	EXPECT_EQ(back.compat, w.compat);
	std::filesystem::remove_all(dir);
}

TEST(ShuffleImages, DerangementOverSameVectors) {
	const SyntheticWorld w = build_synthetic_world(small_world());
	const ShuffledWorld s = shuffle_images(w, 17);
	const auto& ids = w.image_vecs.tokens();
	std::vector<Vector> before, after;
	for (std::size_t k = 0; k < ids.size(); ++k) {
		EXPECT_NE(s.world.image_vecs.at(ids[k]), w.image_vecs.at(ids[k]));
		EXPECT_EQ(s.world.image_vecs.at(ids[k]), w.image_vecs.vector(s.source[k]));
		before.push_back(w.image_vecs.vector(k));
		after.push_back(s.world.image_vecs.vector(k));
	}
	std::sort(before.begin(), before.end());
	std::sort(after.begin(), after.end());
	EXPECT_EQ(before, after);

	// Undo through the recorded map.
	std::vector<Vector> restored(ids.size());
	for (std::size_t k = 0; k < ids.size(); ++k)
		restored[s.source[k]] = s.world.image_vecs.vector(k);
	for (std::size_t k = 0; k < ids.size(); ++k)
		EXPECT_EQ(restored[k], w.image_vecs.vector(k));

	EXPECT_EQ(shuffle_images(w, 17).source, s.source);
	EXPECT_EQ(s.world.word_vecs, w.word_vecs);
}

TEST(Encoding, Shapes) {
	const SyntheticWorld w = build_synthetic_world(small_world());
	const std::string o = w.objects[0];
	const std::string a = w.compat.at(o)[0];
	ReferenceAct plain{"t-0", {o, std::nullopt}, {{o, w.images.at(o)[0], std::nullopt}, {w.objects[1], w.images.at(w.objects[1])[0], std::nullopt}}, Gold::point(0)};
	const EncodedAct e = encode_act(plain, w);
	EXPECT_EQ(e.query.size(), 5u);
	EXPECT_EQ(e.cardinality(), 2u);
	for (const auto& c : e.candidates)
		EXPECT_EQ(c.size(), 8u);

	ReferenceAct attr = plain;
	attr.query.attribute = a;
	for (auto& item : attr.items)
		item.attribute = a;
	const EncodedAct ea = encode_act(attr, w);
	EXPECT_EQ(ea.query.size(), 10u);
	EXPECT_EQ(ea.candidates[0].size(), 13u);
	EXPECT_EQ(encoded_dims(w, true, {}), std::make_pair(std::size_t{10}, std::size_t{13}));

	EncodeOptions dropped;
	dropped.drop_attributes = true;
	EXPECT_EQ(encode_act(attr, w, dropped).query, e.query);
}

TEST(Encoding, OneHotQueryDims) {
	WorldConfig c = small_world();
	c.classes = 50;
	c.attributes = 50;
	const SyntheticWorld w = build_synthetic_world(c);
	EncodeOptions oh;
	oh.mode = EncodingMode::one_hot;
	EXPECT_EQ(encoded_dims(w, true, oh).first, 100u);
	EXPECT_EQ(encoded_dims(w, false, oh).first, 50u);
	const std::string o = w.objects[3];
	ReferenceAct act{"t-0", {o, std::nullopt}, {{o, w.images.at(o)[0], std::nullopt}, {o, w.images.at(o)[1], std::nullopt}}, Gold::anomaly(AnomalyKind::mult)};
	const EncodedAct e = encode_act(act, w, oh);
	EXPECT_EQ(e.query, one_hot(o, w.noun_vocab));
}

TEST(Encoding, UnknownWordPolicy) {
	const SyntheticWorld w = build_synthetic_world(small_world());
	const std::string o = w.objects[0];
	ReferenceAct act{"t-0", {"zebra", std::nullopt}, {{o, w.images.at(o)[0], std::nullopt}, {o, w.images.at(o)[1], std::nullopt}}, Gold::anomaly(AnomalyKind::miss)};
	EXPECT_THROW(encode_act(act, w), EncodingError);
	EncodeOptions lax;
	lax.allow_unknown = true;
	EXPECT_EQ(encode_act(act, w, lax).query, Vector(5, 0.0));
	act.items[0].image_id = "nope#1";
	EXPECT_THROW(encode_act(act, w, lax), EncodingError);
}

TEST(Encoding, ZeroNoiseSameObjectSameEncoding) {
	WorldConfig c = small_world();
	c.sigma = 0.0;
	const SyntheticWorld w = build_synthetic_world(c);
	const std::string o = w.objects[2];
	ReferenceAct act{"t-0", {o, std::nullopt}, {{o, w.images.at(o)[0], std::nullopt}, {o, w.images.at(o)[1], std::nullopt}}, Gold::anomaly(AnomalyKind::mult)};
	const EncodedAct e = encode_act(act, w);
	EXPECT_EQ(e.candidates[0], e.candidates[1]);
}
