#include "pop/datagen.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "pop/error.hpp"
#include "pop/rng.hpp"

namespace pop {

bool matches(const Query& query, const Item& item) {
	return item.object == query.noun && item.attribute == query.attribute;
}

std::string to_string(Task task) {
	return task == Task::object_only ? "object-only" : "object-attr";
}

Task parse_task(const std::string& name) {
	if (name == "object-only")
		return Task::object_only;
	if (name == "object-attr" || name == "object-attribute")
		return Task::object_attribute;
	throw ConfigError("unknown task '" + name + "' (expected object-only or object-attr)");
}

void validate_spec(const DatasetSpec& spec) {
	if (spec.min_len < 2 || spec.min_len > spec.max_len)
		throw ConfigError("need 2 <= min_len <= max_len");
	if (!(spec.p_miss >= 0.0) || !(spec.p_mult >= 0.0) || !(spec.p_miss + spec.p_mult < 1.0))
		throw ConfigError("need p_miss >= 0, p_mult >= 0 and p_miss + p_mult < 1");
}

namespace {

enum class Outcome { success, miss, mult };

Rng act_rng(const DatasetSpec& spec, const std::string& split, std::size_t index) {
	return Rng(derive_seed(derive_seed(spec.seed, split), index));
}

std::string act_id(const std::string& split, std::size_t index) {
	return split + "-" + std::to_string(index);
}

Outcome draw_outcome(Rng& rng, const DatasetSpec& spec) {
	// One uniform draw: [0, p0) miss, [p0, p0 + pm) mult, rest success.
	const double u = rng.uniform();
	if (u < spec.p_miss)
		return Outcome::miss;
	if (u < spec.p_miss + spec.p_mult)
		return Outcome::mult;
	return Outcome::success;
}

template<typename T>
const T& pick(Rng& rng, const std::vector<T>& from) {
	return from[rng.below(from.size())];
}

const std::string& pick_image(Rng& rng, const SyntheticWorld& world, const std::string& object) {
	return pick(rng, world.images.at(object));
}

/// A different image of the object when it has more than one.
std::string fresh_image(Rng& rng, const SyntheticWorld& world, const std::string& object, const std::string& avoid) {
	const auto& ids = world.images.at(object);
	if (ids.size() < 2)
		return ids.front();
	for (;;) {
		const auto& id = pick(rng, ids);
		if (id != avoid)
			return id;
	}
}

/// Shuffles the items and records the gold outcome; slot 0 holds the query item before the shuffle.
void finish_act(ReferenceAct& act, Outcome outcome, Rng& rng) {
	std::vector<std::size_t> order(act.items.size());
	std::iota(order.begin(), order.end(), 0);
	rng.shuffle(std::span(order));
	std::vector<Item> shuffled;
	shuffled.reserve(order.size());
	std::size_t query_pos = 0;
	for (std::size_t k = 0; k < order.size(); ++k) {
		if (order[k] == 0)
			query_pos = k;
		shuffled.push_back(std::move(act.items[order[k]]));
	}
	act.items = std::move(shuffled);
	switch (outcome) {
	case Outcome::success: act.gold = Gold::point(query_pos); break;
	case Outcome::miss: act.gold = Gold::anomaly(AnomalyKind::miss); break;
	case Outcome::mult: act.gold = Gold::anomaly(AnomalyKind::mult); break;
	}
}

void apply_mult(ReferenceAct& act, Rng& rng, const SyntheticWorld& world) {
	// Position 0 is the query item itself; overwriting it would not create a duplicate.
	const std::size_t j = 1 + rng.below(act.items.size() - 1);
	const Item& q = act.items[0];
	act.items[j] = Item{q.object, fresh_image(rng, world, q.object, q.image_id), q.attribute};
}

ReferenceAct object_only_act(const SyntheticWorld& world, const DatasetSpec& spec, const std::string& split,
		std::size_t index) {
	Rng rng = act_rng(spec, split, index);
	ReferenceAct act;
	act.id = act_id(split, index);

	const auto len = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.min_len),
			static_cast<std::int64_t>(spec.max_len)));
	std::vector<std::size_t> chosen;
	auto fresh_object = [&]() {
		for (;;) {
			const std::size_t o = rng.below(world.objects.size());
			if (std::find(chosen.begin(), chosen.end(), o) == chosen.end())
				return o;
		}
	};
	for (std::size_t k = 0; k < len; ++k) {
		const std::size_t o = fresh_object();
		chosen.push_back(o);
		const auto& object = world.objects[o];
		act.items.push_back(Item{object, pick_image(rng, world, object), std::nullopt});
	}
	act.query = Query{act.items[0].object, std::nullopt};

	const Outcome outcome = draw_outcome(rng, spec);
	if (outcome == Outcome::miss) {
		const auto& object = world.objects[fresh_object()];
		act.items[0] = Item{object, pick_image(rng, world, object), std::nullopt};
	} else if (outcome == Outcome::mult) {
		apply_mult(act, rng, world);
	}
	finish_act(act, outcome, rng);
	return act;
}

constexpr int max_resamples = 1000;

ReferenceAct object_attribute_act(const SyntheticWorld& world, const DatasetSpec& spec, const std::string& split,
		std::size_t index) {
	Rng rng = act_rng(spec, split, index);
	ReferenceAct act;
	act.id = act_id(split, index);

	std::string o1, o2, o3, a1, a2, a3;
	bool ok = false;
	for (int attempt = 0; attempt < max_resamples && !ok; ++attempt) {
		o1 = pick(rng, world.objects);
		const auto& attrs = world.compat.at(o1);
		// Three distinct compatible attributes.
		std::array<std::size_t, 3> picks{};
		for (std::size_t k = 0; k < 3; ++k) {
			for (;;) {
				picks[k] = rng.below(attrs.size());
				if (std::find(picks.begin(), picks.begin() + k, picks[k]) == picks.begin() + k)
					break;
			}
		}
		a1 = attrs[picks[0]];
		a2 = attrs[picks[1]];
		a3 = attrs[picks[2]];

		// Partners must be compatible with both a1 and the linking attribute.
		auto partner = [&](const std::string& link, const std::string& avoid) -> std::optional<std::string> {
			const auto& linked = world.compat_inverse.at(link);
			const auto& with_a1 = world.compat_inverse.at(a1);
			std::vector<std::string> both;
			for (const auto& o : linked)
				if (o != o1 && o != avoid && std::find(with_a1.begin(), with_a1.end(), o) != with_a1.end())
					both.push_back(o);
			if (both.empty())
				return std::nullopt;
			return pick(rng, both);
		};
		auto p2 = partner(a2, "");
		if (!p2)
			continue;
		o2 = *p2;
		auto p3 = partner(a3, o2);
		if (!p3)
			p3 = partner(a3, "");
		if (!p3)
			continue;
		o3 = *p3;
		ok = true;
	}
	if (!ok)
		throw GenerationError("cannot satisfy compatibility constraints for act '" + act.id + "' (last object '" +
				o1 + "')");

	const std::string i1 = pick_image(rng, world, o1);
	std::vector<Item> pool = {
		{o1, pick_image(rng, world, o1), a2},
		{o2, pick_image(rng, world, o2), a1},
		{o2, pick_image(rng, world, o2), a2},
		{o1, pick_image(rng, world, o1), a3},
		{o3, pick_image(rng, world, o3), a1},
		{o3, pick_image(rng, world, o3), a3},
	};

	const auto len = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.min_len),
			static_cast<std::int64_t>(spec.max_len)));
	act.items.push_back(Item{o1, i1, a1});
	for (std::size_t k = 0; k + 1 < len; ++k) {
		const std::size_t j = k + rng.below(pool.size() - k);
		std::swap(pool[k], pool[j]);
		act.items.push_back(pool[k]);
	}
	act.query = Query{o1, a1};

	const Outcome outcome = draw_outcome(rng, spec);
	if (outcome == Outcome::miss) {
		for (;;) {
			const auto& o = pick(rng, world.objects);
			const auto& a = pick(rng, world.compat.at(o));
			if (o == o1 && a == a1)
				continue;
			act.items[0] = Item{o, pick_image(rng, world, o), a};
			break;
		}
	} else if (outcome == Outcome::mult) {
		apply_mult(act, rng, world);
	}
	finish_act(act, outcome, rng);
	return act;
}

} // namespace

std::vector<ReferenceAct> gen_object_only(const SyntheticWorld& world, const DatasetSpec& spec,
		const std::string& split, std::size_t count, std::size_t first) {
	validate_spec(spec);
	if (world.objects.size() < spec.max_len + 1)
		throw ConfigError("Object-Only generation needs at least max_len + 1 = " +
				std::to_string(spec.max_len + 1) + " objects, world has " + std::to_string(world.objects.size()));
	std::vector<ReferenceAct> acts;
	acts.reserve(count);
	for (std::size_t i = first; i < first + count; ++i) {
		acts.push_back(object_only_act(world, spec, split, i));
		validate_act(acts.back(), spec.max_len);
	}
	return acts;
}

std::vector<ReferenceAct> gen_object_attribute(const SyntheticWorld& world, const DatasetSpec& spec,
		const std::string& split, std::size_t count, std::size_t first) {
	validate_spec(spec);
	if (spec.max_len > 7)
		throw ConfigError("Object+Attribute generation supports at most 7 items (query + 6 confounders)");
	if (world.compat.size() != world.objects.size())
		throw ConfigError("Object+Attribute generation needs a compatibility set for every object");
	for (const auto& [object, attrs] : world.compat)
		if (attrs.size() < 3)
			throw ConfigError("object '" + object + "' has fewer than 3 compatible attributes");
	std::vector<ReferenceAct> acts;
	acts.reserve(count);
	for (std::size_t i = first; i < first + count; ++i) {
		acts.push_back(object_attribute_act(world, spec, split, i));
		validate_act(acts.back(), spec.max_len);
	}
	return acts;
}

std::vector<ReferenceAct> generate(Task task, const SyntheticWorld& world, const DatasetSpec& spec,
		const std::string& split, std::size_t count, std::size_t first) {
	return task == Task::object_only ? gen_object_only(world, spec, split, count, first)
			: gen_object_attribute(world, spec, split, count, first);
}

Splits generate_splits(Task task, const SyntheticWorld& world, const DatasetSpec& spec) {
	return Splits{
		generate(task, world, spec, "train", spec.train),
		generate(task, world, spec, "val", spec.val),
		generate(task, world, spec, "test", spec.test),
	};
}

std::string check_act(const ReferenceAct& act, std::size_t max_len) {
	const std::size_t n = act.items.size();
	if (n < 2 || n > max_len)
		return "sequence length " + std::to_string(n) + " outside [2, " + std::to_string(max_len) + "]";
	const bool attrs = act.query.attribute.has_value();
	for (const auto& item : act.items)
		if (item.attribute.has_value() != attrs)
			return "attribute fields must be all present or all absent";
	std::size_t match_count = 0;
	for (const auto& item : act.items)
		match_count += matches(act.query, item);
	if (act.gold.is_point()) {
		const std::size_t i = act.gold.index();
		if (i >= n)
			return "gold index " + std::to_string(i) + " out of range";
		if (!matches(act.query, act.items[i]))
			return "gold item does not match the query";
		if (match_count != 1)
			return "successful act has " + std::to_string(match_count) + " matching items";
	} else if (act.gold.anomaly_kind() == AnomalyKind::miss) {
		if (match_count != 0)
			return "missing-referent act has a matching item";
	} else if (match_count < 2) {
		return "multiple-referent act has fewer than 2 matching items";
	}
	return {};
}

void validate_act(const ReferenceAct& act, std::size_t max_len) {
	if (auto problem = check_act(act, max_len); !problem.empty())
		throw GenerationError("act '" + act.id + "': " + problem);
}

} // namespace pop
