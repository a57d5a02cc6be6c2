#ifndef POP_REFERENCE_ACT_HPP_
#define POP_REFERENCE_ACT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pop {

enum class AnomalyKind { miss, mult };

/// Gold outcome of a reference act: the referent's position, or an anomaly.
class Gold {
public:
	static Gold point(std::size_t index) { return Gold(index, std::nullopt); }
	static Gold anomaly(AnomalyKind kind) { return Gold(std::nullopt, kind); }

	bool is_point() const noexcept { return index_.has_value(); }
	bool is_anomaly() const noexcept { return anomaly_.has_value(); }
	std::size_t index() const { return index_.value(); }
	AnomalyKind anomaly_kind() const { return anomaly_.value(); }

	bool operator==(const Gold&) const = default;

private:
	Gold(std::optional<std::size_t> index, std::optional<AnomalyKind> anomaly) :
			index_(index), anomaly_(anomaly) { }
	std::optional<std::size_t> index_;
	std::optional<AnomalyKind> anomaly_;
};

struct Query {
	std::string noun;
	std::optional<std::string> attribute;
	bool operator==(const Query&) const = default;
};

struct Item {
	std::string object;
	std::string image_id;
	std::optional<std::string> attribute;
	bool operator==(const Item&) const = default;
};

/// One query plus its candidate sequence and gold outcome.
struct ReferenceAct {
	std::string id;
	Query query;
	std::vector<Item> items;
	Gold gold = Gold::anomaly(AnomalyKind::miss);
	bool operator==(const ReferenceAct&) const = default;
};

/// True iff the item denotes the query: same object, and same attribute when the query has one.
bool matches(const Query& query, const Item& item);

/// Model output: point at a candidate, or protest. Baselines may emit
/// indices beyond the sequence; those are simply scored wrong.
class Prediction {
public:
	static Prediction point(std::size_t index) { return Prediction(index); }
	static Prediction protest() { return Prediction(std::nullopt); }

	bool is_protest() const noexcept { return !index_.has_value(); }
	bool is_point() const noexcept { return index_.has_value(); }
	std::size_t index() const { return index_.value(); }

	bool operator==(const Prediction&) const = default;

private:
	explicit Prediction(std::optional<std::size_t> index) : index_(index) { }
	std::optional<std::size_t> index_;
};

} // namespace pop

#endif
