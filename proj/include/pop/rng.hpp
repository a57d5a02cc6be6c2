#ifndef POP_RNG_HPP_
#define POP_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace pop {

/// One step of SplitMix64 (Steele, Lea & Flood). Used for seeding and hashing.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a seed with a stream index; children of one master never collide in practice.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
/// Mixes a seed with a string (FNV-1a of the bytes, then SplitMix64 finalization).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept;

/**
 * xoshiro256** (Blackman & Vigna, 2018), state filled from the 64-bit seed by
 * four SplitMix64 steps. Uniform reals, bounded integers, normals and
 * shuffles are all implemented here, not through <random> distributions.
 *
 * Single-owner: fork() children instead of sharing one generator.
 */
class Rng {
public:
	using result_type = std::uint64_t;

	explicit Rng(std::uint64_t seed = 0) noexcept;

	static constexpr result_type min() noexcept { return 0; }
	static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

	std::uint64_t seed() const noexcept { return seed_; }

	result_type operator()() noexcept { return next(); }
	std::uint64_t next() noexcept;

	/// Uniform in [0, 1) with 53 random bits.
	double uniform() noexcept;
	/// Uniform in [lo, hi).
	double uniform(double lo, double hi) noexcept;
	/// Uniform integer in [0, n). n must be > 0. Unbiased (Lemire's method with rejection).
	std::uint64_t below(std::uint64_t n) noexcept;
	/// Uniform integer in [lo, hi], inclusive.
	std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept;
	/// Standard normal via the Marsaglia polar method.
	double normal() noexcept;
	bool bernoulli(double p) noexcept { return uniform() < p; }

	/// Fisher-Yates shuffle.
	template<typename T>
	void shuffle(std::span<T> items) noexcept {
		for (std::size_t i = items.size(); i > 1; --i) {
			const std::size_t j = below(i);
			std::swap(items[i - 1], items[j]);
		}
	}

	/// Child generator seeded from this one's stream.
	Rng fork() noexcept { return Rng(next()); }

private:
	std::uint64_t seed_;
	std::array<std::uint64_t, 4> s_;
	double spare_normal_ = 0.0;
	bool has_spare_ = false;
};

} // namespace pop

#endif
