#include "pop/rng.hpp"

#include <cmath>

namespace pop {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
	return (x << k) | (x >> (64 - k));
}

} // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
	std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
	std::uint64_t state = master ^ rotl(stream * 0xd1b54a32d192ed03ULL, 17);
	splitmix64(state);
	return splitmix64(state);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept {
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char c : stream) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	return derive_seed(master, h);
}

Rng::Rng(std::uint64_t seed) noexcept : seed_(seed) {
	std::uint64_t state = seed;
	for (auto& word : s_)
		word = splitmix64(state);
}

std::uint64_t Rng::next() noexcept {
	const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
	const std::uint64_t t = s_[1] << 17;
	s_[2] ^= s_[0];
	s_[3] ^= s_[1];
	s_[1] ^= s_[2];
	s_[0] ^= s_[3];
	s_[2] ^= t;
	s_[3] = rotl(s_[3], 45);
	return result;
}

double Rng::uniform() noexcept {
	return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
	return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
	unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
	auto low = static_cast<std::uint64_t>(m);
	if (low < n) {
		const std::uint64_t threshold = (0 - n) % n;
		while (low < threshold) {
			m = static_cast<unsigned __int128>(next()) * n;
			low = static_cast<std::uint64_t>(m);
		}
	}
	return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) noexcept {
	return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::normal() noexcept {
	if (has_spare_) {
		has_spare_ = false;
		return spare_normal_;
	}
	double u, v, s;
	do {
		u = uniform(-1.0, 1.0);
		v = uniform(-1.0, 1.0);
		s = u * u + v * v;
	} while (s >= 1.0 || s == 0.0);
	const double scale = std::sqrt(-2.0 * std::log(s) / s);
	spare_normal_ = v * scale;
	has_spare_ = true;
	return u * scale;
}

} // namespace pop
