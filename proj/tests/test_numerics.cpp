#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pop/error.hpp"
#include "pop/numerics.hpp"
#include "pop/rng.hpp"

using namespace pop;

namespace {

// Plain-loop softmax used as the reference.
std::vector<double> scalar_softmax(const std::vector<double>& v) {
	double z = 0.0;
	for (double x : v)
		z += std::exp(x);
	std::vector<double> out;
	for (double x : v)
		out.push_back(std::exp(x) / z);
	return out;
}

} // namespace

TEST(Matvec, Examples) {
	Matrix id(2, 2, {1, 0, 0, 1});
	EXPECT_EQ(matvec(id, Vector{3, 4}), (Vector{3, 4}));
	EXPECT_EQ(matvec(Matrix(3, 2), Vector{5, -7}), (Vector{0, 0, 0}));
	EXPECT_EQ(matvec(Matrix(2, 2, {1, 2, 3, 4}), Vector{1, 1}), (Vector{3, 7}));
}

TEST(Matvec, DimensionMismatchThrows) {
	EXPECT_THROW(matvec(Matrix(2, 3), Vector{1, 2}), ContractError);
	EXPECT_THROW(matvec_transposed(Matrix(2, 3), Vector{1, 2, 3}), ContractError);
}

TEST(Matvec, Linearity) {
	Rng rng(7);
	for (int trial = 0; trial < 50; ++trial) {
		Matrix m(4, 3);
		for (double& x : m.data())
			x = rng.normal();
		Vector u(3), v(3);
		for (auto& x : u) x = rng.normal();
		for (auto& x : v) x = rng.normal();
		const double a = rng.normal(), b = rng.normal();
		Vector mix(3);
		for (int i = 0; i < 3; ++i)
			mix[i] = a * u[i] + b * v[i];
		const Vector lhs = matvec(m, mix);
		const Vector mu = matvec(m, u), mv = matvec(m, v);
		for (int r = 0; r < 4; ++r)
			EXPECT_NEAR(lhs[r], a * mu[r] + b * mv[r], 1e-10);
	}
}

TEST(Matvec, TransposedMatchesExplicit) {
	Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
	EXPECT_EQ(matvec_transposed(m, Vector{1, -1}), (Vector{-3, -3, -3}));
}

TEST(Relu, Examples) {
	EXPECT_EQ(relu(Vector{-1, 0, 2}), (Vector{0, 0, 2}));
	EXPECT_EQ(relu(Vector{-3, -0.5}), (Vector{0, 0}));
	EXPECT_EQ(relu(Vector{0, 1.5, 4}), (Vector{0, 1.5, 4}));
}

TEST(Sigmoid, Examples) {
	EXPECT_EQ(sigmoid(0.0), 0.5);
	EXPECT_NEAR(sigmoid(4.0), 0.982013, 1e-6);
	for (double x : {-30.0, -3.3, -0.1, 0.7, 12.0, 700.0})
		EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-12);
	EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
}

TEST(Softmax, Examples) {
	EXPECT_EQ(softmax(Vector{0, 0, 0, 0}), (Vector{0.25, 0.25, 0.25, 0.25}));
	const Vector p = softmax(Vector{2, 6, 0, 0.5});
	const Vector ref = scalar_softmax({2, 6, 0, 0.5});
	const Vector frozen{0.01787, 0.97573, 0.00242, 0.00399};
	for (int i = 0; i < 4; ++i) {
		EXPECT_NEAR(p[i], ref[i], 1e-15);
		EXPECT_NEAR(p[i], frozen[i], 1e-5);
	}
}

TEST(Softmax, ShiftInvarianceAndNormalization) {
	Rng rng(3);
	for (int trial = 0; trial < 100; ++trial) {
		Vector v(1 + rng.below(8));
		for (auto& x : v) x = 10 * rng.normal();
		const double c = 50 * rng.normal();
		Vector shifted = v;
		for (auto& x : shifted) x += c;
		const Vector a = softmax(v), b = softmax(shifted);
		double sum = 0.0;
		for (std::size_t i = 0; i < v.size(); ++i) {
			EXPECT_NEAR(a[i], b[i], 1e-12);
			EXPECT_GT(a[i], 0.0);
			sum += a[i];
		}
		EXPECT_NEAR(sum, 1.0, 1e-12);
	}
}

TEST(Softmax, EmptyThrows) {
	EXPECT_THROW(softmax(Vector{}), ContractError);
	EXPECT_THROW(argmax(Vector{}), ContractError);
}

TEST(Argmax, LowestIndexWinsTies) {
	EXPECT_EQ(argmax(Vector{1, 3, 3, 2}), 1u);
	EXPECT_EQ(argmax(Vector{5, 5}), 0u);
}

TEST(Cosine, ZeroNormAndScaling) {
	EXPECT_EQ(cosine(Vector{0, 0}, Vector{1, 2}), 0.0);
	const Vector u{1, 2, -1}, v{0.5, -3, 2};
	EXPECT_NEAR(cosine(u, Vector{2.5 * v[0], 2.5 * v[1], 2.5 * v[2]}), cosine(u, v), 1e-15);
	EXPECT_NEAR(cosine(u, u), 1.0, 1e-15);
}

TEST(FiniteDiff, Examples) {
	const Vector g = finite_diff_grad([](std::span<const double> x) { return x[0] * x[0]; }, Vector{3.0});
	EXPECT_NEAR(g[0], 6.0, 1e-8);
	const Vector z = finite_diff_grad([](std::span<const double>) { return 4.2; }, Vector{1, 2, 3});
	EXPECT_EQ(z, (Vector{0, 0, 0}));
}

TEST(RelativeError, Definition) {
	EXPECT_EQ(relative_error(0.5, 0.25), 0.25);
	EXPECT_EQ(relative_error(100.0, 99.0), 0.01);
}

TEST(Rng, SameSeedSameStream) {
	Rng a(12345), b(12345), c(12346);
	bool differs = false;
	for (int i = 0; i < 10000; ++i) {
		const auto x = a.next();
		EXPECT_EQ(x, b.next());
		differs |= x != c.next();
	}
	EXPECT_TRUE(differs);
}

TEST(Rng, KnownPrefix) {
	// splitmix64 reference outputs for state 0.
	std::uint64_t state = 0;
	EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
	EXPECT_EQ(splitmix64(state), 0x6e789e6aa1b965f4ULL);
}

TEST(Rng, BoundedDrawsInRange) {
	Rng rng(9);
	std::vector<int> hist(7, 0);
	for (int i = 0; i < 70000; ++i)
		++hist[rng.below(7)];
	for (int h : hist)
		EXPECT_NEAR(h, 10000, 400);
	for (int i = 0; i < 1000; ++i) {
		const auto v = rng.between(-2, 3);
		EXPECT_GE(v, -2);
		EXPECT_LE(v, 3);
		const double u = rng.uniform();
		EXPECT_GE(u, 0.0);
		EXPECT_LT(u, 1.0);
	}
}

TEST(Rng, NormalMoments) {
	Rng rng(11);
	double s = 0, s2 = 0;
	const int n = 100000;
	for (int i = 0; i < n; ++i) {
		const double x = rng.normal();
		s += x;
		s2 += x * x;
	}
	EXPECT_NEAR(s / n, 0.0, 0.015);
	EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsDiffer) {
	EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(1, std::uint64_t{1}));
	EXPECT_NE(derive_seed(1, "train"), derive_seed(1, "test"));
	EXPECT_EQ(derive_seed(5, "x"), derive_seed(5, "x"));
}
