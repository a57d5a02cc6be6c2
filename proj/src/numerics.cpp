#include "pop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pop/error.hpp"

namespace pop {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) :
		rows_(rows), cols_(cols), data_(rows * cols, fill) { }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries) :
		rows_(rows), cols_(cols), data_(std::move(entries)) {
	if (data_.size() != rows * cols)
		throw ContractError("matrix entries: expected " + std::to_string(rows * cols) +
				", got " + std::to_string(data_.size()));
}

void Matrix::fill(double value) {
	std::fill(data_.begin(), data_.end(), value);
}

bool Matrix::all_finite() const noexcept {
	return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Vector matvec(const Matrix& m, std::span<const double> v) {
	if (v.size() != m.cols())
		throw ContractError("matvec: vector length " + std::to_string(v.size()) +
				" does not match matrix columns " + std::to_string(m.cols()));
	Vector out(m.rows(), 0.0);
	for (std::size_t r = 0; r < m.rows(); ++r)
		out[r] = dot(m.row(r), v);
	return out;
}

Vector matvec_transposed(const Matrix& m, std::span<const double> v) {
	if (v.size() != m.rows())
		throw ContractError("matvec_transposed: vector length " + std::to_string(v.size()) +
				" does not match matrix rows " + std::to_string(m.rows()));
	Vector out(m.cols(), 0.0);
	for (std::size_t r = 0; r < m.rows(); ++r)
		axpy(v[r], m.row(r), out);
	return out;
}

void add_outer(Matrix& m, double scale, std::span<const double> u, std::span<const double> v) {
	if (u.size() != m.rows() || v.size() != m.cols())
		throw ContractError("add_outer: shape mismatch");
	for (std::size_t r = 0; r < m.rows(); ++r) {
		const double s = scale * u[r];
		if (s != 0.0)
			axpy(s, v, m.row(r));
	}
}

double dot(std::span<const double> a, std::span<const double> b) {
	if (a.size() != b.size())
		throw ContractError("dot: length mismatch");
	double acc = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i)
		acc += a[i] * b[i];
	return acc;
}

double norm(std::span<const double> v) {
	return std::sqrt(dot(v, v));
}

double cosine(std::span<const double> a, std::span<const double> b) {
	const double na = norm(a);
	const double nb = norm(b);
	if (na == 0.0 || nb == 0.0)
		return 0.0;
	return dot(a, b) / (na * nb);
}

void axpy(double scale, std::span<const double> x, std::span<double> y) {
	if (x.size() != y.size())
		throw ContractError("axpy: length mismatch");
	for (std::size_t i = 0; i < x.size(); ++i)
		y[i] += scale * x[i];
}

Vector concat(std::span<const double> a, std::span<const double> b) {
	Vector out(a.begin(), a.end());
	out.insert(out.end(), b.begin(), b.end());
	return out;
}

Vector relu(std::span<const double> v) {
	Vector out(v.size());
	std::transform(v.begin(), v.end(), out.begin(), [](double x) { return x > 0.0 ? x : 0.0; });
	return out;
}

double relu_derivative(double x) noexcept {
	return x > 0.0 ? 1.0 : 0.0;
}

double sigmoid(double x) noexcept {
	// Two branches keep exp() from overflowing for large |x|.
	if (x >= 0.0)
		return 1.0 / (1.0 + std::exp(-x));
	const double e = std::exp(x);
	return e / (1.0 + e);
}

Vector softmax(std::span<const double> v) {
	if (v.empty())
		throw ContractError("softmax: empty input");
	const double mx = *std::max_element(v.begin(), v.end());
	Vector out(v.size());
	double sum = 0.0;
	for (std::size_t i = 0; i < v.size(); ++i) {
		out[i] = std::exp(v[i] - mx);
		sum += out[i];
	}
	for (double& x : out)
		x /= sum;
	return out;
}

std::size_t argmax(std::span<const double> v) {
	if (v.empty())
		throw ContractError("argmax: empty input");
	std::size_t best = 0;
	for (std::size_t i = 1; i < v.size(); ++i)
		if (v[i] > v[best])
			best = i;
	return best;
}

Vector finite_diff_grad(const std::function<double(std::span<const double>)>& f,
		std::span<const double> x, double h) {
	if (!(h > 0.0))
		throw ContractError("finite_diff_grad: step must be positive");
	Vector probe(x.begin(), x.end());
	Vector grad(x.size());
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double orig = probe[i];
		probe[i] = orig + h;
		const double plus = f(probe);
		probe[i] = orig - h;
		const double minus = f(probe);
		probe[i] = orig;
		grad[i] = (plus - minus) / (2.0 * h);
	}
	return grad;
}

double relative_error(double a, double b) noexcept {
	return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace pop
