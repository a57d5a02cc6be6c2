#ifndef POP_NUMERICS_HPP_
#define POP_NUMERICS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pop {

using Vector = std::vector<double>;

/**
 * Dense row-major matrix. All matrices in this project are small (at most a
 * few thousand columns), so there is no sparse or blocked storage.
 */
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
	Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

	std::size_t rows() const noexcept { return rows_; }
	std::size_t cols() const noexcept { return cols_; }
	std::size_t size() const noexcept { return data_.size(); }

	double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
	double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

	std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
	std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

	std::span<double> data() noexcept { return data_; }
	std::span<const double> data() const noexcept { return data_; }

	void fill(double value);
	bool all_finite() const noexcept;

	bool operator==(const Matrix&) const = default;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

/// m * v. Throws ContractError when v.size() != m.cols().
Vector matvec(const Matrix& m, std::span<const double> v);
/// m^T * v. Throws ContractError when v.size() != m.rows().
Vector matvec_transposed(const Matrix& m, std::span<const double> v);
/// m += scale * (u outer v).
void add_outer(Matrix& m, double scale, std::span<const double> u, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
/// Cosine similarity; defined as 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);
/// y += scale * x
void axpy(double scale, std::span<const double> x, std::span<double> y);
Vector concat(std::span<const double> a, std::span<const double> b);

Vector relu(std::span<const double> v);
double relu_derivative(double x) noexcept;
double sigmoid(double x) noexcept;
/// Max-subtracted softmax. Throws ContractError on empty input.
Vector softmax(std::span<const double> v);

/// Index of the largest entry, lowest index on ties. Throws ContractError on empty input.
std::size_t argmax(std::span<const double> v);

/**
 * Central finite-difference gradient of f at x, one coordinate at a time:
 * (f(x + h e_i) - f(x - h e_i)) / 2h.
 */
Vector finite_diff_grad(const std::function<double(std::span<const double>)>& f,
		std::span<const double> x, double h = 1e-5);

/// |a - b| / max(1, |a|, |b|), the metric used by every gradient check.
double relative_error(double a, double b) noexcept;

} // namespace pop

#endif
