#ifndef POP_ERROR_HPP_
#define POP_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Violated precondition: dimension mismatch, empty input, bad index.
class ContractError : public Error {
public:
	using Error::Error;
};

/// Invalid world, dataset or training configuration.
class ConfigError : public Error {
public:
	using Error::Error;
};

/// Malformed input file. Carries the 1-based line number (0 if not line-bound).
class ParseError : public Error {
public:
	ParseError(const std::string& what, std::size_t line) :
			Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) { }
	std::size_t line() const noexcept { return line_; }
private:
	std::size_t line_;
};

/// A token or image id cannot be turned into a vector.
class EncodingError : public Error {
public:
	using Error::Error;
};

/// Sampling constraints could not be satisfied.
class GenerationError : public Error {
public:
	using Error::Error;
};

/// Input kind a predictor does not handle (e.g. attributes for the CNN baseline).
class UnsupportedInputError : public Error {
public:
	using Error::Error;
};

/// Non-finite loss or failed gradient check.
class NumericError : public Error {
public:
	using Error::Error;
};

} // namespace pop

#endif
