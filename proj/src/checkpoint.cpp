#include "pop/checkpoint.hpp"

#include <cmath>
#include <sstream>

#include "pop/error.hpp"
#include "pop/text_io.hpp"

namespace pop {

namespace {
constexpr const char* magic = "pop-checkpoint 1";
}

const Matrix& Checkpoint::matrix(const std::string& name) const {
	for (const auto& [n, m] : matrices)
		if (n == name)
			return m;
	throw ParseError("checkpoint has no matrix '" + name + "'", 0);
}

bool Checkpoint::has_matrix(const std::string& name) const {
	for (const auto& entry : matrices)
		if (entry.first == name)
			return true;
	return false;
}

const std::string& Checkpoint::meta_at(const std::string& key) const {
	auto it = meta.find(key);
	if (it == meta.end())
		throw ParseError("checkpoint has no meta key '" + key + "'", 0);
	return it->second;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
	std::string out = std::string(magic) + "\nkind " + ckpt.kind + "\n";
	for (const auto& [key, value] : ckpt.meta)
		out += "meta " + key + " " + value + "\n";
	for (const auto& [name, m] : ckpt.matrices) {
		out += "matrix " + name + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
		for (std::size_t r = 0; r < m.rows(); ++r) {
			for (std::size_t c = 0; c < m.cols(); ++c) {
				if (c)
					out += ' ';
				out += format_double(m(r, c));
			}
			out += '\n';
		}
	}
	out += "end\n";
	return out;
}

Checkpoint parse_checkpoint(const std::string& text) {
	std::istringstream in(text);
	std::string line;
	std::size_t line_no = 0;
	auto next = [&]() -> bool {
		if (!std::getline(in, line))
			return false;
		++line_no;
		return true;
	};
	if (!next() || trim(line) != magic)
		throw ParseError("not a checkpoint (missing '" + std::string(magic) + "')", 1);
	Checkpoint ckpt;
	bool ended = false;
	while (next()) {
		auto fields = split_whitespace(line);
		if (fields.empty())
			continue;
		if (fields[0] == "end") {
			ended = true;
			break;
		}
		if (fields[0] == "kind" && fields.size() == 2) {
			ckpt.kind = fields[1];
		} else if (fields[0] == "meta" && fields.size() >= 2) {
			std::string_view rest = trim(line);
			rest.remove_prefix(4);
			rest = trim(rest);
			const auto sp = rest.find(' ');
			std::string key(rest.substr(0, sp));
			std::string value = sp == std::string_view::npos ? "" : std::string(trim(rest.substr(sp + 1)));
			ckpt.meta[key] = value;
		} else if (fields[0] == "matrix" && fields.size() == 4) {
			auto rows = parse_size(fields[2]);
			auto cols = parse_size(fields[3]);
			if (!rows || !cols)
				throw ParseError("bad matrix shape", line_no);
			std::string name(fields[1]);
			Matrix m(*rows, *cols);
			for (std::size_t r = 0; r < *rows; ++r) {
				if (!next())
					throw ParseError("truncated matrix '" + name + "'", line_no);
				auto values = split_whitespace(line);
				if (values.size() != *cols)
					throw ParseError("matrix '" + name + "' row has " + std::to_string(values.size()) +
							" values, expected " + std::to_string(*cols), line_no);
				for (std::size_t c = 0; c < *cols; ++c) {
					auto v = parse_double(values[c]);
					if (!v || !std::isfinite(*v))
						throw ParseError("bad number '" + std::string(values[c]) + "'", line_no);
					m(r, c) = *v;
				}
			}
			ckpt.matrices.emplace_back(std::move(name), std::move(m));
		} else {
			throw ParseError("unrecognized checkpoint line", line_no);
		}
	}
	if (!ended)
		throw ParseError("checkpoint missing 'end'", line_no);
	if (ckpt.kind.empty())
		throw ParseError("checkpoint missing 'kind'", line_no);
	return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
	write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
	return parse_checkpoint(read_file(path));
}

} // namespace pop
