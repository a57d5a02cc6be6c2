#ifndef POP_CHECKPOINT_HPP_
#define POP_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pop/numerics.hpp"

namespace pop {

/**
 * Textual parameter container shared by all trainable models.
 *
 *     pop-checkpoint 1
 *     kind <model kind>
 *     meta <key> <value to end of line>
 *     matrix <name> <rows> <cols>
 *     <cols values>            (one line per row)
 *     end
 *
 * Numbers are written in shortest round-trip form, so load(save(x)) is bit-exact.
 */
struct Checkpoint {
	std::string kind;
	std::map<std::string, std::string> meta;
	std::vector<std::pair<std::string, Matrix>> matrices;

	const Matrix& matrix(const std::string& name) const;
	bool has_matrix(const std::string& name) const;
	const std::string& meta_at(const std::string& key) const;

	bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace pop

#endif
