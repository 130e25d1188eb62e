#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "hydrolstm/lstm.hpp"

namespace hydrolstm {

/// Model parameters plus free-form string metadata (sequence length, normalization, split).
///
/// Text format, one item per line, numbers in shortest round-trip form:
///
///     hydrolstm-checkpoint 1
///     input_dim 5
///     hidden 10
///     meta <key> <value>          (zero or more, sorted by key)
///     tensor <name> <rows> <cols> (then `rows` lines of `cols` values)
///     ...
///     end
///
/// Tensors appear in the order W_i W_f W_g W_o U_i U_f U_g U_o b_i b_f b_g b_o w_d b_d,
/// all row-major (W_x is hidden x input_dim, U_x is hidden x hidden, b_x and w_d are 1 x hidden).
struct Checkpoint {
    ModelParams params;
    std::map<std::string, std::string> metadata;

    std::optional<std::string> meta(const std::string& key) const;
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hydrolstm
