#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hydrolstm {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_number(std::string_view text);

}  // namespace hydrolstm
