#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agf::detail {

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
/// nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);

std::string csv_escape(std::string_view field);

std::string trim(std::string_view s);
std::vector<std::string> split_list(std::string_view s, char sep);

}  // namespace agf::detail
