#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace agf {

enum class Severity { low = 0, medium = 1, high = 2 };
enum class SourceKind { ids, edr };

std::string_view to_string(Severity s) noexcept;
std::string_view to_string(SourceKind k) noexcept;

/// Case-insensitive; accepts low/medium/high only.
std::optional<Severity> parse_severity(std::string_view text) noexcept;
std::optional<SourceKind> parse_source_kind(std::string_view text) noexcept;

}  // namespace agf
