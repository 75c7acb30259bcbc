#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace casework {

// ASCII-only case folding keeps byte offsets stable between the original and
// the folded text, which every HighlightSpan depends on.
std::string to_lower_ascii(std::string_view text);

std::string_view trim(std::string_view text);

bool is_ascii_alpha(char c);
bool is_ascii_digit(char c);

/// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

/// 1..12 for a capitalized English month name, nullopt otherwise.
std::optional<int> month_ordinal(std::string_view month);

/// ISO-8601 UTC timestamp with second precision, e.g. 2024-03-01T12:00:00Z.
std::string utc_timestamp_now();

}  // namespace casework
