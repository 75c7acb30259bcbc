#pragma once

#include <bitset>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

/// A keyword from the semantic tables: literal characters plus optional
/// bracketed character classes such as `[5-9]`, so "age [5-9]" matches
/// "age 7". Matching is a substring search over already-lowercased text.
///
/// A class that can match a digit and sits at either edge of the keyword must
/// not be adjacent to another digit in the text, so "[5-9] years old" does not
/// fire inside "15 years old". With `whole_word`, the match must also be
/// bounded by non-alphanumeric characters.
class KeywordPattern {
public:
    struct Match {
        std::size_t start;
        std::size_t end;
    };

    static KeywordPattern compile(std::string_view keyword, bool whole_word = false);

    std::optional<Match> find(std::string_view lowered_text, std::size_t from = 0) const;

    const std::string& source() const noexcept { return source_; }

private:
    using Atom = std::bitset<256>;

    bool matches_at(std::string_view text, std::size_t pos) const;

    std::string source_;
    std::vector<Atom> atoms_;
    bool whole_word_ = false;
    bool digit_guard_front_ = false;
    bool digit_guard_back_ = false;
};

}  // namespace casework
