#include "casework/keyword_pattern.hpp"

#include "casework/errors.hpp"
#include "casework/text_util.hpp"

namespace casework {

namespace {

bool is_word_char(char c) { return is_ascii_alpha(c) || is_ascii_digit(c); }

bool atom_has_digit(const std::bitset<256>& atom) {
    for (char d = '0'; d <= '9'; ++d) {
        if (atom.test(static_cast<unsigned char>(d))) return true;
    }
    return false;
}

}  // namespace

KeywordPattern KeywordPattern::compile(std::string_view keyword, bool whole_word) {
    KeywordPattern p;
    p.source_ = std::string(keyword);
    p.whole_word_ = whole_word;
    const std::string lowered = to_lower_ascii(keyword);
    std::vector<bool> is_class;

    for (std::size_t i = 0; i < lowered.size(); ++i) {
        Atom atom;
        const char c = lowered[i];
        if (c == '\\' && i + 1 < lowered.size()) {
            atom.set(static_cast<unsigned char>(lowered[++i]));
            is_class.push_back(false);
        } else if (c == '[') {
            const auto close = lowered.find(']', i + 1);
            if (close == std::string::npos || close == i + 1) {
                throw ConfigError("unterminated character class in keyword '" + p.source_ + "'");
            }
            for (std::size_t k = i + 1; k < close; ++k) {
                const auto lo = static_cast<unsigned char>(lowered[k]);
                if (k + 2 < close && lowered[k + 1] == '-') {
                    const auto hi = static_cast<unsigned char>(lowered[k + 2]);
                    if (hi < lo) throw ConfigError("bad range in keyword '" + p.source_ + "'");
                    for (unsigned v = lo; v <= hi; ++v) atom.set(v);
                    k += 2;
                } else {
                    atom.set(lo);
                }
            }
            i = close;
            is_class.push_back(true);
        } else {
            atom.set(static_cast<unsigned char>(c));
            is_class.push_back(false);
        }
        p.atoms_.push_back(atom);
    }
    if (p.atoms_.empty()) throw ConfigError("empty keyword");

    p.digit_guard_front_ = is_class.front() && atom_has_digit(p.atoms_.front());
    p.digit_guard_back_ = is_class.back() && atom_has_digit(p.atoms_.back());
    return p;
}

bool KeywordPattern::matches_at(std::string_view text, std::size_t pos) const {
    if (pos + atoms_.size() > text.size()) return false;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        if (!atoms_[k].test(static_cast<unsigned char>(text[pos + k]))) return false;
    }
    const std::size_t end = pos + atoms_.size();
    const bool has_before = pos > 0;
    const bool has_after = end < text.size();
    if (digit_guard_front_ && has_before && is_ascii_digit(text[pos - 1])) return false;
    if (digit_guard_back_ && has_after && is_ascii_digit(text[end])) return false;
    if (whole_word_) {
        if (has_before && is_word_char(text[pos - 1]) && is_word_char(text[pos])) return false;
        if (has_after && is_word_char(text[end]) && is_word_char(text[end - 1])) return false;
    }
    return true;
}

std::optional<KeywordPattern::Match> KeywordPattern::find(std::string_view lowered_text,
                                                          std::size_t from) const {
    for (std::size_t pos = from; pos + atoms_.size() <= lowered_text.size(); ++pos) {
        if (matches_at(lowered_text, pos)) return Match{pos, pos + atoms_.size()};
    }
    return std::nullopt;
}

}  // namespace casework
