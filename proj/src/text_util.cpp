#include "casework/text_util.hpp"

#include <array>
#include <chrono>
#include <ctime>

namespace casework {

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string_view trim(std::string_view text) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

std::string sanitize_utf8(std::string_view bytes) {
    static constexpr std::string_view replacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    auto cont = [&](std::size_t k) {
        return k < n && (static_cast<unsigned char>(bytes[k]) & 0xC0) == 0x80;
    };
    while (i < n) {
        const auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        if (c < 0x80) {
            len = 1;
        } else if (c >= 0xC2 && c <= 0xDF) {
            if (cont(i + 1)) len = 2;
        } else if (c >= 0xE0 && c <= 0xEF) {
            if (cont(i + 1) && cont(i + 2)) {
                const auto c1 = static_cast<unsigned char>(bytes[i + 1]);
                const bool overlong = c == 0xE0 && c1 < 0xA0;
                const bool surrogate = c == 0xED && c1 > 0x9F;
                if (!overlong && !surrogate) len = 3;
            }
        } else if (c >= 0xF0 && c <= 0xF4) {
            if (cont(i + 1) && cont(i + 2) && cont(i + 3)) {
                const auto c1 = static_cast<unsigned char>(bytes[i + 1]);
                const bool overlong = c == 0xF0 && c1 < 0x90;
                const bool too_big = c == 0xF4 && c1 > 0x8F;
                if (!overlong && !too_big) len = 4;
            }
        }
        if (len == 0) {
            out += replacement;
            ++i;
        } else {
            out.append(bytes.substr(i, len));
            i += len;
        }
    }
    return out;
}

std::optional<int> month_ordinal(std::string_view month) {
    static constexpr std::array<std::string_view, 12> names = {
        "January", "February", "March",     "April",   "May",      "June",
        "July",    "August",   "September", "October", "November", "December"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == month) return static_cast<int>(i + 1);
    }
    return std::nullopt;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace casework
