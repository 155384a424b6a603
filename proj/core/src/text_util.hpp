#pragma once

// Internal string helpers shared by the core sources. ASCII-only case folding;
// UTF-8 bytes above 0x7F pass through untouched.

#include <string>
#include <string_view>
#include <vector>

namespace orderline::text {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Splits on runs of whitespace, dropping empty pieces.
inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && to_lower(a) == to_lower(b);
}

// Lowercase, trim, and collapse internal whitespace to single spaces.
inline std::string normalize_phrase(std::string_view s) {
    std::string out;
    for (const auto& piece : split_ws(s)) {
        if (!out.empty()) out.push_back(' ');
        out += to_lower(piece);
    }
    return out;
}

// Trailing punctuation recognised as clause or sentence ends, longest first so
// multi-byte marks match before their ASCII prefixes.
inline const std::vector<std::string_view>& clause_marks() {
    static const std::vector<std::string_view> marks = {
        "\xE2\x80\xA6",  // …
        "\xEF\xBC\x8C",  // ，
        "\xE3\x80\x82",  // 。
        "\xEF\xBC\x81",  // ！
        "\xEF\xBC\x9F",  // ？
        "\xEF\xBC\x9B",  // ；
        "\xEF\xBC\x9A",  // ：
        ",", ".", "!", "?", ";", ":"};
    return marks;
}

// Splits a whitespace-free token into its core and trailing clause punctuation.
inline std::pair<std::string_view, std::string_view> split_trailing_marks(std::string_view tok) {
    std::size_t end = tok.size();
    bool progressed = true;
    while (progressed && end > 0) {
        progressed = false;
        for (auto mark : clause_marks()) {
            if (end >= mark.size() && tok.substr(end - mark.size(), mark.size()) == mark) {
                end -= mark.size();
                progressed = true;
                break;
            }
        }
    }
    return {tok.substr(0, end), tok.substr(end)};
}

}  // namespace orderline::text
