#pragma once

#include <cstdint>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orderline/symbols.hpp"

namespace orderline {

/// Noise injection settings. Probabilities are per token: a filler before the
/// token, a swap of its trailing punctuation, a code-mix substitution.
struct NoiseSpec {
    std::uint64_t seed = 0;
    std::vector<std::string> modal_lexicon;
    std::vector<std::string> punctuation_variants;
    std::vector<std::pair<std::string, std::string>> code_mix_lexicon;  // lowercase word -> replacement
    double filler_probability = 0.3;
    double punctuation_probability = 0.3;
    double code_mix_probability = 0.1;

    static NoiseSpec defaults(std::uint64_t seed = 0);
    static NoiseSpec none(std::uint64_t seed = 0);  // all probabilities 0

    void validate() const;  // throws ConfigError
};

// Loaders for one-entry-per-line UTF-8 lexicon files (`#` comments). Code-mix
// lines are `word<TAB>replacement`.
std::vector<std::string> load_word_list(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> load_code_mix(const std::filesystem::path& path);

/// Tokens noise must leave alone: anything matching a pattern (numerals and
/// ticker codes by default) and every token inside a directory alias span.
class ProtectedTokens {
public:
    static ProtectedTokens standard(const SymbolDirectory& directory);

    void add_pattern(const std::string& regex);

    // Flags per whitespace-separated token of `text`.
    std::vector<bool> mark(const std::vector<std::string>& raw_tokens) const;

private:
    std::vector<std::regex> patterns_;
    const SymbolDirectory* directory_ = nullptr;
};

/// Seeded and deterministic. Works on whitespace token boundaries and keeps
/// the original spacing, so a spec with all probabilities 0 is the identity.
std::string inject_noise(std::string_view text, const NoiseSpec& spec,
                         const ProtectedTokens& protect);

struct Segment {
    std::string text;       // words of the segment, boundary punctuation excluded
    std::string separator;  // boundary punctuation plus following whitespace

    // Text as a standalone sentence: keeps a sentence-final mark, otherwise ends with ".".
    std::string as_sentence() const;
    bool operator==(const Segment&) const = default;
};

/// Splits at the clause boundary nearest `target_words` within
/// [target-1, target+2] words, cutting hard at `target_words` when there is
/// none. Every segment has at most target+2 words and text+separator
/// concatenated over all segments reproduces the input.
std::vector<Segment> slice(std::string_view text, std::size_t target_words = 10);

std::size_t word_count(std::string_view text);

}  // namespace orderline
