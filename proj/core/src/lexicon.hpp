#pragma once

// Token-level analysis of trade utterances shared by the rule provider, the
// intent classifier and answer merging.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orderline/order.hpp"
#include "orderline/symbols.hpp"

namespace orderline::lex {

struct Token {
    std::string norm;           // lowercased core, punctuation and possessive stripped
    bool is_number = false;     // decimal numeral, optional 1,000 grouping
    bool has_currency = false;  // "$", "¥" prefix or "元" suffix
    std::string number;         // digits of the numeral without currency marks
};

// Filler words dropped before matching ("uh", "emmm", ...).
bool is_filler(std::string_view norm);

std::vector<Token> tokenize(std::string_view text);

// Normalized token strings, for alias matching.
std::vector<std::string> norms(const std::vector<Token>& tokens);

std::optional<Side> side_word(std::string_view norm);
bool is_share_word(std::string_view norm);
bool is_ticker_shaped(const Token& t);

// True when tokens[i..] starts with the space-separated phrase.
bool phrase_at(const std::vector<Token>& tokens, std::size_t i, std::string_view phrase);
bool contains_phrase(const std::vector<Token>& tokens, std::string_view phrase);

struct Analysis {
    std::optional<Side> side;
    std::optional<ShareCount> quantity;
    std::optional<Money> price;
    std::optional<TickerSymbol> symbol;
    bool explicit_limit = false;
    bool explicit_market = false;
    bool market_cue = false;
};

Analysis analyze(std::string_view utterance, const SymbolDirectory& directory);

// Explicit "market"/"limit" answer, nullopt if neither or both.
std::optional<Strategy> strategy_answer(const std::vector<Token>& tokens);

}  // namespace orderline::lex
