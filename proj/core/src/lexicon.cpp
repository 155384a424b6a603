#include "lexicon.hpp"

#include <algorithm>
#include <array>

#include "text_util.hpp"

namespace orderline::lex {

namespace {

constexpr std::array<std::string_view, 18> kFillers = {
    "uh", "uhh", "um", "umm", "uhm", "emm", "emmm", "emmmm", "hmm", "hmmm",
    "er", "erm", "oh", "ah", "嗯", "呃", "啊", "额"};

constexpr std::array<std::string_view, 9> kBuyWords = {
    "buy", "buys", "buying", "purchase", "purchasing", "买", "买入", "购买", "买进"};
constexpr std::array<std::string_view, 8> kSellWords = {
    "sell", "sells", "selling", "卖", "卖出", "抛", "抛售", "卖掉"};

constexpr std::array<std::string_view, 3> kShareWords = {"shares", "share", "股"};

// Words directly before a numeral that make it a price.
constexpr std::array<std::string_view, 16> kPriceMarkers = {
    "at", "to", "@", "price", "reaches", "reach", "hits", "hit", "below", "above",
    "under", "到", "跌到", "涨到", "价格", "价位"};

// Words directly after a numeral that make it a price.
constexpr std::array<std::string_view, 7> kPriceUnits = {
    "yuan", "元", "dollars", "dollar", "rmb", "hkd", "per"};

constexpr std::array<std::string_view, 14> kMarketCues = {
    "market price", "current price", "current stock price", "current share price",
    "right now", "right away", "immediately", "at market", "best price",
    "best available price", "现价", "马上", "立即", "立刻"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& set, std::string_view w) {
    return std::find(set.begin(), set.end(), w) != set.end();
}

bool strip_prefix(std::string& s, std::string_view prefix) {
    if (s.size() >= prefix.size() && std::string_view(s).substr(0, prefix.size()) == prefix) {
        s.erase(0, prefix.size());
        return true;
    }
    return false;
}

bool strip_suffix(std::string& s, std::string_view suffix) {
    if (s.size() >= suffix.size() &&
        std::string_view(s).substr(s.size() - suffix.size()) == suffix) {
        s.erase(s.size() - suffix.size());
        return true;
    }
    return false;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return text::is_digit(c); });
}

// Digits with optional 1,000 grouping and decimals; returns the bare numeral.
std::optional<std::string> numeral(std::string_view s) {
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (dot != std::string_view::npos && !all_digits(frac)) return std::nullopt;
    std::string out;
    std::size_t start = 0;
    bool first_group = true;
    while (true) {
        const auto comma = whole.find(',', start);
        const auto group = whole.substr(start, comma == std::string_view::npos ? whole.npos : comma - start);
        if (!all_digits(group)) return std::nullopt;
        const bool grouped = comma != std::string_view::npos || !first_group;
        if (grouped && (first_group ? group.size() > 3 : group.size() != 3)) return std::nullopt;
        out += group;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
        first_group = false;
    }
    if (dot != std::string_view::npos) {
        out.push_back('.');
        out += frac;
    }
    return out;
}

constexpr std::array<std::string_view, 8> kOpeners = {
    "\"", "'", "(", "[", "\xE2\x80\x9C", "\xE2\x80\x98", "\xE3\x80\x8C", "\xEF\xBC\x88"};
constexpr std::array<std::string_view, 7> kClosers = {
    "\"", "'", ")", "]", "\xE2\x80\x9D", "\xE2\x80\x99", "\xEF\xBC\x89"};

}  // namespace

bool is_filler(std::string_view norm) { return in(kFillers, norm); }

std::vector<Token> tokenize(std::string_view input) {
    std::vector<Token> out;
    for (const auto& piece : text::split_ws(input)) {
        std::string core = piece;
        for (bool changed = true; changed;) {
            changed = false;
            for (auto o : kOpeners) changed = strip_prefix(core, o) || changed;
            while (!core.empty() && core.front() == '.') {
                core.erase(0, 1);
                changed = true;
            }
        }
        for (bool changed = true; changed;) {
            changed = false;
            auto [head, marks] = text::split_trailing_marks(core);
            if (!marks.empty()) {
                core = std::string(head);
                changed = true;
            }
            for (auto c : kClosers) changed = strip_suffix(core, c) || changed;
        }
        core = text::to_lower(core);
        if (!strip_suffix(core, "'s")) strip_suffix(core, "\xE2\x80\x99s");
        if (core.empty() || is_filler(core)) continue;

        Token tok;
        tok.norm = core;
        std::string num = core;
        bool currency = strip_prefix(num, "$") || strip_prefix(num, "\xC2\xA5") ||
                        strip_prefix(num, "\xEF\xBF\xA5");
        currency = strip_suffix(num, "\xE5\x85\x83") || currency;  // 元
        if (auto n = numeral(num)) {
            tok.is_number = true;
            tok.has_currency = currency;
            tok.number = *n;
        }
        out.push_back(std::move(tok));
    }
    return out;
}

std::vector<std::string> norms(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.norm);
    return out;
}

std::optional<Side> side_word(std::string_view norm) {
    if (in(kBuyWords, norm)) return Side::Buy;
    if (in(kSellWords, norm)) return Side::Sell;
    return std::nullopt;
}

bool is_share_word(std::string_view norm) { return in(kShareWords, norm); }

bool is_ticker_shaped(const Token& t) {
    if (!t.is_number || t.has_currency) return false;
    if (t.number.find('.') != std::string::npos) return false;
    return t.number.size() == 6 || (t.number.size() == 5 && t.number.front() == '0');
}

bool phrase_at(const std::vector<Token>& tokens, std::size_t i, std::string_view phrase) {
    const auto words = text::split_ws(phrase);
    if (i + words.size() > tokens.size()) return false;
    for (std::size_t k = 0; k < words.size(); ++k) {
        if (tokens[i + k].norm != words[k]) return false;
    }
    return true;
}

bool contains_phrase(const std::vector<Token>& tokens, std::string_view phrase) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (phrase_at(tokens, i, phrase)) return true;
    }
    return false;
}

Analysis analyze(std::string_view utterance, const SymbolDirectory& directory) {
    const auto toks = tokenize(utterance);
    const auto words = norms(toks);
    const std::size_t n = toks.size();
    Analysis a;

    for (const auto& t : toks) {
        if (auto s = side_word(t.norm)) {
            a.side = s;
            break;
        }
    }

    auto followed_by_shares = [&](std::size_t i) {
        return i + 1 < n && is_share_word(toks[i + 1].norm);
    };

    std::optional<std::size_t> qty_at;
    for (std::size_t i = 0; i < n; ++i) {
        if (toks[i].is_number && !toks[i].has_currency && followed_by_shares(i)) {
            if (auto q = ShareCount::parse(toks[i].number)) {
                a.quantity = q;
                qty_at = i;
                break;
            }
        }
    }

    std::optional<std::size_t> price_at;
    for (std::size_t i = 0; i < n; ++i) {
        const Token& t = toks[i];
        if (!t.is_number || i == qty_at || followed_by_shares(i)) continue;
        bool marked = t.has_currency;
        if (!marked && !is_ticker_shaped(t)) {
            if (i > 0 && in(kPriceMarkers, toks[i - 1].norm)) marked = true;
            if (i > 1 && toks[i - 1].norm == "of" && toks[i - 2].norm == "price") marked = true;
            if (i + 1 < n && in(kPriceUnits, toks[i + 1].norm)) marked = true;
        }
        if (!marked) continue;
        if (auto m = Money::parse(t.number)) {
            a.price = m;
            price_at = i;
            break;
        }
    }

    for (std::size_t i = 0; i < n && !a.symbol; ++i) {
        if (auto m = directory.match_at(words, i)) a.symbol = m->symbol;
    }
    if (!a.symbol) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == qty_at || i == price_at || !is_ticker_shaped(toks[i])) continue;
            a.symbol = TickerSymbol::parse(toks[i].number);
            break;
        }
    }

    a.explicit_limit = contains_phrase(toks, "limit order") || contains_phrase(toks, "limit price") ||
                       contains_phrase(toks, "限价") || contains_phrase(toks, "限价单");
    a.explicit_market = contains_phrase(toks, "market order") || contains_phrase(toks, "市价") ||
                        contains_phrase(toks, "市价单");
    for (auto cue : kMarketCues) {
        if (contains_phrase(toks, cue)) {
            a.market_cue = true;
            break;
        }
    }
    return a;
}

std::optional<Strategy> strategy_answer(const std::vector<Token>& tokens) {
    bool market = false;
    bool limit = false;
    for (const auto& t : tokens) {
        if (t.norm == "market" || t.norm == "市价" || t.norm == "市价单") market = true;
        if (t.norm == "limit" || t.norm == "限价" || t.norm == "限价单") limit = true;
    }
    if (market == limit) return std::nullopt;
    return market ? Strategy::Market : Strategy::Limit;
}

}  // namespace orderline::lex
