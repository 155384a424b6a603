#include "orderline/followup.hpp"

#include <fstream>

#include "orderline/errors.hpp"
#include "text_util.hpp"

namespace orderline {

FollowupLexicon FollowupLexicon::builtin() {
    FollowupLexicon lex;
    for (const char* kw : {"market or limit", "limit or market", "market order", "limit order",
                           "strategy", "order type", "市价", "限价"}) {
        lex.add(FieldName::Strategy, kw);
    }
    for (const char* kw : {"price", "pay", "cost", "how much", "价格", "价位", "多少钱"}) {
        lex.add(FieldName::Price, kw);
    }
    for (const char* kw : {"how many", "shares", "quantity", "volume", "多少股", "数量"}) {
        lex.add(FieldName::Quantity, kw);
    }
    for (const char* kw : {"which stock", "which company", "symbol", "ticker", "company",
                           "哪只股票", "股票代码", "哪家公司"}) {
        lex.add(FieldName::Symbol, kw);
    }
    for (const char* kw : {"buy or sell", "sell or buy", "buying or selling", "selling or buying",
                           "买入还是卖出", "买还是卖"}) {
        lex.add(FieldName::OrderType, kw);
    }
    return lex;
}

FollowupLexicon FollowupLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open follow-up lexicon: " + path.string());
    FollowupLexicon lex;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected field<TAB>keyword");
        }
        auto field = parse_field_name(text::trim(std::string_view(line).substr(0, tab)));
        if (!field) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unknown field");
        }
        lex.add(*field, text::trim(std::string_view(line).substr(tab + 1)));
    }
    return lex;
}

void FollowupLexicon::add(FieldName field, std::string_view keyword) {
    auto kw = text::normalize_phrase(keyword);
    if (kw.empty()) throw ConfigError("empty follow-up keyword");
    entries_.push_back(Entry{field, std::move(kw)});
}

std::optional<FieldName> FollowupLexicon::classify(std::string_view question) const {
    const std::string q = text::normalize_phrase(question);
    std::optional<FieldName> best;
    std::size_t best_pos = std::string::npos;
    std::size_t best_len = 0;
    for (const auto& e : entries_) {
        const auto pos = q.find(e.keyword);
        if (pos == std::string::npos) continue;
        if (pos < best_pos || (pos == best_pos && e.keyword.size() > best_len)) {
            best = e.field;
            best_pos = pos;
            best_len = e.keyword.size();
        }
    }
    return best;
}

std::optional<FieldName> classify_followup_question(std::string_view question,
                                                    const FollowupLexicon& lexicon) {
    return lexicon.classify(question);
}

std::optional<FieldName> classify_followup_question(std::string_view question) {
    static const FollowupLexicon lexicon = FollowupLexicon::builtin();
    return lexicon.classify(question);
}

std::vector<std::string> find_questions(std::string_view t) {
    static constexpr std::string_view kFullWidthQ = "\xEF\xBC\x9F";
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::size_t mark_len = 0;
        if (t[i] == '?') {
            mark_len = 1;
        } else if (t.substr(i, kFullWidthQ.size()) == kFullWidthQ) {
            mark_len = kFullWidthQ.size();
        } else if (t[i] == '.' || t[i] == '!' || t[i] == '\n' || t[i] == '`' || t[i] == '{' ||
                   t[i] == '}') {
            start = i + 1;
            continue;
        }
        if (mark_len == 0) continue;
        auto q = text::trim(t.substr(start, i + mark_len - start));
        // Drop stray quote characters around the question.
        while (!q.empty() && (q.front() == '"' || q.front() == '\'')) q.remove_prefix(1);
        if (!q.empty()) out.emplace_back(q);
        i += mark_len - 1;
        start = i + 1;
    }
    return out;
}

}  // namespace orderline
