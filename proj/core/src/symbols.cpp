#include "orderline/symbols.hpp"

#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace orderline {

std::string normalize_alias(std::string_view name) { return text::normalize_phrase(name); }

SymbolDirectory SymbolDirectory::builtin() {
    SymbolDirectory dir;
    dir.add("Kweichow Moutai", TickerSymbol::from("600519"));
    dir.add("Moutai", TickerSymbol::from("600519"));
    dir.add("Vanke", TickerSymbol::from("000002"));
    dir.add("Tencent", TickerSymbol::from("00700"));
    return dir;
}

SymbolDirectory SymbolDirectory::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open symbol file: " + path.string());
    SymbolDirectory dir = builtin();
    dir.add_from_stream(in, path.string());
    return dir;
}

void SymbolDirectory::add(std::string_view alias, const TickerSymbol& code) {
    std::string key = normalize_alias(alias);
    if (key.empty()) throw ConfigError("empty symbol alias");
    auto [it, inserted] = entries_.emplace(key, code);
    if (!inserted && it->second != code) {
        throw ConfigError("alias '" + key + "' maps to both " + it->second.code() + " and " +
                          code.code());
    }
    max_tokens_ = std::max(max_tokens_, text::split_ws(key).size());
}

void SymbolDirectory::add_from_stream(std::istream& in, const std::string& source_name) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto words = text::split_ws(line);
        if (words.empty()) continue;
        if (words.size() < 2) {
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected '<alias> <code>'");
        }
        auto code = TickerSymbol::parse(words.back());
        if (!code) {
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": bad ticker code '" + words.back() + "'");
        }
        words.pop_back();
        std::string alias;
        for (const auto& w : words) {
            if (!alias.empty()) alias.push_back(' ');
            alias += w;
        }
        add(alias, *code);
    }
}

std::optional<TickerSymbol> SymbolDirectory::find(std::string_view name) const {
    auto it = entries_.find(normalize_alias(name));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<SymbolDirectory::Match> SymbolDirectory::match_at(
    std::span<const std::string> tokens, std::size_t pos) const {
    const std::size_t limit = std::min(max_tokens_, tokens.size() - std::min(pos, tokens.size()));
    for (std::size_t len = limit; len >= 1; --len) {
        std::string key;
        for (std::size_t k = 0; k < len; ++k) {
            if (k) key.push_back(' ');
            key += tokens[pos + k];
        }
        if (auto it = entries_.find(key); it != entries_.end()) return Match{len, it->second};
    }
    return std::nullopt;
}

TickerSymbol resolve_symbol(std::string_view name, const SymbolDirectory& directory) {
    if (auto sym = directory.find(name)) return *sym;
    throw UnknownSymbol(std::string(text::trim(name)));
}

}  // namespace orderline
