#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "orderline/errors.hpp"
#include "orderline/order.hpp"

namespace orderline {

class UnknownSymbol : public Error {
public:
    explicit UnknownSymbol(std::string name)
        : Error("unknown symbol: " + name), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// Lowercases ASCII, trims, and collapses whitespace runs.
std::string normalize_alias(std::string_view name);

/// Company-name aliases mapped to ticker codes.
///
/// Built-ins cover Kweichow Moutai, Vanke and Tencent; further pairs come from
/// a plain-text file with one `alias words... CODE` pair per line (the last
/// whitespace-separated token is the code, `#` starts a comment). Aliases are
/// unique after normalization; re-adding an alias with the same code is a
/// no-op, with a different code it is a ConfigError.
class SymbolDirectory {
public:
    struct Match {
        std::size_t token_count;
        TickerSymbol symbol;
    };

    static SymbolDirectory builtin();
    static SymbolDirectory load(const std::filesystem::path& path);

    void add(std::string_view alias, const TickerSymbol& code);
    void add_from_stream(std::istream& in, const std::string& source_name);

    std::optional<TickerSymbol> find(std::string_view name) const;

    // Longest alias starting at tokens[pos]; tokens must already be normalized.
    std::optional<Match> match_at(std::span<const std::string> tokens, std::size_t pos) const;

    const std::map<std::string, TickerSymbol>& entries() const { return entries_; }

private:
    std::map<std::string, TickerSymbol> entries_;
    std::size_t max_tokens_ = 0;
};

/// Throws UnknownSymbol when the normalized name is not an alias.
TickerSymbol resolve_symbol(std::string_view name, const SymbolDirectory& directory);

}  // namespace orderline
