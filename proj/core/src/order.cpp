#include "orderline/order.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "text_util.hpp"

namespace orderline {

std::string_view to_string(FieldName field) {
    switch (field) {
        case FieldName::Strategy: return "strategy";
        case FieldName::Symbol: return "symbol";
        case FieldName::OrderType: return "order_type";
        case FieldName::Price: return "price";
        case FieldName::Quantity: return "quantity";
    }
    return "?";
}

std::string_view to_string(Strategy strategy) {
    return strategy == Strategy::Market ? "market order" : "limit order";
}

std::string_view to_string(Side side) { return side == Side::Buy ? "buy" : "sell"; }

std::string_view to_string(FieldStatus status) {
    switch (status) {
        case FieldStatus::Present: return "present";
        case FieldStatus::Unknown: return "unknown";
        case FieldStatus::NotApplicable: return "not_applicable";
    }
    return "?";
}

std::optional<FieldName> parse_field_name(std::string_view key) {
    for (FieldName f : kWireOrder) {
        if (to_string(f) == key) return f;
    }
    return std::nullopt;
}

// --- FieldSet ---------------------------------------------------------------

FieldSet::FieldSet(std::initializer_list<FieldName> fields) {
    for (FieldName f : fields) insert(f);
}

FieldSet FieldSet::all() {
    return FieldSet{FieldName::Strategy, FieldName::Symbol, FieldName::OrderType,
                    FieldName::Price, FieldName::Quantity};
}

std::size_t FieldSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

FieldSet FieldSet::minus(const FieldSet& other) const {
    FieldSet out;
    out.bits_ = static_cast<std::uint8_t>(bits_ & ~other.bits_);
    return out;
}

FieldSet FieldSet::intersect(const FieldSet& other) const {
    FieldSet out;
    out.bits_ = static_cast<std::uint8_t>(bits_ & other.bits_);
    return out;
}

std::vector<FieldName> FieldSet::to_vector() const {
    std::vector<FieldName> out;
    for (FieldName f : kAskOrder) {
        if (contains(f)) out.push_back(f);
    }
    return out;
}

std::optional<FieldName> FieldSet::first() const {
    for (FieldName f : kAskOrder) {
        if (contains(f)) return f;
    }
    return std::nullopt;
}

std::string FieldSet::to_string() const {
    std::string out = "{";
    bool first_item = true;
    for (FieldName f : to_vector()) {
        if (!first_item) out += ", ";
        out += orderline::to_string(f);
        first_item = false;
    }
    out += "}";
    return out;
}

// --- value types ----------------------------------------------------------

std::optional<TickerSymbol> TickerSymbol::parse(std::string_view code) {
    if (code.size() < 5 || code.size() > 6) return std::nullopt;
    for (char c : code) {
        if (!text::is_digit(c)) return std::nullopt;
    }
    return TickerSymbol(std::string(code));
}

TickerSymbol TickerSymbol::from(std::string_view code) {
    auto sym = parse(code);
    if (!sym) throw std::invalid_argument("not a ticker code: " + std::string(code));
    return *sym;
}

namespace {

// Strips "1,800" style grouping. Returns nullopt on malformed grouping.
std::optional<std::string> strip_grouping(std::string_view digits) {
    if (digits.find(',') == std::string_view::npos) {
        for (char c : digits) {
            if (!text::is_digit(c)) return std::nullopt;
        }
        return std::string(digits);
    }
    std::string out;
    std::size_t group = 0;
    bool first_group = true;
    for (std::size_t i = 0; i <= digits.size(); ++i) {
        if (i == digits.size() || digits[i] == ',') {
            if (group == 0 || group > 3 || (!first_group && group != 3)) return std::nullopt;
            first_group = false;
            group = 0;
            continue;
        }
        if (!text::is_digit(digits[i])) return std::nullopt;
        out.push_back(digits[i]);
        ++group;
    }
    return out;
}

constexpr std::int64_t kMaxCents = std::numeric_limits<std::int64_t>::max() / 1000;

}  // namespace

std::optional<Money> Money::parse(std::string_view raw) {
    std::string_view s = text::trim(raw);
    for (std::string_view sign : {std::string_view("$"), std::string_view("\xC2\xA5"),
                                  std::string_view("\xEF\xBF\xA5")}) {
        if (s.substr(0, sign.size()) == sign) {
            s.remove_prefix(sign.size());
            break;
        }
    }
    if (s.empty()) return std::nullopt;
    auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    auto whole_digits = strip_grouping(whole);
    if (!whole_digits) return std::nullopt;
    if (whole_digits->empty()) whole_digits = "0";
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    for (char c : frac) {
        if (!text::is_digit(c)) return std::nullopt;
    }
    for (std::size_t i = 2; i < frac.size(); ++i) {
        if (frac[i] != '0') return std::nullopt;
    }
    if (whole_digits->size() > 15) return std::nullopt;
    std::int64_t cents = std::stoll(*whole_digits) * 100;
    if (!frac.empty()) cents += (frac[0] - '0') * 10;
    if (frac.size() > 1) cents += frac[1] - '0';
    if (cents <= 0) return std::nullopt;
    return Money(cents);
}

std::optional<Money> Money::from_double(double value) {
    if (!std::isfinite(value) || value <= 0.0) return std::nullopt;
    const double scaled = value * 100.0;
    if (scaled >= static_cast<double>(kMaxCents)) return std::nullopt;
    const double rounded = std::round(scaled);
    if (std::fabs(scaled - rounded) > 1e-6 * std::max(1.0, std::fabs(scaled))) return std::nullopt;
    if (rounded < 1.0) return std::nullopt;
    return Money(static_cast<std::int64_t>(rounded));
}

Money Money::from_cents(std::int64_t cents) {
    if (cents <= 0) throw std::invalid_argument("money amount must be positive");
    return Money(cents);
}

std::string Money::to_string() const {
    std::string out = std::to_string(cents_ / 100);
    const auto frac = cents_ % 100;
    if (frac != 0) {
        out.push_back('.');
        out.push_back(static_cast<char>('0' + frac / 10));
        if (frac % 10 != 0) out.push_back(static_cast<char>('0' + frac % 10));
    }
    return out;
}

std::optional<ShareCount> ShareCount::of(std::int64_t quantity) {
    if (quantity < 1) return std::nullopt;
    return ShareCount(static_cast<std::uint64_t>(quantity));
}

std::optional<ShareCount> ShareCount::parse(std::string_view raw) {
    auto digits = strip_grouping(text::trim(raw));
    if (!digits || digits->empty() || digits->size() > 15) return std::nullopt;
    for (char c : *digits) {
        if (!text::is_digit(c)) return std::nullopt;
    }
    return of(std::stoll(*digits));
}

// --- drafts ---------------------------------------------------------------

FieldStatus OrderDraft::status_of(FieldName field) const {
    switch (field) {
        case FieldName::Strategy: return strategy.status();
        case FieldName::Symbol: return symbol.status();
        case FieldName::OrderType: return side.status();
        case FieldName::Price: return price.status();
        case FieldName::Quantity: return quantity.status();
    }
    return FieldStatus::Unknown;
}

std::optional<std::string> invariant_violation(const OrderDraft& d) {
    if (d.strategy.is_not_applicable()) return "strategy cannot be not-applicable";
    if (d.symbol.is_not_applicable()) return "symbol cannot be not-applicable";
    if (d.side.is_not_applicable()) return "order_type cannot be not-applicable";
    if (d.quantity.is_not_applicable()) return "quantity cannot be not-applicable";
    if (d.strategy.is_present()) {
        if (d.strategy.value() == Strategy::Market && d.price.is_present())
            return "market order cannot carry a price";
        if (d.strategy.value() == Strategy::Limit && d.price.is_not_applicable())
            return "limit order price cannot be not-applicable";
    }
    return std::nullopt;
}

ExecutableOrder ExecutableOrder::market(TickerSymbol symbol, Side side, ShareCount quantity) {
    return ExecutableOrder(Strategy::Market, std::move(symbol), side, std::nullopt, quantity);
}

ExecutableOrder ExecutableOrder::limit(TickerSymbol symbol, Side side, Money price,
                                       ShareCount quantity) {
    return ExecutableOrder(Strategy::Limit, std::move(symbol), side, price, quantity);
}

OrderDraft ExecutableOrder::to_draft() const {
    OrderDraft d;
    d.strategy = FieldState<Strategy>::present(strategy_);
    d.symbol = FieldState<TickerSymbol>::present(symbol_);
    d.side = FieldState<Side>::present(side_);
    d.price = limit_price_ ? FieldState<Money>::present(*limit_price_)
                           : FieldState<Money>::not_applicable();
    d.quantity = FieldState<ShareCount>::present(quantity_);
    return d;
}

namespace {
std::string describe_missing(const FieldSet& missing) {
    return "order incomplete, missing " + missing.to_string();
}
}  // namespace

IncompleteOrder::IncompleteOrder(FieldSet missing)
    : Error(describe_missing(missing)), missing_(missing) {}

FieldSet missing_fields(const OrderDraft& d) {
    FieldSet out;
    if (d.strategy.is_unknown()) out.insert(FieldName::Strategy);
    if (d.symbol.is_unknown()) out.insert(FieldName::Symbol);
    if (d.side.is_unknown()) out.insert(FieldName::OrderType);
    if (d.quantity.is_unknown()) out.insert(FieldName::Quantity);
    const bool market = d.strategy.is_present() && d.strategy.value() == Strategy::Market;
    if (!market && !d.price.is_present()) out.insert(FieldName::Price);
    return out;
}

ExecutableOrder finalize(const OrderDraft& d) {
    if (auto why = invariant_violation(d)) throw std::invalid_argument(*why);
    const FieldSet missing = missing_fields(d);
    if (!missing.empty()) throw IncompleteOrder(missing);
    if (d.strategy.value() == Strategy::Market) {
        return ExecutableOrder::market(d.symbol.value(), d.side.value(), d.quantity.value());
    }
    return ExecutableOrder::limit(d.symbol.value(), d.side.value(), d.price.value(),
                                  d.quantity.value());
}

}  // namespace orderline
