#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "orderline/errors.hpp"

namespace orderline {

enum class Strategy : std::uint8_t { Market, Limit };
enum class Side : std::uint8_t { Buy, Sell };

// The five order fields, declared in wire-key order.
enum class FieldName : std::uint8_t { Strategy, Symbol, OrderType, Price, Quantity };

inline constexpr std::array<FieldName, 5> kWireOrder = {
    FieldName::Strategy, FieldName::Symbol, FieldName::OrderType, FieldName::Price,
    FieldName::Quantity};

// Order in which missing fields are asked about. Strategy comes first because
// it decides whether a price is needed at all.
inline constexpr std::array<FieldName, 5> kAskOrder = {
    FieldName::Strategy, FieldName::Symbol, FieldName::OrderType, FieldName::Quantity,
    FieldName::Price};

std::string_view to_string(FieldName field);
std::string_view to_string(Strategy strategy);
std::string_view to_string(Side side);
std::optional<FieldName> parse_field_name(std::string_view key);

/// Small value set of field names. Iteration (to_vector) follows kAskOrder.
class FieldSet {
public:
    FieldSet() = default;
    FieldSet(std::initializer_list<FieldName> fields);

    static FieldSet all();

    void insert(FieldName f) { bits_ |= bit(f); }
    void erase(FieldName f) { bits_ &= static_cast<std::uint8_t>(~bit(f)); }
    bool contains(FieldName f) const { return (bits_ & bit(f)) != 0; }
    bool empty() const { return bits_ == 0; }
    std::size_t size() const;

    bool is_subset_of(const FieldSet& other) const { return (bits_ & ~other.bits_) == 0; }
    FieldSet minus(const FieldSet& other) const;
    FieldSet intersect(const FieldSet& other) const;

    std::vector<FieldName> to_vector() const;
    std::optional<FieldName> first() const;
    std::string to_string() const;  // e.g. "{strategy, price}"

    bool operator==(const FieldSet&) const = default;

private:
    static std::uint8_t bit(FieldName f) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
    }
    std::uint8_t bits_ = 0;
};

/// Exchange code: 6 digits for mainland listings, 5 for Hong Kong.
class TickerSymbol {
public:
    static std::optional<TickerSymbol> parse(std::string_view code);
    static TickerSymbol from(std::string_view code);  // throws std::invalid_argument

    const std::string& code() const { return code_; }
    auto operator<=>(const TickerSymbol&) const = default;

private:
    explicit TickerSymbol(std::string code) : code_(std::move(code)) {}
    std::string code_;
};

/// Positive unitless amount with at most two fractional digits, stored in cents.
class Money {
public:
    // Accepts "1800", "1800.5", "$7", "¥35.20", "1,800.00". Rejects zero,
    // negatives, and non-zero digits beyond the second decimal.
    static std::optional<Money> parse(std::string_view text);
    static std::optional<Money> from_double(double value);
    static Money from_cents(std::int64_t cents);  // throws std::invalid_argument if <= 0

    std::int64_t cents() const { return cents_; }
    double as_double() const { return static_cast<double>(cents_) / 100.0; }
    std::string to_string() const;  // shortest exact form: "1800", "18.6", "35.25"

    auto operator<=>(const Money&) const = default;

private:
    explicit Money(std::int64_t cents) : cents_(cents) {}
    std::int64_t cents_ = 0;
};

class ShareCount {
public:
    static std::optional<ShareCount> of(std::int64_t quantity);
    static std::optional<ShareCount> parse(std::string_view text);  // digits, optional 1,000 grouping

    std::uint64_t value() const { return value_; }
    auto operator<=>(const ShareCount&) const = default;

private:
    explicit ShareCount(std::uint64_t v) : value_(v) {}
    std::uint64_t value_ = 1;
};

struct Unknown {
    bool operator==(const Unknown&) const = default;
};
struct NotApplicable {
    bool operator==(const NotApplicable&) const = default;
};

enum class FieldStatus : std::uint8_t { Present, Unknown, NotApplicable };
std::string_view to_string(FieldStatus status);

/// Tri-state order field. Unknown is wire `null`; NotApplicable is wire "None".
template <class T>
class FieldState {
public:
    FieldState() : state_(Unknown{}) {}

    static FieldState present(T value) { return FieldState(std::move(value)); }
    static FieldState unknown() { return FieldState(); }
    static FieldState not_applicable() { return FieldState(NotApplicable{}); }

    bool is_present() const { return std::holds_alternative<T>(state_); }
    bool is_unknown() const { return std::holds_alternative<Unknown>(state_); }
    bool is_not_applicable() const { return std::holds_alternative<NotApplicable>(state_); }

    FieldStatus status() const {
        if (is_present()) return FieldStatus::Present;
        return is_unknown() ? FieldStatus::Unknown : FieldStatus::NotApplicable;
    }

    const T& value() const { return std::get<T>(state_); }
    std::optional<T> value_or_none() const {
        if (is_present()) return value();
        return std::nullopt;
    }

    bool operator==(const FieldState&) const = default;

private:
    explicit FieldState(T v) : state_(std::move(v)) {}
    explicit FieldState(NotApplicable na) : state_(na) {}
    std::variant<Unknown, NotApplicable, T> state_;
};

struct OrderDraft {
    FieldState<Strategy> strategy;
    FieldState<TickerSymbol> symbol;
    FieldState<Side> side;
    FieldState<Money> price;
    FieldState<ShareCount> quantity;

    FieldStatus status_of(FieldName field) const;
    bool operator==(const OrderDraft&) const = default;
};

// Returns a description of the first broken draft invariant, if any.
std::optional<std::string> invariant_violation(const OrderDraft& draft);

/// Draft whose every field is resolved. A limit order always carries a price,
/// a market order never does.
class ExecutableOrder {
public:
    static ExecutableOrder market(TickerSymbol symbol, Side side, ShareCount quantity);
    static ExecutableOrder limit(TickerSymbol symbol, Side side, Money price, ShareCount quantity);

    Strategy strategy() const { return strategy_; }
    const TickerSymbol& symbol() const { return symbol_; }
    Side side() const { return side_; }
    const std::optional<Money>& limit_price() const { return limit_price_; }
    ShareCount quantity() const { return quantity_; }

    OrderDraft to_draft() const;
    bool operator==(const ExecutableOrder&) const = default;

private:
    ExecutableOrder(Strategy st, TickerSymbol sym, Side side, std::optional<Money> px,
                    ShareCount qty)
        : strategy_(st), symbol_(std::move(sym)), side_(side), limit_price_(px), quantity_(qty) {}

    Strategy strategy_;
    TickerSymbol symbol_;
    Side side_;
    std::optional<Money> limit_price_;
    ShareCount quantity_;
};

class IncompleteOrder : public Error {
public:
    explicit IncompleteOrder(FieldSet missing);
    const FieldSet& missing() const { return missing_; }

private:
    FieldSet missing_;
};

/// Fields that still need a value before the draft can execute. Price counts
/// as missing while the strategy is unresolved, and never for market orders.
FieldSet missing_fields(const OrderDraft& draft);

/// Throws IncompleteOrder listing exactly missing_fields(draft).
ExecutableOrder finalize(const OrderDraft& draft);

}  // namespace orderline
