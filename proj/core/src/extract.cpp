#include "orderline/extract.hpp"

#include <cmath>

#include "text_util.hpp"

namespace orderline {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ExtractionPolicy policy) {
    return policy == ExtractionPolicy::Strict ? "strict" : "lenient";
}

std::optional<ExtractionPolicy> parse_policy(std::string_view name) {
    const auto lower = text::to_lower(name);
    if (lower == "strict") return ExtractionPolicy::Strict;
    if (lower == "lenient") return ExtractionPolicy::Lenient;
    return std::nullopt;
}

// --- wire form ------------------------------------------------------------

ordered_json to_wire(const OrderDraft& d) {
    ordered_json j = ordered_json::object();
    j["strategy"] = d.strategy.is_present() ? ordered_json(to_string(d.strategy.value()))
                                            : ordered_json(nullptr);
    j["symbol"] = d.symbol.is_present() ? ordered_json(d.symbol.value().code())
                                        : ordered_json(nullptr);
    j["order_type"] =
        d.side.is_present() ? ordered_json(to_string(d.side.value())) : ordered_json(nullptr);
    if (d.price.is_present()) {
        j["price"] = d.price.value().as_double();
    } else if (d.price.is_not_applicable()) {
        j["price"] = "None";
    } else {
        j["price"] = nullptr;
    }
    j["quantity"] = d.quantity.is_present() ? ordered_json(d.quantity.value().value())
                                            : ordered_json(nullptr);
    return j;
}

ordered_json to_wire(const ExecutableOrder& order) { return to_wire(order.to_draft()); }

std::string serialize_draft(const OrderDraft& draft, int indent) {
    return to_wire(draft).dump(indent);
}

// --- JSON block extraction ------------------------------------------------

namespace {

// End index (exclusive) of the balanced object starting at `open`, honouring
// string literals and escapes.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

}  // namespace

std::string extract_json_block(std::string_view reply) {
    std::size_t pos = reply.find('{');
    while (pos != std::string_view::npos) {
        if (auto end = balanced_end(reply, pos)) {
            std::string_view candidate = reply.substr(pos, *end - pos);
            auto parsed = json::parse(candidate, nullptr, /*allow_exceptions=*/false);
            if (!parsed.is_discarded() && parsed.is_object()) return std::string(candidate);
        }
        pos = reply.find('{', pos + 1);
    }
    throw NoJsonFound();
}

// --- parse_draft ----------------------------------------------------------

namespace {

bool nullish_string(const json& v) {
    if (!v.is_string()) return false;
    const auto lower = text::to_lower(text::trim(v.get<std::string>()));
    return lower == "null" || lower == "none";
}

std::string describe(const json& v) { return v.dump(); }

FieldState<Strategy> parse_strategy(const json& v, ExtractionPolicy policy) {
    if (v.is_null()) return FieldState<Strategy>::unknown();
    if (!v.is_string()) throw SchemaViolation("strategy must be a string, got " + describe(v));
    const auto s = v.get<std::string>();
    if (s == "market order") return FieldState<Strategy>::present(Strategy::Market);
    if (s == "limit order") return FieldState<Strategy>::present(Strategy::Limit);
    if (policy == ExtractionPolicy::Lenient) {
        if (nullish_string(v)) return FieldState<Strategy>::unknown();
        const auto n = text::normalize_phrase(s);
        if (n == "market" || n == "market order" || n == "市价" || n == "市价单")
            return FieldState<Strategy>::present(Strategy::Market);
        if (n == "limit" || n == "limit order" || n == "限价" || n == "限价单")
            return FieldState<Strategy>::present(Strategy::Limit);
    }
    throw SchemaViolation("unknown strategy " + describe(v));
}

FieldState<TickerSymbol> parse_symbol(const json& v, ExtractionPolicy policy) {
    if (v.is_null()) return FieldState<TickerSymbol>::unknown();
    if (v.is_string()) {
        if (auto sym = TickerSymbol::parse(v.get<std::string>()))
            return FieldState<TickerSymbol>::present(*sym);
        if (policy == ExtractionPolicy::Lenient) {
            if (nullish_string(v)) return FieldState<TickerSymbol>::unknown();
            if (auto sym = TickerSymbol::parse(text::trim(v.get<std::string>())))
                return FieldState<TickerSymbol>::present(*sym);
        }
    } else if (policy == ExtractionPolicy::Lenient && v.is_number_unsigned()) {
        if (auto sym = TickerSymbol::parse(std::to_string(v.get<std::uint64_t>())))
            return FieldState<TickerSymbol>::present(*sym);
    }
    throw SchemaViolation("bad symbol " + describe(v));
}

FieldState<Side> parse_side(const json& v, ExtractionPolicy policy) {
    if (v.is_null()) return FieldState<Side>::unknown();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "buy") return FieldState<Side>::present(Side::Buy);
        if (s == "sell") return FieldState<Side>::present(Side::Sell);
        if (policy == ExtractionPolicy::Lenient) {
            if (nullish_string(v)) return FieldState<Side>::unknown();
            const auto n = text::normalize_phrase(s);
            if (n == "buy" || n == "买" || n == "买入") return FieldState<Side>::present(Side::Buy);
            if (n == "sell" || n == "卖" || n == "卖出")
                return FieldState<Side>::present(Side::Sell);
        }
    }
    throw SchemaViolation("unknown order_type " + describe(v));
}

FieldState<ShareCount> parse_quantity(const json& v, ExtractionPolicy policy) {
    if (v.is_null()) return FieldState<ShareCount>::unknown();
    if (v.is_number_integer()) {
        if (auto q = ShareCount::of(v.get<std::int64_t>())) return FieldState<ShareCount>::present(*q);
        throw SchemaViolation("quantity must be positive, got " + describe(v));
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d >= 1.0 && d < 1e15 && std::floor(d) == d) {
            return FieldState<ShareCount>::present(*ShareCount::of(static_cast<std::int64_t>(d)));
        }
        throw SchemaViolation("quantity must be a positive integer, got " + describe(v));
    }
    if (v.is_string()) {
        if (auto q = ShareCount::parse(v.get<std::string>())) return FieldState<ShareCount>::present(*q);
        if (policy == ExtractionPolicy::Lenient && nullish_string(v))
            return FieldState<ShareCount>::unknown();
    }
    throw SchemaViolation("bad quantity " + describe(v));
}

// Price reading before strategy coercion. `context` is the effective strategy.
FieldState<Money> parse_price(const json& v, ExtractionPolicy policy,
                              std::optional<Strategy> context) {
    if (v.is_null()) return FieldState<Money>::unknown();
    if (v.is_number()) {
        if (auto m = Money::from_double(v.get<double>())) return FieldState<Money>::present(*m);
        throw SchemaViolation("price must be positive with at most 2 decimals, got " + describe(v));
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "None") {
            if (context != Strategy::Limit) return FieldState<Money>::not_applicable();
            if (policy == ExtractionPolicy::Lenient) return FieldState<Money>::unknown();
            throw SchemaViolation("limit order price cannot be \"None\"");
        }
        if (policy == ExtractionPolicy::Lenient && nullish_string(v))
            return FieldState<Money>::unknown();
        if (auto m = Money::parse(s)) return FieldState<Money>::present(*m);
    }
    throw SchemaViolation("non-numeric price " + describe(v));
}

}  // namespace

ParsedDraft parse_draft(const json& object, ExtractionPolicy policy,
                        std::optional<Strategy> strategy_hint) {
    if (!object.is_object()) throw SchemaViolation("expected a JSON object");
    if (policy == ExtractionPolicy::Strict) {
        for (const auto& [key, _] : object.items()) {
            if (!parse_field_name(key)) throw SchemaViolation("unexpected key \"" + key + "\"");
        }
    }
    static const json kNull = nullptr;
    auto field = [&](std::string_view key) -> const json& {
        auto it = object.find(std::string(key));
        return it == object.end() ? kNull : *it;
    };

    ParsedDraft out;
    OrderDraft& d = out.draft;
    d.strategy = parse_strategy(field("strategy"), policy);
    d.symbol = parse_symbol(field("symbol"), policy);
    d.side = parse_side(field("order_type"), policy);
    d.quantity = parse_quantity(field("quantity"), policy);

    const std::optional<Strategy> context =
        d.strategy.is_present() ? std::optional<Strategy>(d.strategy.value()) : strategy_hint;
    d.price = parse_price(field("price"), policy, context);

    if (context == Strategy::Market && d.price.is_present()) {
        if (policy == ExtractionPolicy::Strict)
            throw SchemaViolation("market order cannot carry a price");
        out.warnings.push_back("market order price " + d.price.value().to_string() +
                               " demoted to None");
        d.price = FieldState<Money>::not_applicable();
    }
    return out;
}

ParsedDraft parse_draft(std::string_view json_text, ExtractionPolicy policy,
                        std::optional<Strategy> strategy_hint) {
    auto parsed = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) throw SchemaViolation("malformed JSON");
    return parse_draft(parsed, policy, strategy_hint);
}

// --- compare_drafts -------------------------------------------------------

namespace {

template <class T>
void classify(FieldName name, const FieldState<T>& gold, const FieldState<T>& pred,
              FieldDiff& diff) {
    if (pred.is_present()) {
        if (!gold.is_present() || !(gold.value() == pred.value())) diff.wrong.insert(name);
    } else if (pred.is_unknown()) {
        if (gold.is_present()) diff.missing.insert(name);
    } else if (gold.is_present()) {
        diff.wrong.insert(name);
    }
}

}  // namespace

FieldDiff compare_drafts(const OrderDraft& gold, const OrderDraft& predicted) {
    FieldDiff diff;
    classify(FieldName::Strategy, gold.strategy, predicted.strategy, diff);
    classify(FieldName::Symbol, gold.symbol, predicted.symbol, diff);
    classify(FieldName::OrderType, gold.side, predicted.side, diff);
    classify(FieldName::Price, gold.price, predicted.price, diff);
    classify(FieldName::Quantity, gold.quantity, predicted.quantity, diff);
    return diff;
}

}  // namespace orderline
