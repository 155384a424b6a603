#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orderline/errors.hpp"
#include "orderline/order.hpp"

namespace orderline {

/// How forgiving parse_draft is about tri-state spellings.
///
/// Strict accepts only the canonical wire form: JSON null for unknown and the
/// string "None" for a market order's price. Lenient additionally reads the
/// strings "null"/"none" in any case as unknown, maps "None" to not-applicable
/// in a market (or unresolved-strategy) context and to unknown under a limit
/// order, tolerates extra keys and case variants of enum values, and demotes a
/// market order's price to not-applicable instead of rejecting it.
enum class ExtractionPolicy { Strict, Lenient };

std::string_view to_string(ExtractionPolicy policy);
std::optional<ExtractionPolicy> parse_policy(std::string_view name);

class NoJsonFound : public Error {
public:
    NoJsonFound() : Error("no JSON object found in reply") {}
};

class SchemaViolation : public Error {
public:
    explicit SchemaViolation(const std::string& detail) : Error("schema violation: " + detail) {}
};

// Wire form: keys strategy, symbol, order_type, price, quantity in that order;
// unknown is null, not-applicable is "None", prices are JSON floats.
nlohmann::ordered_json to_wire(const OrderDraft& draft);
nlohmann::ordered_json to_wire(const ExecutableOrder& order);
std::string serialize_draft(const OrderDraft& draft, int indent = -1);

/// First balanced `{...}` in the reply that parses as a JSON object. Code
/// fences and surrounding prose are skipped. Throws NoJsonFound.
std::string extract_json_block(std::string_view reply_text);

struct ParsedDraft {
    OrderDraft draft;
    std::vector<std::string> warnings;  // lenient coercions applied
};

// A missing key reads as unknown. The strategy hint stands in for the
// strategy when the object itself leaves it unknown. Throws SchemaViolation.
ParsedDraft parse_draft(std::string_view json_text, ExtractionPolicy policy,
                        std::optional<Strategy> strategy_hint = std::nullopt);
ParsedDraft parse_draft(const nlohmann::json& object, ExtractionPolicy policy,
                        std::optional<Strategy> strategy_hint = std::nullopt);
// Strings are JSON text, never a JSON string value.
inline ParsedDraft parse_draft(const std::string& json_text, ExtractionPolicy policy,
                               std::optional<Strategy> strategy_hint = std::nullopt) {
    return parse_draft(std::string_view(json_text), policy, strategy_hint);
}
inline ParsedDraft parse_draft(const char* json_text, ExtractionPolicy policy,
                               std::optional<Strategy> strategy_hint = std::nullopt) {
    return parse_draft(std::string_view(json_text), policy, strategy_hint);
}

/// Per-record scoring comparison of a predicted draft against gold.
struct FieldDiff {
    FieldSet missing;  // gold present, predicted unknown
    FieldSet wrong;    // predicted a value gold does not hold

    bool empty() const { return missing.empty() && wrong.empty(); }
    bool operator==(const FieldDiff&) const = default;
};

FieldDiff compare_drafts(const OrderDraft& gold, const OrderDraft& predicted);

}  // namespace orderline
