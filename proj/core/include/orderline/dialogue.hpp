#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "orderline/exchange.hpp"
#include "orderline/extract.hpp"
#include "orderline/gateway.hpp"
#include "orderline/order.hpp"
#include "orderline/symbols.hpp"

namespace orderline {

enum class Intent { TradeInstruction, TradeRelated, Other };
std::string_view to_string(Intent intent);
std::optional<Intent> parse_intent(std::string_view name);

/// Lexicon classifier: a buy/sell verb plus an instrument (shares, a known
/// company, a ticker code) is a trade instruction; market vocabulary without
/// that combination is trade-related; anything else is other.
Intent classify_intent(std::string_view utterance, const SymbolDirectory& directory);

struct SessionConfig {
    int max_turns = 5;
    bool auto_execute = false;
    ExtractionPolicy policy = ExtractionPolicy::Lenient;

    void validate() const;
};

// --- states -----------------------------------------------------------------

namespace session {

struct AwaitInput {};

struct Drafting {
    std::string utterance;
    OrderDraft draft;
};

struct AwaitClarification {
    OrderDraft draft;
    std::vector<FieldName> pending;  // ask order; front() is the open question
    int turns_used = 0;
};

struct ReadyToExecute {
    ExecutableOrder order;
};

struct Executed {
    ExecutionReport report;
};

struct Rejected {
    Intent intent;
};

struct Failed {
    std::string reason;
};

}  // namespace session

using SessionState = std::variant<session::AwaitInput, session::Drafting,
                                  session::AwaitClarification, session::ReadyToExecute,
                                  session::Executed, session::Rejected, session::Failed>;

std::string_view state_name(const SessionState& state);
bool is_terminal(const SessionState& state);
// Draft carried by the state, if any (ReadyToExecute/Executed give the final order).
std::optional<OrderDraft> current_draft(const SessionState& state);

// --- events and outbound messages -------------------------------------------

struct UserMessage {
    std::string text;
};
struct ProviderReply {
    std::string text;
};
struct ConfirmExecute {};
struct FeedTick {};

using SessionEvent = std::variant<UserMessage, ProviderReply, ConfirmExecute, FeedTick>;
std::string_view event_name(const SessionEvent& event);

struct Notice {
    std::string text;
};
struct Question {
    FieldName field;
    std::string text;
};
// The driver must call the provider with this transcript and feed the reply
// back as a ProviderReply event.
struct ProviderRequest {
    std::vector<ChatTurn> transcript;
};
struct ExecutionNotice {
    ExecutionReport report;
};

using OutboundMessage = std::variant<Notice, Question, ProviderRequest, ExecutionNotice>;

class IllegalEvent : public std::logic_error {
public:
    IllegalEvent(std::string_view state, std::string_view event)
        : std::logic_error("event " + std::string(event) + " is not legal in state " +
                           std::string(state)) {}
};

class Unparseable : public Error {
public:
    explicit Unparseable(FieldName field)
        : Error("could not read a " + std::string(to_string(field)) + " from the answer"),
          field_(field) {}
    FieldName field() const { return field_; }

private:
    FieldName field_;
};

using Executor = std::function<ExecutionReport(const ExecutableOrder&)>;

struct DialogueContext {
    const SymbolDirectory* directory = nullptr;
    SessionConfig config;
    Executor execute;           // venue hand-off for ConfirmExecute / auto_execute
    std::string system_prompt;  // sent with every ProviderRequest
};

struct StepResult {
    SessionState state;
    std::vector<OutboundMessage> outbound;
};

/// Transition function. Throws IllegalEvent for events the state does not
/// accept; executor errors (e.g. OversellRejected) propagate. The input state
/// is never modified, so on any throw the caller still holds the old state.
StepResult step(const SessionState& state, const SessionEvent& event, const DialogueContext& ctx);

/// Reads `answer` as a value for `field` only. Answering market for strategy
/// also marks the price not-applicable. Throws Unparseable, or
/// std::invalid_argument if `field` is not currently missing.
OrderDraft merge_answer(const OrderDraft& draft, FieldName field, std::string_view answer,
                        const SymbolDirectory& directory);

/// Fixed question per field. The price question reads
/// "Could you please tell me what the stock price is?".
std::string render_question(FieldName field);

// --- public views and transcript log ----------------------------------------

nlohmann::ordered_json session_view(const SessionState& state);
nlohmann::ordered_json to_json(const SessionEvent& event);
SessionEvent event_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const OutboundMessage& message);

/// Append-only JSONL audit log: one line per accepted event and one per
/// resulting transition, each stamped with a UTC timestamp.
class TranscriptLog {
public:
    using Clock = std::function<std::string()>;

    explicit TranscriptLog(std::ostream& out, Clock clock = {});

    void record(const std::string& session_id, const SessionState& from, const SessionEvent& event,
                const StepResult& result);

private:
    std::ostream* out_;
    Clock clock_;
};

std::string utc_timestamp();

// Events recorded for `session_id`, in order.
std::vector<SessionEvent> read_events(std::istream& log, const std::string& session_id);

// Re-feeds events from AwaitInput; ProviderRequests are answered by the
// ProviderReply events already in the log.
SessionState replay(const std::vector<SessionEvent>& events, const DialogueContext& ctx);

}  // namespace orderline
