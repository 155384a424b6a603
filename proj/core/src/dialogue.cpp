#include "orderline/dialogue.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>

#include "lexicon.hpp"

namespace orderline {

using nlohmann::json;
using nlohmann::ordered_json;

// --- intent -----------------------------------------------------------------

std::string_view to_string(Intent intent) {
    switch (intent) {
        case Intent::TradeInstruction: return "trade_instruction";
        case Intent::TradeRelated: return "trade_related";
        case Intent::Other: return "other";
    }
    return "?";
}

std::optional<Intent> parse_intent(std::string_view name) {
    for (auto i : {Intent::TradeInstruction, Intent::TradeRelated, Intent::Other}) {
        if (to_string(i) == name) return i;
    }
    return std::nullopt;
}

namespace {

bool is_instrument_word(std::string_view w) {
    return lex::is_share_word(w) || w == "stock" || w == "stocks" || w == "股票";
}

bool is_market_word(std::string_view w) {
    static constexpr std::string_view kWords[] = {
        "market", "price", "prices", "index", "risen", "rise", "rises", "rising", "rose",
        "fall", "falls", "falling", "fell", "drop", "dropped", "earnings", "position",
        "positions", "portfolio", "dividend", "dividends", "trading", "trade", "exchange",
        "shareholder", "bull", "bear", "rally", "股市", "大盘", "涨", "跌", "行情"};
    for (auto k : kWords) {
        if (w == k) return true;
    }
    return false;
}

}  // namespace

Intent classify_intent(std::string_view utterance, const SymbolDirectory& directory) {
    const auto tokens = lex::tokenize(utterance);
    const auto words = lex::norms(tokens);

    bool side = false;
    bool instrument = false;
    bool market = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (lex::side_word(t.norm)) side = true;
        if (is_instrument_word(t.norm) || lex::is_ticker_shaped(t)) instrument = true;
        if (is_market_word(t.norm)) market = true;
        if (directory.match_at(words, i)) instrument = true;
    }
    if (side && instrument) return Intent::TradeInstruction;
    if (side || instrument || market) return Intent::TradeRelated;
    return Intent::Other;
}

void SessionConfig::validate() const {
    if (max_turns < 1) throw ConfigError("max_turns must be at least 1");
}

// --- state helpers ----------------------------------------------------------

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view state_name(const SessionState& state) {
    return std::visit(overloaded{
                          [](const session::AwaitInput&) { return "await_input"; },
                          [](const session::Drafting&) { return "drafting"; },
                          [](const session::AwaitClarification&) { return "await_clarification"; },
                          [](const session::ReadyToExecute&) { return "ready_to_execute"; },
                          [](const session::Executed&) { return "executed"; },
                          [](const session::Rejected&) { return "rejected"; },
                          [](const session::Failed&) { return "failed"; },
                      },
                      state);
}

bool is_terminal(const SessionState& state) {
    return std::holds_alternative<session::Executed>(state) ||
           std::holds_alternative<session::Rejected>(state) ||
           std::holds_alternative<session::Failed>(state);
}

std::optional<OrderDraft> current_draft(const SessionState& state) {
    return std::visit(overloaded{
                          [](const session::Drafting& s) -> std::optional<OrderDraft> { return s.draft; },
                          [](const session::AwaitClarification& s) -> std::optional<OrderDraft> {
                              return s.draft;
                          },
                          [](const session::ReadyToExecute& s) -> std::optional<OrderDraft> {
                              return s.order.to_draft();
                          },
                          [](const session::Executed& s) -> std::optional<OrderDraft> {
                              return s.report.order.to_draft();
                          },
                          [](const auto&) -> std::optional<OrderDraft> { return std::nullopt; },
                      },
                      state);
}

std::string_view event_name(const SessionEvent& event) {
    return std::visit(overloaded{
                          [](const UserMessage&) { return "user_message"; },
                          [](const ProviderReply&) { return "provider_reply"; },
                          [](const ConfirmExecute&) { return "confirm_execute"; },
                          [](const FeedTick&) { return "feed_tick"; },
                      },
                      event);
}

std::string render_question(FieldName field) {
    switch (field) {
        case FieldName::Strategy: return "Would you like to use a market order or a limit order?";
        case FieldName::Symbol:
            return "Which stock would you like to trade? Could you specify the stock symbol?";
        case FieldName::OrderType: return "Would you like to buy or sell?";
        case FieldName::Quantity: return "How many shares would you like to trade?";
        case FieldName::Price: return "Could you please tell me what the stock price is?";
    }
    return {};
}

// --- answer merging ---------------------------------------------------------

OrderDraft merge_answer(const OrderDraft& draft, FieldName field, std::string_view answer,
                        const SymbolDirectory& directory) {
    if (!missing_fields(draft).contains(field)) {
        throw std::invalid_argument("field " + std::string(to_string(field)) +
                                    " is not awaiting an answer");
    }
    const auto tokens = lex::tokenize(answer);
    OrderDraft out = draft;

    switch (field) {
        case FieldName::Strategy: {
            auto s = lex::strategy_answer(tokens);
            if (!s) throw Unparseable(field);
            out.strategy = FieldState<Strategy>::present(*s);
            if (*s == Strategy::Market) {
                out.price = FieldState<Money>::not_applicable();
            } else if (out.price.is_not_applicable()) {
                out.price = FieldState<Money>::unknown();
            }
            break;
        }
        case FieldName::Symbol: {
            const auto words = lex::norms(tokens);
            std::optional<TickerSymbol> found;
            for (std::size_t i = 0; i < tokens.size() && !found; ++i) {
                if (auto m = directory.match_at(words, i)) found = m->symbol;
            }
            for (std::size_t i = 0; i < tokens.size() && !found; ++i) {
                if (lex::is_ticker_shaped(tokens[i])) found = TickerSymbol::parse(tokens[i].number);
            }
            if (!found) throw Unparseable(field);
            out.symbol = FieldState<TickerSymbol>::present(*found);
            break;
        }
        case FieldName::OrderType: {
            std::optional<Side> side;
            for (const auto& t : tokens) {
                auto s = lex::side_word(t.norm);
                if (!s) continue;
                if (side && *side != *s) throw Unparseable(field);
                side = s;
            }
            if (!side) throw Unparseable(field);
            out.side = FieldState<Side>::present(*side);
            break;
        }
        case FieldName::Quantity: {
            std::optional<ShareCount> qty;
            for (const auto& t : tokens) {
                if (t.is_number && !t.has_currency) {
                    qty = ShareCount::parse(t.number);
                    break;
                }
            }
            if (!qty) throw Unparseable(field);
            out.quantity = FieldState<ShareCount>::present(*qty);
            break;
        }
        case FieldName::Price: {
            std::optional<Money> price;
            for (const auto& t : tokens) {
                if (t.is_number) {
                    price = Money::parse(t.number);
                    break;
                }
            }
            if (!price) throw Unparseable(field);
            out.price = FieldState<Money>::present(*price);
            break;
        }
    }
    return out;
}

// --- transitions ------------------------------------------------------------

namespace {

std::string describe(const ExecutableOrder& o) {
    std::string s = std::string(to_string(o.side())) + " " + std::to_string(o.quantity().value()) +
                    " shares of " + o.symbol().code();
    if (o.limit_price()) {
        s += " with a limit order at " + o.limit_price()->to_string();
    } else {
        s += " at market";
    }
    return s;
}

std::string describe(const ExecutionReport& r) {
    std::string s = "Order " + std::string(to_string(r.status));
    if (r.fill_price) s += " at " + r.fill_price->to_string();
    if (r.tick) s += " (tick " + std::to_string(*r.tick) + ")";
    return s + ".";
}

StepResult execute_now(const ExecutableOrder& order, const DialogueContext& ctx) {
    if (!ctx.execute) throw std::logic_error("dialogue context has no executor");
    ExecutionReport report = ctx.execute(order);
    StepResult r{session::Executed{report}, {}};
    r.outbound.emplace_back(ExecutionNotice{report});
    r.outbound.emplace_back(Notice{describe(report)});
    return r;
}

StepResult resolve(OrderDraft draft, int turns_used, const DialogueContext& ctx) {
    const FieldSet missing = missing_fields(draft);
    if (missing.empty()) {
        ExecutableOrder order = finalize(draft);
        if (ctx.config.auto_execute) return execute_now(order, ctx);
        StepResult r{session::ReadyToExecute{order}, {}};
        r.outbound.emplace_back(Notice{"Ready to " + describe(order) + ". Confirm to execute."});
        return r;
    }
    auto pending = missing.to_vector();
    const FieldName next = pending.front();
    StepResult r{session::AwaitClarification{std::move(draft), std::move(pending), turns_used}, {}};
    r.outbound.emplace_back(Question{next, render_question(next)});
    return r;
}

const SymbolDirectory& directory_of(const DialogueContext& ctx) {
    if (ctx.directory == nullptr) throw std::logic_error("dialogue context has no symbol directory");
    return *ctx.directory;
}

[[noreturn]] void illegal(const SessionState& state, const SessionEvent& event) {
    throw IllegalEvent(state_name(state), event_name(event));
}

}  // namespace

StepResult step(const SessionState& state, const SessionEvent& event, const DialogueContext& ctx) {
    if (std::holds_alternative<FeedTick>(event)) return StepResult{state, {}};

    if (std::holds_alternative<session::AwaitInput>(state)) {
        const auto* msg = std::get_if<UserMessage>(&event);
        if (msg == nullptr) illegal(state, event);
        const Intent intent = classify_intent(msg->text, directory_of(ctx));
        if (intent != Intent::TradeInstruction) {
            StepResult r{session::Rejected{intent}, {}};
            r.outbound.emplace_back(Notice{"That does not look like a trading instruction, so no order was drafted."});
            return r;
        }
        StepResult r{session::Drafting{msg->text, OrderDraft{}}, {}};
        r.outbound.emplace_back(ProviderRequest{{{Role::System, ctx.system_prompt}, {Role::User, msg->text}}});
        return r;
    }

    if (const auto* s = std::get_if<session::Drafting>(&state)) {
        const auto* reply = std::get_if<ProviderReply>(&event);
        if (reply == nullptr) illegal(state, event);
        OrderDraft draft;
        std::vector<OutboundMessage> notes;
        try {
            draft = parse_reply(reply->text, ctx.config.policy).draft;
        } catch (const Error& e) {
            // Reply without a usable order: read the utterance with the rule extractor.
            draft = rule_extract(s->utterance, directory_of(ctx)).order;
            notes.emplace_back(Notice{std::string("Model reply unusable (") + e.what() +
                                      "); read the instruction directly."});
        }
        StepResult r = resolve(std::move(draft), 0, ctx);
        r.outbound.insert(r.outbound.begin(), notes.begin(), notes.end());
        return r;
    }

    if (const auto* s = std::get_if<session::AwaitClarification>(&state)) {
        const auto* msg = std::get_if<UserMessage>(&event);
        if (msg == nullptr) illegal(state, event);
        if (s->turns_used >= ctx.config.max_turns) {
            StepResult r{session::Failed{"max_turns"}, {}};
            r.outbound.emplace_back(Notice{"Too many clarification rounds; the order was abandoned."});
            return r;
        }
        const FieldName field = s->pending.front();
        try {
            OrderDraft merged = merge_answer(s->draft, field, msg->text, directory_of(ctx));
            return resolve(std::move(merged), s->turns_used + 1, ctx);
        } catch (const Unparseable&) {
            session::AwaitClarification next = *s;
            next.turns_used += 1;
            StepResult r{std::move(next), {}};
            r.outbound.emplace_back(Notice{"Sorry, I could not understand that answer."});
            r.outbound.emplace_back(Question{field, render_question(field)});
            return r;
        }
    }

    if (const auto* s = std::get_if<session::ReadyToExecute>(&state)) {
        if (!std::holds_alternative<ConfirmExecute>(event)) illegal(state, event);
        return execute_now(s->order, ctx);
    }

    illegal(state, event);
}

// --- JSON views -------------------------------------------------------------

ordered_json session_view(const SessionState& state) {
    ordered_json j = ordered_json::object();
    j["state"] = state_name(state);
    auto draft = current_draft(state);
    j["draft"] = draft ? to_wire(*draft) : ordered_json(nullptr);
    j["pending_field"] = nullptr;
    j["pending_question"] = nullptr;
    if (const auto* s = std::get_if<session::AwaitClarification>(&state)) {
        j["pending_field"] = to_string(s->pending.front());
        j["pending_question"] = render_question(s->pending.front());
        j["turns_used"] = s->turns_used;
    }
    if (const auto* s = std::get_if<session::Executed>(&state)) j["last_report"] = to_json(s->report);
    if (const auto* s = std::get_if<session::Rejected>(&state)) j["intent"] = to_string(s->intent);
    if (const auto* s = std::get_if<session::Failed>(&state)) j["reason"] = s->reason;
    return j;
}

ordered_json to_json(const SessionEvent& event) {
    ordered_json j = {{"event", event_name(event)}};
    if (const auto* m = std::get_if<UserMessage>(&event)) j["text"] = m->text;
    if (const auto* m = std::get_if<ProviderReply>(&event)) j["text"] = m->text;
    return j;
}

SessionEvent event_from_json(const json& j) {
    const auto name = j.at("event").get<std::string>();
    if (name == "user_message") return UserMessage{j.at("text").get<std::string>()};
    if (name == "provider_reply") return ProviderReply{j.at("text").get<std::string>()};
    if (name == "confirm_execute") return ConfirmExecute{};
    if (name == "feed_tick") return FeedTick{};
    throw Error("unknown event in log: " + name);
}

ordered_json to_json(const OutboundMessage& message) {
    return std::visit(
        overloaded{
            [](const Notice& m) { return ordered_json{{"kind", "notice"}, {"text", m.text}}; },
            [](const Question& m) {
                return ordered_json{{"kind", "question"}, {"field", to_string(m.field)}, {"text", m.text}};
            },
            [](const ProviderRequest& m) {
                ordered_json turns = ordered_json::array();
                for (const auto& t : m.transcript) {
                    turns.push_back({{"role", to_string(t.role)}, {"content", t.content}});
                }
                return ordered_json{{"kind", "provider_request"}, {"transcript", turns}};
            },
            [](const ExecutionNotice& m) {
                return ordered_json{{"kind", "execution"}, {"report", to_json(m.report)}};
            },
        },
        message);
}

// --- transcript log ---------------------------------------------------------

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

TranscriptLog::TranscriptLog(std::ostream& out, Clock clock)
    : out_(&out), clock_(clock ? std::move(clock) : Clock(utc_timestamp)) {}

void TranscriptLog::record(const std::string& session_id, const SessionState& from,
                           const SessionEvent& event, const StepResult& result) {
    const std::string ts = clock_();
    ordered_json e = {{"ts", ts}, {"session", session_id}, {"kind", "event"}};
    e.update(to_json(event));
    ordered_json t = {{"ts", ts},
                      {"session", session_id},
                      {"kind", "transition"},
                      {"from", state_name(from)},
                      {"to", state_name(result.state)}};
    t["view"] = session_view(result.state);
    t["outbound"] = ordered_json::array();
    for (const auto& m : result.outbound) t["outbound"].push_back(to_json(m));
    *out_ << e.dump() << '\n' << t.dump() << '\n';
    out_->flush();
}

std::vector<SessionEvent> read_events(std::istream& log, const std::string& session_id) {
    std::vector<SessionEvent> events;
    std::string line;
    int line_no = 0;
    while (std::getline(log, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error("transcript line " + std::to_string(line_no) + " is not a JSON object");
        }
        if (j.value("kind", "") != "event" || j.value("session", "") != session_id) continue;
        events.push_back(event_from_json(j));
    }
    return events;
}

SessionState replay(const std::vector<SessionEvent>& events, const DialogueContext& ctx) {
    SessionState state = session::AwaitInput{};
    for (const auto& e : events) state = step(state, e, ctx).state;
    return state;
}

}  // namespace orderline
