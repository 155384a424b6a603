#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "orderline/bench.hpp"
#include "orderline/dialogue.hpp"
#include "support/test_support.hpp"

using namespace orderline;

namespace {

SymbolDirectory ku_directory() {
    auto dir = SymbolDirectory::builtin();
    dir.add("ku", TickerSymbol::from("688001"));  // fictional code for a fictional company
    return dir;
}

template <typename T>
const T* find_outbound(const StepResult& r) {
    for (const auto& m : r.outbound)
        if (auto p = std::get_if<T>(&m)) return p;
    return nullptr;
}

struct Harness {
    SymbolDirectory dir = ku_directory();
    PriceFeed feed;
    std::unique_ptr<Venue> venue;
    DialogueContext ctx;

    explicit Harness(SessionConfig cfg = {}) {
        feed.append(TickerSymbol::from("688001"), 0, *Money::parse("7.2"));
        feed.append(TickerSymbol::from("688001"), 1, *Money::parse("6.95"));
        feed.append(TickerSymbol::from("600519"), 0, *Money::parse("1790"));
        venue = std::make_unique<Venue>(feed);
        ctx.directory = &dir;
        ctx.config = cfg;
        ctx.execute = [this](const ExecutableOrder& o) { return venue->execute(o); };
        ctx.system_prompt = render_system_prompt(dir);
    }
};

const char* kKuUtterance = "KU's tech is going to be really popular, I'll buy 1000 shares of it.";
const char* kKuReply =
    R"({"strategy":"limit order","symbol":"688001","order_type":"buy","price":null,"quantity":1000})";

}  // namespace

// --- intent -----------------------------------------------------------------

TEST(ClassifyIntent, Examples) {
    const auto dir = SymbolDirectory::builtin();
    EXPECT_EQ(classify_intent("If Moutai's stock price can fall to 1800, I will take the opportunity to stock up "
                              "and plan to buy 200 shares of it.",
                              dir),
              Intent::TradeInstruction);
    EXPECT_EQ(classify_intent("The Skyworth figure in my hand has risen a lot.", dir), Intent::TradeRelated);
    EXPECT_EQ(classify_intent("What's for lunch?", dir), Intent::Other);
}

TEST(ClassifyIntent, MatchesBundledCorpusCategories) {
    const auto dir = orderline::testing::bundled_directory();
    const auto records = load_dataset(orderline::testing::data_dir() / "datasets" / "canonical.jsonl");
    for (const auto& r : records) EXPECT_EQ(classify_intent(r.input_text, dir), r.category) << r.id;
}

TEST(Intent, NamesRoundTrip) {
    for (auto i : {Intent::TradeInstruction, Intent::TradeRelated, Intent::Other})
        EXPECT_EQ(parse_intent(to_string(i)), i);
    EXPECT_FALSE(parse_intent("chitchat"));
}

// --- questions and answers --------------------------------------------------

TEST(RenderQuestion, FixedTemplates) {
    EXPECT_EQ(render_question(FieldName::Price), "Could you please tell me what the stock price is?");
    EXPECT_NE(render_question(FieldName::Quantity).find("shares"), std::string::npos);
    for (auto f : kAskOrder) EXPECT_EQ(render_question(f), render_question(f));
}

TEST(MergeAnswer, FillsOnlyTheAskedField) {
    const auto dir = ku_directory();
    const auto draft = parse_draft(kKuReply, ExtractionPolicy::Strict).draft;
    const auto merged = merge_answer(draft, FieldName::Price, "$7", dir);
    EXPECT_EQ(merged.price.value().cents(), 700);
    auto expected = draft;
    expected.price = merged.price;
    EXPECT_EQ(merged, expected);
}

TEST(MergeAnswer, MarketStrategyDropsPrice) {
    OrderDraft d;
    const auto merged = merge_answer(d, FieldName::Strategy, "market order please", ku_directory());
    EXPECT_EQ(merged.strategy.value(), Strategy::Market);
    EXPECT_TRUE(merged.price.is_not_applicable());
    EXPECT_FALSE(missing_fields(merged).contains(FieldName::Price));
}

TEST(MergeAnswer, ReadsEachFieldKind) {
    const auto dir = ku_directory();
    OrderDraft d;
    EXPECT_EQ(merge_answer(d, FieldName::Symbol, "ku", dir).symbol.value().code(), "688001");
    EXPECT_EQ(merge_answer(d, FieldName::Symbol, "the code is 600519", dir).symbol.value().code(), "600519");
    EXPECT_EQ(merge_answer(d, FieldName::OrderType, "sell it", dir).side.value(), Side::Sell);
    EXPECT_EQ(merge_answer(d, FieldName::Quantity, "1,000 shares", dir).quantity.value().value(), 1000u);
    EXPECT_EQ(merge_answer(d, FieldName::Strategy, "a limit order", dir).strategy.value(), Strategy::Limit);
}

TEST(MergeAnswer, UnparseableAndPreconditions) {
    const auto dir = ku_directory();
    OrderDraft d;
    EXPECT_THROW(merge_answer(d, FieldName::Quantity, "a few", dir), Unparseable);
    EXPECT_THROW(merge_answer(d, FieldName::OrderType, "buy or sell, not sure", dir), Unparseable);
    EXPECT_THROW(merge_answer(d, FieldName::Symbol, "that one", dir), Unparseable);
    d.quantity = FieldState<ShareCount>::present(*ShareCount::of(5));
    EXPECT_THROW(merge_answer(d, FieldName::Quantity, "10", dir), std::invalid_argument);
}

// --- transitions ------------------------------------------------------------

TEST(Step, KuFlowAsksForPriceThenExecutesOnConfirm) {
    Harness h;
    auto r = step(session::AwaitInput{}, UserMessage{kKuUtterance}, h.ctx);
    ASSERT_TRUE(std::holds_alternative<session::Drafting>(r.state));
    const auto* req = find_outbound<ProviderRequest>(r);
    ASSERT_NE(req, nullptr);
    ASSERT_EQ(req->transcript.size(), 2u);
    EXPECT_EQ(req->transcript[1].content, kKuUtterance);

    r = step(r.state, ProviderReply{kKuReply}, h.ctx);
    const auto* wait = std::get_if<session::AwaitClarification>(&r.state);
    ASSERT_NE(wait, nullptr);
    EXPECT_EQ(wait->pending, std::vector<FieldName>{FieldName::Price});
    const auto* q = find_outbound<Question>(r);
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(q->text, "Could you please tell me what the stock price is?");

    r = step(r.state, UserMessage{"$7"}, h.ctx);
    const auto* ready = std::get_if<session::ReadyToExecute>(&r.state);
    ASSERT_NE(ready, nullptr);
    EXPECT_EQ(ready->order.limit_price()->cents(), 700);
    EXPECT_EQ(ready->order.quantity().value(), 1000u);

    r = step(r.state, ConfirmExecute{}, h.ctx);
    const auto* done = std::get_if<session::Executed>(&r.state);
    ASSERT_NE(done, nullptr);
    EXPECT_EQ(done->report.status, FillStatus::Filled);
    EXPECT_EQ(done->report.fill_price->cents(), 695);
    EXPECT_EQ(h.venue->portfolio().position(TickerSymbol::from("688001")), 1000);
}

TEST(Step, CompleteMarketOrderIsReadyWithoutQuestions) {
    Harness h;
    const std::string text = "I intend to buy 100 shares of Kweichow Moutai while the current stock price is reasonable";
    RuleBasedProvider provider(h.dir);
    auto r = step(session::AwaitInput{}, UserMessage{text}, h.ctx);
    const auto* req = find_outbound<ProviderRequest>(r);
    ASSERT_NE(req, nullptr);
    r = step(r.state, ProviderReply{complete(req->transcript, provider)}, h.ctx);
    EXPECT_TRUE(std::holds_alternative<session::ReadyToExecute>(r.state));
    EXPECT_EQ(find_outbound<Question>(r), nullptr);
}

TEST(Step, AutoExecuteSkipsConfirmation) {
    Harness h(SessionConfig{5, true, ExtractionPolicy::Lenient});
    auto r = step(session::AwaitInput{}, UserMessage{kKuUtterance}, h.ctx);
    r = step(r.state, ProviderReply{kKuReply}, h.ctx);
    r = step(r.state, UserMessage{"7"}, h.ctx);
    EXPECT_TRUE(std::holds_alternative<session::Executed>(r.state));
    EXPECT_NE(find_outbound<ExecutionNotice>(r), nullptr);
}

TEST(Step, NonTradeInputIsRejectedWithoutProvider) {
    Harness h;
    auto r = step(session::AwaitInput{}, UserMessage{"What's for lunch?"}, h.ctx);
    const auto* rej = std::get_if<session::Rejected>(&r.state);
    ASSERT_NE(rej, nullptr);
    EXPECT_EQ(rej->intent, Intent::Other);
    EXPECT_EQ(find_outbound<ProviderRequest>(r), nullptr);
    EXPECT_NE(find_outbound<Notice>(r), nullptr);
}

TEST(Step, SixUnhelpfulAnswersFailAtMaxTurnsFive) {
    Harness h;
    auto r = step(session::AwaitInput{}, UserMessage{kKuUtterance}, h.ctx);
    r = step(r.state, ProviderReply{kKuReply}, h.ctx);
    for (int i = 0; i < 5; ++i) {
        r = step(r.state, UserMessage{"no idea"}, h.ctx);
        const auto* wait = std::get_if<session::AwaitClarification>(&r.state);
        ASSERT_NE(wait, nullptr);
        EXPECT_EQ(wait->turns_used, i + 1);
        ASSERT_NE(find_outbound<Question>(r), nullptr);
    }
    r = step(r.state, UserMessage{"still no idea"}, h.ctx);
    const auto* failed = std::get_if<session::Failed>(&r.state);
    ASSERT_NE(failed, nullptr);
    EXPECT_EQ(failed->reason, "max_turns");
}

TEST(Step, UnusableReplyFallsBackToRuleGrammar) {
    Harness h;
    auto r = step(session::AwaitInput{}, UserMessage{kKuUtterance}, h.ctx);
    r = step(r.state, ProviderReply{"I cannot produce JSON today."}, h.ctx);
    const auto* wait = std::get_if<session::AwaitClarification>(&r.state);
    ASSERT_NE(wait, nullptr);
    EXPECT_EQ(wait->draft.symbol.value().code(), "688001");
    EXPECT_EQ(wait->pending.front(), FieldName::Strategy);
}

TEST(Step, IllegalEventsThrowAndLeaveStateAlone) {
    Harness h;
    const SessionState start = session::AwaitInput{};
    EXPECT_THROW(step(start, ConfirmExecute{}, h.ctx), IllegalEvent);
    EXPECT_THROW(step(start, ProviderReply{"{}"}, h.ctx), IllegalEvent);
    EXPECT_TRUE(std::holds_alternative<session::AwaitInput>(step(start, FeedTick{}, h.ctx).state));
    const SessionState failed = session::Failed{"x"};
    EXPECT_THROW(step(failed, UserMessage{"hi"}, h.ctx), IllegalEvent);
}

TEST(Step, OversellFromExecutorPropagates) {
    Harness h;
    const std::string sell =
        R"({"strategy":"market order","symbol":"600519","order_type":"sell","price":"None","quantity":10})";
    auto r = step(session::AwaitInput{}, UserMessage{"Sell 10 shares of Moutai at market"}, h.ctx);
    r = step(r.state, ProviderReply{sell}, h.ctx);
    ASSERT_TRUE(std::holds_alternative<session::ReadyToExecute>(r.state));
    const SessionState ready = r.state;
    EXPECT_THROW(step(ready, ConfirmExecute{}, h.ctx), OversellRejected);
    EXPECT_TRUE(std::holds_alternative<session::ReadyToExecute>(ready));
}

// --- random trajectories ------------------------------------------------------

namespace {

std::string random_reply(std::mt19937_64& rng) {
    static const char* strategies[] = {"null", "\"limit order\"", "\"market order\""};
    static const char* symbols[] = {"null", "\"688001\"", "\"600519\""};
    static const char* sides[] = {"null", "\"buy\"", "\"sell\""};
    static const char* prices[] = {"null", "\"None\"", "7.0", "12.5"};
    static const char* quantities[] = {"null", "100", "1000"};
    if (rng() % 10 == 0) return "no json here";
    return std::string("{\"strategy\":") + strategies[rng() % 3] + ",\"symbol\":" + symbols[rng() % 3] +
           ",\"order_type\":" + sides[rng() % 3] + ",\"price\":" + prices[rng() % 4] +
           ",\"quantity\":" + quantities[rng() % 3] + "}";
}

std::string random_answer(std::mt19937_64& rng) {
    static const char* answers[] = {"$7",    "market order", "limit",   "ku", "600519", "buy",
                                    "sell",  "500 shares",   "a few",   "?",  "12.5",   "hmm",
                                    "Sell 10 shares of Moutai", kKuUtterance};
    return answers[rng() % std::size(answers)];
}

SessionEvent random_event(std::mt19937_64& rng) {
    switch (rng() % 5) {
        case 0: return ProviderReply{random_reply(rng)};
        case 1: return ConfirmExecute{};
        case 2: return FeedTick{};
        default: return UserMessage{random_answer(rng)};
    }
}

}  // namespace

TEST(Fuzz, TenThousandTrajectoriesKeepSafetyInvariants) {
    std::mt19937_64 rng(7);
    for (int seq = 0; seq < 10000; ++seq) {
        Harness h(SessionConfig{1 + static_cast<int>(rng() % 5), rng() % 4 == 0, ExtractionPolicy::Lenient});
        SessionState state = session::AwaitInput{};
        for (int k = 0; k < 24 && !is_terminal(state); ++k) {
            const auto event = random_event(rng);
            StepResult r;
            try {
                r = step(state, event, h.ctx);
            } catch (const IllegalEvent&) {
                continue;
            } catch (const OversellRejected&) {
                continue;
            }
            if (std::holds_alternative<session::Executed>(r.state) &&
                !std::holds_alternative<session::ReadyToExecute>(state)) {
                // Only auto-execute may jump there, and only once the draft completed.
                ASSERT_TRUE(h.ctx.config.auto_execute);
                ASSERT_NE(find_outbound<ExecutionNotice>(r), nullptr);
            }
            if (const auto* ready = std::get_if<session::ReadyToExecute>(&r.state)) {
                ASSERT_TRUE(missing_fields(ready->order.to_draft()).empty());
                ASSERT_FALSE(invariant_violation(ready->order.to_draft()));
            }
            const auto draft = current_draft(r.state);
            for (const auto& m : r.outbound) {
                if (const auto* q = std::get_if<Question>(&m)) {
                    ASSERT_TRUE(draft.has_value());
                    ASSERT_TRUE(missing_fields(*draft).contains(q->field)) << "seq " << seq;
                }
            }
            if (const auto* before = std::get_if<session::AwaitClarification>(&state); before && draft) {
                ASSERT_LE(missing_fields(*draft).size(), missing_fields(before->draft).size());
            }
            if (const auto* wait = std::get_if<session::AwaitClarification>(&r.state))
                ASSERT_LE(wait->turns_used, h.ctx.config.max_turns);
            state = r.state;
        }
    }
}

// --- transcript log -----------------------------------------------------------

TEST(TranscriptLog, ReplayReproducesFinalState) {
    Harness h;
    std::ostringstream log_text;
    TranscriptLog log(log_text, [] { return std::string("2024-01-01T00:00:00Z"); });

    SessionState state = session::AwaitInput{};
    const std::vector<SessionEvent> events = {UserMessage{kKuUtterance}, ProviderReply{kKuReply},
                                              UserMessage{"$7"}};
    for (const auto& e : events) {
        auto r = step(state, e, h.ctx);
        log.record("s1", state, e, r);
        log.record("s2", state, FeedTick{}, StepResult{state, {}});  // interleaved noise
        state = r.state;
    }
    std::istringstream in(log_text.str());
    const auto read = read_events(in, "s1");
    ASSERT_EQ(read.size(), 3u);
    const auto replayed = replay(read, h.ctx);
    EXPECT_EQ(session_view(replayed), session_view(state));

    std::istringstream lines(log_text.str());
    std::string line;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j["ts"], "2024-01-01T00:00:00Z");
        EXPECT_TRUE(j["kind"] == "event" || j["kind"] == "transition");
    }
}

TEST(SessionView, ShowsPendingQuestion) {
    Harness h;
    auto r = step(session::AwaitInput{}, UserMessage{kKuUtterance}, h.ctx);
    r = step(r.state, ProviderReply{kKuReply}, h.ctx);
    const auto v = session_view(r.state);
    EXPECT_EQ(v["state"], "await_clarification");
    EXPECT_EQ(v["pending_field"], "price");
    EXPECT_EQ(v["pending_question"], "Could you please tell me what the stock price is?");
    EXPECT_EQ(v["draft"]["symbol"], "688001");
}
