#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "orderline/exchange.hpp"

using namespace orderline;

namespace {

const TickerSymbol kSym = TickerSymbol::from("600519");

Money px(const char* s) { return *Money::parse(s); }
ShareCount qty(std::int64_t n) { return *ShareCount::of(n); }

PriceFeed feed_of(std::initializer_list<std::pair<std::uint64_t, const char*>> pts) {
    PriceFeed f;
    for (auto [t, p] : pts) f.append(kSym, t, px(p));
    return f;
}

// Independent reference: plain index loop over (tick, cents) pairs.
struct Expect {
    bool filled;
    std::int64_t cents;
    std::uint64_t tick;
};

Expect first_crossing(const std::vector<std::pair<std::uint64_t, std::int64_t>>& quotes, bool buy,
                      std::int64_t limit, std::uint64_t horizon) {
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        if (quotes[i].first - quotes[0].first > horizon) break;
        const bool hit = buy ? quotes[i].second <= limit : quotes[i].second >= limit;
        if (hit) return {true, quotes[i].second, quotes[i].first};
    }
    return {false, 0, 0};
}

}  // namespace

TEST(PriceFeed, RejectsNonIncreasingTicks) {
    PriceFeed f;
    f.append(kSym, 5, px("1"));
    EXPECT_THROW(f.append(kSym, 5, px("2")), ConfigError);
}

TEST(PriceFeed, CsvRoundTripAndErrors) {
    std::istringstream in("symbol,tick,price\n600519,0,1800\n600519,3,1799.5\n00700,1,500.25\n");
    const auto f = PriceFeed::read_csv(in);
    std::ostringstream out;
    f.write_csv(out);
    std::istringstream again(out.str());
    std::ostringstream out2;
    PriceFeed::read_csv(again).write_csv(out2);
    EXPECT_EQ(out.str(), out2.str());
    EXPECT_EQ(f.series(kSym).size(), 2u);

    for (const char* bad : {"600519,x,1\n", "abc,1,1\n", "600519,1\n", "600519,1,-2\n"}) {
        std::istringstream b(bad);
        EXPECT_THROW(PriceFeed::read_csv(b), ConfigError) << bad;
    }
}

TEST(PriceFeed, RandomWalkIsSeededAndBounded) {
    const auto a = PriceFeed::random_walk(kSym, px("100"), 500, 9);
    const auto b = PriceFeed::random_walk(kSym, px("100"), 500, 9);
    std::ostringstream sa, sb;
    a.write_csv(sa);
    b.write_csv(sb);
    EXPECT_EQ(sa.str(), sb.str());
    const auto s = a.series(kSym);
    ASSERT_EQ(s.size(), 500u);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double r = static_cast<double>(s[i].price.cents()) / static_cast<double>(s[i - 1].price.cents());
        EXPECT_GE(r, 0.99 - 0.005);
        EXPECT_LE(r, 1.01 + 0.005);
    }
}

TEST(Submit, MarketFillsAtFirstQuoteAtOrAfterNow) {
    const auto f = feed_of({{0, "10"}, {4, "11"}, {9, "12"}});
    const auto order = ExecutableOrder::market(kSym, Side::Buy, qty(100));
    auto r = submit(order, f, kDefaultHorizon, 2);
    EXPECT_EQ(r.status, FillStatus::Filled);
    EXPECT_EQ(r.fill_price->cents(), 1100);
    EXPECT_EQ(*r.tick, 4u);
    EXPECT_THROW(submit(order, f, kDefaultHorizon, 10), UnknownSymbolFeed);
    EXPECT_THROW(submit(ExecutableOrder::market(TickerSymbol::from("00700"), Side::Buy, qty(1)), f),
                 UnknownSymbolFeed);
}

TEST(Submit, LimitFillsAtQuotePriceOnFirstCross) {
    const auto f = feed_of({{0, "1810"}, {1, "1805"}, {2, "1799"}, {3, "1790"}});
    auto buy = submit(ExecutableOrder::limit(kSym, Side::Buy, px("1800"), qty(200)), f);
    EXPECT_EQ(buy.status, FillStatus::Filled);
    EXPECT_EQ(buy.fill_price->cents(), 179900);
    EXPECT_EQ(*buy.tick, 2u);

    auto sell = submit(ExecutableOrder::limit(kSym, Side::Sell, px("1805"), qty(1)), f);
    EXPECT_EQ(*sell.tick, 0u);
    EXPECT_EQ(sell.fill_price->cents(), 181000);
}

TEST(Submit, NoCrossIsExpiredOrRestingByHorizon) {
    const auto f = feed_of({{0, "10"}, {1, "11"}, {50, "5"}});
    const auto order = ExecutableOrder::limit(kSym, Side::Buy, px("6"), qty(1));
    auto expired = submit(order, f, 10);
    EXPECT_EQ(expired.status, FillStatus::Expired);
    EXPECT_EQ(*expired.tick, 1u);
    EXPECT_EQ(submit(order, f, 100).status, FillStatus::Filled);
    auto strict_feed = feed_of({{0, "10"}, {1, "11"}});
    EXPECT_EQ(submit(order, strict_feed, std::nullopt).status, FillStatus::Resting);
}

TEST(Submit, LimitMatchesBruteForceOracle) {
    std::mt19937_64 rng(20240607);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::pair<std::uint64_t, std::int64_t>> quotes;
        PriceFeed f;
        std::uint64_t t = rng() % 5;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const std::int64_t cents = 9000 + static_cast<std::int64_t>(rng() % 2001);
            quotes.emplace_back(t, cents);
            f.append(kSym, t, Money::from_cents(cents));
            t += 1 + rng() % 7;
        }
        const bool buy = rng() % 2 == 0;
        const std::int64_t limit = 9000 + static_cast<std::int64_t>(rng() % 2001);
        const std::uint64_t horizon = rng() % 120;
        const auto order =
            ExecutableOrder::limit(kSym, buy ? Side::Buy : Side::Sell, Money::from_cents(limit), qty(1));
        const auto r = submit(order, f, horizon);
        const auto want = first_crossing(quotes, buy, limit, horizon);
        ASSERT_EQ(r.status == FillStatus::Filled, want.filled) << "trial " << trial;
        if (want.filled) {
            EXPECT_EQ(r.fill_price->cents(), want.cents);
            EXPECT_EQ(*r.tick, want.tick);
        }
    }
}

TEST(Portfolio, FillsMovePositionsAndOversellIsRejected) {
    Venue v(feed_of({{0, "10"}, {1, "10"}}));
    EXPECT_THROW(v.execute(ExecutableOrder::market(kSym, Side::Sell, qty(1))), OversellRejected);
    EXPECT_TRUE(v.portfolio().trade_log.empty());
    v.execute(ExecutableOrder::market(kSym, Side::Buy, qty(300)));
    v.execute(ExecutableOrder::market(kSym, Side::Sell, qty(100)));
    EXPECT_EQ(v.portfolio().position(kSym), 200);
    EXPECT_EQ(v.portfolio().trade_log.size(), 2u);
    EXPECT_THROW(v.execute(ExecutableOrder::market(kSym, Side::Sell, qty(201))), OversellRejected);
    EXPECT_EQ(v.portfolio().position(kSym), 200);
}

TEST(Portfolio, ShortSellingAllowedWithoutProtection) {
    Venue v(feed_of({{0, "10"}}), Venue::Options{kDefaultHorizon, false});
    v.execute(ExecutableOrder::market(kSym, Side::Sell, qty(50)));
    EXPECT_EQ(v.portfolio().position(kSym), -50);
}

TEST(Portfolio, ApplyFillRequiresFilledReport) {
    const auto order = ExecutableOrder::limit(kSym, Side::Buy, px("1"), qty(1));
    ExecutionReport r{FillStatus::Expired, order, std::nullopt, 0, {}};
    EXPECT_THROW(apply_fill({}, r), std::invalid_argument);
}

TEST(ExecutionReport, JsonShape) {
    const auto f = feed_of({{0, "18.6"}});
    const auto r = submit(ExecutableOrder::market(kSym, Side::Buy, qty(100)), f);
    EXPECT_EQ(to_json(r).dump(),
              R"({"status":"filled","fill_price":18.6,"tick":0,"order":{"strategy":"market order","symbol":"600519","order_type":"buy","price":"None","quantity":100}})");
}
