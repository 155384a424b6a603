#include <gtest/gtest.h>

#include "orderline/order.hpp"

using namespace orderline;

namespace {

OrderDraft complete_limit() {
    OrderDraft d;
    d.strategy = FieldState<Strategy>::present(Strategy::Limit);
    d.symbol = FieldState<TickerSymbol>::present(TickerSymbol::from("600519"));
    d.side = FieldState<Side>::present(Side::Buy);
    d.price = FieldState<Money>::present(*Money::parse("1800"));
    d.quantity = FieldState<ShareCount>::present(*ShareCount::of(200));
    return d;
}

}  // namespace

TEST(TickerSymbol, AcceptsFiveAndSixDigitCodes) {
    EXPECT_TRUE(TickerSymbol::parse("600519"));
    EXPECT_TRUE(TickerSymbol::parse("00700"));
    EXPECT_TRUE(TickerSymbol::parse("000002"));
    EXPECT_FALSE(TickerSymbol::parse("0070"));
    EXPECT_FALSE(TickerSymbol::parse("6005190"));
    EXPECT_FALSE(TickerSymbol::parse("60051a"));
    EXPECT_FALSE(TickerSymbol::parse(""));
    EXPECT_THROW(TickerSymbol::from("abc"), std::invalid_argument);
}

TEST(Money, ParsesCurrencyMarksAndGrouping) {
    EXPECT_EQ(Money::parse("1800")->cents(), 180000);
    EXPECT_EQ(Money::parse("$7")->cents(), 700);
    EXPECT_EQ(Money::parse("¥35.2")->cents(), 3520);
    EXPECT_EQ(Money::parse("￥35.25")->cents(), 3525);
    EXPECT_EQ(Money::parse("1,800.00")->cents(), 180000);
    EXPECT_EQ(Money::parse("18.600")->cents(), 1860);
}

TEST(Money, RejectsNonPositiveAndSubCent) {
    EXPECT_FALSE(Money::parse("0"));
    EXPECT_FALSE(Money::parse("-5"));
    EXPECT_FALSE(Money::parse("1.005"));
    EXPECT_FALSE(Money::parse("abc"));
    EXPECT_FALSE(Money::parse("1,80"));
    EXPECT_FALSE(Money::from_double(0.0));
    EXPECT_FALSE(Money::from_double(1.234));
    EXPECT_THROW(Money::from_cents(0), std::invalid_argument);
}

TEST(Money, ShortestStringForm) {
    EXPECT_EQ(Money::parse("1800")->to_string(), "1800");
    EXPECT_EQ(Money::parse("18.6")->to_string(), "18.6");
    EXPECT_EQ(Money::parse("35.25")->to_string(), "35.25");
    EXPECT_DOUBLE_EQ(Money::parse("520.5")->as_double(), 520.5);
}

TEST(ShareCount, PositiveIntegersOnly) {
    EXPECT_EQ(ShareCount::parse("1,000")->value(), 1000u);
    EXPECT_EQ(ShareCount::of(1)->value(), 1u);
    EXPECT_FALSE(ShareCount::of(0));
    EXPECT_FALSE(ShareCount::of(-3));
    EXPECT_FALSE(ShareCount::parse("2.5"));
    EXPECT_FALSE(ShareCount::parse("a few"));
}

TEST(FieldSet, IteratesInAskOrder) {
    FieldSet s{FieldName::Price, FieldName::Strategy, FieldName::Quantity};
    const std::vector<FieldName> want = {FieldName::Strategy, FieldName::Quantity, FieldName::Price};
    EXPECT_EQ(s.to_vector(), want);
    EXPECT_EQ(s.to_string(), "{strategy, quantity, price}");
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s.first(), FieldName::Strategy);
    EXPECT_TRUE(FieldSet{FieldName::Price}.is_subset_of(s));
    EXPECT_FALSE(s.is_subset_of(FieldSet{FieldName::Price}));
    EXPECT_EQ(s.minus(FieldSet{FieldName::Price}), (FieldSet{FieldName::Strategy, FieldName::Quantity}));
    EXPECT_TRUE(FieldSet{}.empty());
    EXPECT_EQ(FieldSet::all().size(), 5u);
}

TEST(FieldName, WireKeysRoundTrip) {
    for (auto f : kWireOrder) EXPECT_EQ(parse_field_name(to_string(f)), f);
    EXPECT_EQ(to_string(FieldName::OrderType), "order_type");
    EXPECT_FALSE(parse_field_name("side"));
}

TEST(MissingFields, CompleteLimitHasNone) { EXPECT_TRUE(missing_fields(complete_limit()).empty()); }

TEST(MissingFields, MarketOrderNeverNeedsPrice) {
    OrderDraft d = complete_limit();
    d.strategy = FieldState<Strategy>::present(Strategy::Market);
    d.price = FieldState<Money>::not_applicable();
    EXPECT_TRUE(missing_fields(d).empty());
}

TEST(MissingFields, UnresolvedStrategyKeepsPriceOpen) {
    OrderDraft d = complete_limit();
    d.strategy = FieldState<Strategy>::unknown();
    d.price = FieldState<Money>::unknown();
    EXPECT_EQ(missing_fields(d), (FieldSet{FieldName::Strategy, FieldName::Price}));
    d.price = FieldState<Money>::not_applicable();
    EXPECT_EQ(missing_fields(d), (FieldSet{FieldName::Strategy, FieldName::Price}));
    d.price = FieldState<Money>::present(*Money::parse("10"));
    EXPECT_EQ(missing_fields(d), FieldSet{FieldName::Strategy});
}

TEST(MissingFields, EmptyDraftMissesEverything) { EXPECT_EQ(missing_fields(OrderDraft{}), FieldSet::all()); }

TEST(Invariants, LimitWithNoneAndMarketWithPriceAreViolations) {
    OrderDraft d = complete_limit();
    EXPECT_FALSE(invariant_violation(d));
    d.price = FieldState<Money>::not_applicable();
    EXPECT_TRUE(invariant_violation(d));
    d = complete_limit();
    d.strategy = FieldState<Strategy>::present(Strategy::Market);
    EXPECT_TRUE(invariant_violation(d));
}

TEST(Finalize, BuildsLimitAndMarketOrders) {
    auto order = finalize(complete_limit());
    EXPECT_EQ(order.strategy(), Strategy::Limit);
    EXPECT_EQ(order.limit_price()->cents(), 180000);
    EXPECT_EQ(order.to_draft(), complete_limit());

    OrderDraft m = complete_limit();
    m.strategy = FieldState<Strategy>::present(Strategy::Market);
    m.price = FieldState<Money>::not_applicable();
    auto market = finalize(m);
    EXPECT_EQ(market.strategy(), Strategy::Market);
    EXPECT_FALSE(market.limit_price());
    EXPECT_EQ(market.to_draft(), m);
}

TEST(Finalize, ListsExactlyTheMissingFields) {
    OrderDraft d = complete_limit();
    d.quantity = FieldState<ShareCount>::unknown();
    d.price = FieldState<Money>::unknown();
    try {
        finalize(d);
        FAIL() << "expected IncompleteOrder";
    } catch (const IncompleteOrder& e) {
        EXPECT_EQ(e.missing(), (FieldSet{FieldName::Quantity, FieldName::Price}));
    }
}

TEST(Finalize, RejectsInvariantViolation) {
    OrderDraft d = complete_limit();
    d.strategy = FieldState<Strategy>::present(Strategy::Market);
    EXPECT_THROW(finalize(d), std::invalid_argument);
}
