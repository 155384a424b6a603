#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "orderline/errors.hpp"
#include "orderline/order.hpp"

namespace orderline {

struct PricePoint {
    std::uint64_t tick;
    Money price;
};

/// Per-symbol quote series with strictly increasing ticks.
class PriceFeed {
public:
    void append(const TickerSymbol& symbol, std::uint64_t tick, Money price);

    // CSV `symbol,tick,price`, header line optional.
    static PriceFeed read_csv(std::istream& in);
    static PriceFeed load_csv(const std::filesystem::path& path);
    void write_csv(std::ostream& out) const;

    /// Multiplicative walk: each step scales by a factor uniform in
    /// [0.99, 1.01], rounded to cents and floored at 0.01. Ticks run 0..n-1.
    static PriceFeed random_walk(const TickerSymbol& symbol, Money start, std::size_t ticks,
                                 std::uint64_t seed);
    void merge(const PriceFeed& other);

    std::span<const PricePoint> series(const TickerSymbol& symbol) const;
    bool empty() const { return series_.empty(); }

private:
    std::map<std::string, std::vector<PricePoint>> series_;
};

enum class FillStatus { Filled, Resting, Expired, Rejected };
std::string_view to_string(FillStatus status);

struct ExecutionReport {
    FillStatus status;
    ExecutableOrder order;
    std::optional<Money> fill_price;  // set iff Filled
    std::optional<std::uint64_t> tick;  // fill tick, or last tick scanned
    std::string reason;                 // Rejected only
};

nlohmann::ordered_json to_json(const ExecutionReport& report);

class UnknownSymbolFeed : public Error {
public:
    explicit UnknownSymbolFeed(const std::string& code)
        : Error("no price feed at or after the current tick for symbol " + code) {}
};

class OversellRejected : public Error {
public:
    OversellRejected(const std::string& code, std::int64_t held, std::uint64_t wanted)
        : Error("oversell rejected for " + code + ": holding " + std::to_string(held) +
                ", selling " + std::to_string(wanted)) {}
};

inline constexpr std::uint64_t kDefaultHorizon = 1000;

/// Market orders fill at the first quote at or after `now`. Limit orders scan
/// quotes with tick <= start + horizon and fill at the first one that crosses
/// the limit (buy: price <= limit, sell: price >= limit), at that quote's
/// price. No crossing gives Expired, or Resting when the horizon is unbounded.
ExecutionReport submit(const ExecutableOrder& order, const PriceFeed& feed,
                       std::optional<std::uint64_t> horizon = kDefaultHorizon,
                       std::uint64_t now = 0);

struct Portfolio {
    std::map<std::string, std::int64_t> positions;
    std::vector<ExecutionReport> trade_log;

    std::int64_t position(const TickerSymbol& symbol) const;
};

// Requires report.status == Filled. Throws OversellRejected when protection
// is on and the position is smaller than the sell quantity.
Portfolio apply_fill(Portfolio portfolio, const ExecutionReport& report,
                     bool oversell_protection = true);

/// One simulated venue: a feed, a clock and a portfolio. Single owner.
class Venue {
public:
    struct Options {
        std::optional<std::uint64_t> horizon = kDefaultHorizon;
        bool oversell_protection = true;
    };

    explicit Venue(PriceFeed feed) : Venue(std::move(feed), Options{}) {}
    Venue(PriceFeed feed, Options options) : feed_(std::move(feed)), options_(options) {}

    // Checks oversell first, then submits; fills are applied to the portfolio.
    ExecutionReport execute(const ExecutableOrder& order);

    const Portfolio& portfolio() const { return portfolio_; }
    const PriceFeed& feed() const { return feed_; }
    std::uint64_t now() const { return now_; }
    void advance(std::uint64_t ticks) { now_ += ticks; }

private:
    PriceFeed feed_;
    Options options_;
    Portfolio portfolio_;
    std::uint64_t now_ = 0;
};

}  // namespace orderline
