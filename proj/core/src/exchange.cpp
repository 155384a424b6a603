#include "orderline/exchange.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "orderline/extract.hpp"
#include "text_util.hpp"

namespace orderline {

void PriceFeed::append(const TickerSymbol& symbol, std::uint64_t tick, Money price) {
    auto& s = series_[symbol.code()];
    if (!s.empty() && tick <= s.back().tick) {
        throw ConfigError("feed ticks must strictly increase for " + symbol.code() + " (tick " +
                          std::to_string(tick) + " after " + std::to_string(s.back().tick) + ")");
    }
    s.push_back(PricePoint{tick, price});
}

PriceFeed PriceFeed::read_csv(std::istream& in) {
    PriceFeed feed;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            cols.emplace_back(text::trim(std::string_view(line).substr(
                start, comma == std::string::npos ? std::string::npos : comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        auto where = [&] { return "feed line " + std::to_string(line_no) + ": "; };
        if (cols.size() != 3) throw ConfigError(where() + "expected symbol,tick,price");
        if (line_no == 1 && cols[0] == "symbol") continue;
        auto symbol = TickerSymbol::parse(cols[0]);
        if (!symbol) throw ConfigError(where() + "bad symbol '" + cols[0] + "'");
        std::uint64_t tick_value = 0;
        const char* tick_end = cols[1].data() + cols[1].size();
        auto [ptr, ec] = std::from_chars(cols[1].data(), tick_end, tick_value);
        if (cols[1].empty() || ec != std::errc{} || ptr != tick_end) {
            throw ConfigError(where() + "bad tick '" + cols[1] + "'");
        }
        auto price = Money::parse(cols[2]);
        if (!price) throw ConfigError(where() + "bad price '" + cols[2] + "'");
        feed.append(*symbol, tick_value, *price);
    }
    return feed;
}

PriceFeed PriceFeed::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open feed: " + path.string());
    return read_csv(in);
}

void PriceFeed::write_csv(std::ostream& out) const {
    out << "symbol,tick,price\n";
    for (const auto& [code, points] : series_) {
        for (const auto& p : points) out << code << ',' << p.tick << ',' << p.price.to_string() << '\n';
    }
}

PriceFeed PriceFeed::random_walk(const TickerSymbol& symbol, Money start, std::size_t ticks,
                                 std::uint64_t seed) {
    PriceFeed feed;
    std::mt19937_64 rng(seed);
    std::int64_t cents = start.cents();
    for (std::size_t t = 0; t < ticks; ++t) {
        feed.append(symbol, t, Money::from_cents(cents));
        // 53 random bits mapped to [0, 1).
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double factor = 0.99 + 0.02 * u;
        cents = std::max<std::int64_t>(1, std::llround(static_cast<double>(cents) * factor));
    }
    return feed;
}

void PriceFeed::merge(const PriceFeed& other) {
    for (const auto& [code, points] : other.series_) {
        const auto sym = TickerSymbol::from(code);
        for (const auto& p : points) append(sym, p.tick, p.price);
    }
}

std::span<const PricePoint> PriceFeed::series(const TickerSymbol& symbol) const {
    auto it = series_.find(symbol.code());
    if (it == series_.end()) return {};
    return it->second;
}

std::string_view to_string(FillStatus status) {
    switch (status) {
        case FillStatus::Filled: return "filled";
        case FillStatus::Resting: return "resting";
        case FillStatus::Expired: return "expired";
        case FillStatus::Rejected: return "rejected";
    }
    return "?";
}

nlohmann::ordered_json to_json(const ExecutionReport& r) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["status"] = to_string(r.status);
    j["fill_price"] = r.fill_price ? nlohmann::ordered_json(r.fill_price->as_double())
                                   : nlohmann::ordered_json(nullptr);
    j["tick"] = r.tick ? nlohmann::ordered_json(*r.tick) : nlohmann::ordered_json(nullptr);
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["order"] = to_wire(r.order);
    return j;
}

ExecutionReport submit(const ExecutableOrder& order, const PriceFeed& feed,
                       std::optional<std::uint64_t> horizon, std::uint64_t now) {
    const auto series = feed.series(order.symbol());
    auto first = std::lower_bound(series.begin(), series.end(), now,
                                  [](const PricePoint& p, std::uint64_t t) { return p.tick < t; });
    if (first == series.end()) throw UnknownSymbolFeed(order.symbol().code());

    if (order.strategy() == Strategy::Market) {
        return ExecutionReport{FillStatus::Filled, order, first->price, first->tick, {}};
    }

    const Money limit = *order.limit_price();
    const std::uint64_t start = first->tick;
    std::optional<std::uint64_t> last_scanned;
    for (auto it = first; it != series.end(); ++it) {
        if (horizon && it->tick - start > *horizon) break;
        last_scanned = it->tick;
        const bool crosses =
            order.side() == Side::Buy ? it->price <= limit : it->price >= limit;
        if (crosses) return ExecutionReport{FillStatus::Filled, order, it->price, it->tick, {}};
    }
    return ExecutionReport{horizon ? FillStatus::Expired : FillStatus::Resting, order,
                           std::nullopt, last_scanned, {}};
}

std::int64_t Portfolio::position(const TickerSymbol& symbol) const {
    auto it = positions.find(symbol.code());
    return it == positions.end() ? 0 : it->second;
}

Portfolio apply_fill(Portfolio portfolio, const ExecutionReport& report, bool oversell_protection) {
    if (report.status != FillStatus::Filled) {
        throw std::invalid_argument("apply_fill requires a filled report");
    }
    const auto& order = report.order;
    const auto qty = static_cast<std::int64_t>(order.quantity().value());
    auto& pos = portfolio.positions[order.symbol().code()];
    if (order.side() == Side::Sell) {
        if (oversell_protection && pos < qty) {
            throw OversellRejected(order.symbol().code(), pos, order.quantity().value());
        }
        pos -= qty;
    } else {
        pos += qty;
    }
    portfolio.trade_log.push_back(report);
    return portfolio;
}

ExecutionReport Venue::execute(const ExecutableOrder& order) {
    if (options_.oversell_protection && order.side() == Side::Sell) {
        const auto held = portfolio_.position(order.symbol());
        if (held < static_cast<std::int64_t>(order.quantity().value())) {
            throw OversellRejected(order.symbol().code(), held, order.quantity().value());
        }
    }
    ExecutionReport report = submit(order, feed_, options_.horizon, now_);
    if (report.status == FillStatus::Filled) {
        portfolio_ = apply_fill(std::move(portfolio_), report, options_.oversell_protection);
    }
    return report;
}

}  // namespace orderline
