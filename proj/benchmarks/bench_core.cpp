#include <benchmark/benchmark.h>

#include <filesystem>

#include "orderline/bench.hpp"
#include "orderline/dialogue.hpp"
#include "orderline/exchange.hpp"
#include "orderline/extract.hpp"
#include "orderline/forge.hpp"
#include "orderline/gateway.hpp"

using namespace orderline;

namespace {

const std::filesystem::path kData = ORDERLINE_BENCH_DATA_DIR;

const char* kRow =
    R"({"strategy":"limit order","symbol":"600519","order_type":"buy","price":1800.0,"quantity":200})";
const char* kUtterance =
    "If Moutai's stock price can fall to 1800, I will take the opportunity to stock up and plan to buy 200 "
    "shares of it.";

void BM_ParseDraft(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(parse_draft(kRow, ExtractionPolicy::Strict));
}
BENCHMARK(BM_ParseDraft);

void BM_ExtractJsonBlock(benchmark::State& state) {
    const std::string reply = std::string("Sure, here is the order:\n```json\n") + kRow + "\n```\nAnything else?";
    for (auto _ : state) benchmark::DoNotOptimize(extract_json_block(reply));
}
BENCHMARK(BM_ExtractJsonBlock);

void BM_RuleExtract(benchmark::State& state) {
    const auto dir = SymbolDirectory::load(kData / "symbols.txt");
    for (auto _ : state) benchmark::DoNotOptimize(rule_extract(kUtterance, dir));
}
BENCHMARK(BM_RuleExtract);

void BM_ClassifyIntent(benchmark::State& state) {
    const auto dir = SymbolDirectory::load(kData / "symbols.txt");
    for (auto _ : state) benchmark::DoNotOptimize(classify_intent(kUtterance, dir));
}
BENCHMARK(BM_ClassifyIntent);

void BM_EvalCanonical(benchmark::State& state) {
    const auto dir = SymbolDirectory::load(kData / "symbols.txt");
    const auto records = load_dataset(kData / "datasets" / "canonical.jsonl");
    RuleBasedProvider provider(dir);
    const auto prompt = render_system_prompt(dir);
    const EvalOptions options{ExtractionPolicy::Strict, static_cast<std::size_t>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(run_eval(records, provider, prompt, options));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_EvalCanonical)->Arg(1)->Arg(4);

void BM_SubmitLimit(benchmark::State& state) {
    const auto sym = TickerSymbol::from("600519");
    const auto feed = PriceFeed::random_walk(sym, *Money::parse("1800"), static_cast<std::size_t>(state.range(0)), 1);
    // A limit far below the walk never fills, so every quote is scanned.
    const auto order = ExecutableOrder::limit(sym, Side::Buy, *Money::parse("1"), *ShareCount::of(100));
    for (auto _ : state) benchmark::DoNotOptimize(submit(order, feed, std::nullopt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SubmitLimit)->Arg(1000)->Arg(100000);

void BM_InjectNoise(benchmark::State& state) {
    const auto dir = SymbolDirectory::load(kData / "symbols.txt");
    const auto protect = ProtectedTokens::standard(dir);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(inject_noise(kUtterance, NoiseSpec::defaults(seed++), protect));
}
BENCHMARK(BM_InjectNoise);

void BM_Slice(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(slice(kUtterance, 10));
}
BENCHMARK(BM_Slice);

void BM_DialogueStep(benchmark::State& state) {
    const auto dir = SymbolDirectory::builtin();
    DialogueContext ctx;
    ctx.directory = &dir;
    const SessionState drafting = session::Drafting{kUtterance, {}};
    const std::string reply = R"({"strategy":"limit order","symbol":"600519","order_type":"buy","price":null,"quantity":200})";
    for (auto _ : state) benchmark::DoNotOptimize(step(drafting, ProviderReply{reply}, ctx));
}
BENCHMARK(BM_DialogueStep);

}  // namespace

BENCHMARK_MAIN();
