#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "orderline/bench.hpp"
#include "orderline/forge.hpp"
#include "support/test_support.hpp"

using namespace orderline;
using orderline::testing::data_dir;

namespace {

std::vector<std::string> ws_split(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::vector<DatasetRecord> canonical() { return load_dataset(data_dir() / "datasets" / "canonical.jsonl"); }

}  // namespace

// --- noise --------------------------------------------------------------------

TEST(Noise, ZeroProbabilitiesAreIdentity) {
    const auto dir = orderline::testing::bundled_directory();
    const auto protect = ProtectedTokens::standard(dir);
    for (const auto& r : canonical()) {
        for (std::uint64_t seed : {0u, 1u, 99u}) EXPECT_EQ(inject_noise(r.input_text, NoiseSpec::none(seed), protect), r.input_text);
    }
    EXPECT_EQ(inject_noise("  two  spaces\tand tab ", NoiseSpec::none(), protect), "  two  spaces\tand tab ");
}

TEST(Noise, SameSeedSameOutput) {
    const auto dir = orderline::testing::bundled_directory();
    const auto protect = ProtectedTokens::standard(dir);
    const std::string text = "I think Skyworth has risen a lot, so I will sell 300 shares at 5.2 and then rest.";
    auto spec = NoiseSpec::defaults(11);
    spec.code_mix_probability = 0.5;
    const auto a = inject_noise(text, spec, protect);
    EXPECT_EQ(a, inject_noise(text, spec, protect));
    bool differs = false;
    for (std::uint64_t s = 12; s < 40 && !differs; ++s) {
        spec.seed = s;
        differs = inject_noise(text, spec, protect) != a;
    }
    EXPECT_TRUE(differs);
}

TEST(Noise, SeededGolden) {
    const auto dir = orderline::testing::bundled_directory();
    const auto protect = ProtectedTokens::standard(dir);
    const auto records = canonical();
    std::string out;
    for (std::size_t i = 0; i < 5; ++i) out += inject_noise(records[i].input_text, NoiseSpec::defaults(42 + i), protect) + "\n";
    EXPECT_EQ(out, orderline::testing::slurp(orderline::testing::golden("noise_seed42.txt")));
}

TEST(Noise, ProtectedTokensSurviveEverySeed) {
    const auto dir = orderline::testing::bundled_directory();
    const auto protect = ProtectedTokens::standard(dir);
    auto spec = NoiseSpec::defaults();
    spec.filler_probability = 0.6;
    spec.punctuation_probability = 0.6;
    spec.code_mix_probability = 0.6;
    for (const auto& r : canonical()) {
        const auto raw = ws_split(r.input_text);
        const auto flags = protect.mark(raw);
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (flags[i]) kept.push_back(raw[i]);
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            spec.seed = seed;
            const auto noisy = ws_split(inject_noise(r.input_text, spec, protect));
            // Protected tokens appear in order, unchanged; multi-word aliases stay contiguous.
            std::size_t k = 0;
            for (std::size_t i = 0; i < noisy.size() && k < kept.size(); ++i) {
                if (noisy[i] == kept[k]) ++k;
            }
            EXPECT_EQ(k, kept.size()) << r.id << " seed " << seed;
            ASSERT_GE(noisy.size(), raw.size());
        }
    }
}

TEST(Noise, GoldLabelsStillApplyToRuleGrammar) {
    // Noise leaves the order-bearing tokens alone, so the rule grammar should
    // still recover the gold draft for the canonical instructions.
    const auto dir = orderline::testing::bundled_directory();
    const auto protect = ProtectedTokens::standard(dir);
    int agree = 0, total = 0;
    for (const auto& r : canonical()) {
        if (!r.gold) continue;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            ++total;
            const auto noisy = inject_noise(r.input_text, NoiseSpec::defaults(seed), protect);
            const auto got = rule_extract(noisy, dir).order;
            agree += got == *r.gold;
            EXPECT_EQ(got, *r.gold) << r.id << " seed " << seed << ": " << noisy;
        }
    }
    EXPECT_EQ(agree, total);
}

TEST(Noise, InvalidSpecsAreRejected) {
    auto spec = NoiseSpec::defaults();
    spec.filler_probability = 1.5;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = NoiseSpec::defaults();
    spec.modal_lexicon.clear();
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.filler_probability = 0;
    EXPECT_NO_THROW(spec.validate());
    spec = NoiseSpec::defaults();
    spec.modal_lexicon = {"two words"};
    EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Noise, BundledLexiconsLoad) {
    EXPECT_FALSE(load_word_list(data_dir() / "lexicons" / "modal.txt").empty());
    EXPECT_FALSE(load_word_list(data_dir() / "lexicons" / "punctuation.txt").empty());
    const auto mix = load_code_mix(data_dir() / "lexicons" / "code_mix.tsv");
    ASSERT_FALSE(mix.empty());
    for (const auto& [w, r] : mix) EXPECT_FALSE(w.empty() || r.empty());
}

// --- slicing --------------------------------------------------------------------

TEST(Slice, SkyworthSentence) {
    const auto segs = slice(
        "The Skyworth figure in my hand has risen a lot, I decided to take advantage of the good market price, sell "
        "all 300 shares in my hand.");
    ASSERT_GE(segs.size(), 2u);
    EXPECT_EQ(segs[0].as_sentence(), "The Skyworth figure in my hand has risen a lot.");
}

TEST(Slice, ShortInputIsOneSegment) {
    const auto segs = slice("Buy 100 shares now!", 10);
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_EQ(segs[0].text, "Buy 100 shares now");
    EXPECT_EQ(segs[0].as_sentence(), "Buy 100 shares now!");
    EXPECT_TRUE(slice("").empty());
    EXPECT_THROW(slice("x", 0), std::invalid_argument);
}

namespace {

// Reference segmentation over a plain word list.
std::vector<std::size_t> reference_cuts(const std::vector<std::string>& words, std::size_t target) {
    auto has_mark = [](const std::string& w) {
        const std::string marks = ",.!?;:";
        std::size_t e = w.size();
        while (e > 0 && marks.find(w[e - 1]) != std::string::npos) --e;
        return e > 0 && e < w.size();
    };
    std::vector<std::size_t> sizes;
    std::size_t pos = 0;
    while (pos < words.size()) {
        const std::size_t rem = words.size() - pos;
        std::size_t take = rem;
        if (rem > target + 2) {
            take = target;
            long best = -1;
            for (std::size_t k = (target > 1 ? target - 1 : 1); k <= target + 2; ++k) {
                if (!has_mark(words[pos + k - 1])) continue;
                const long d = std::labs(static_cast<long>(k) - static_cast<long>(target));
                if (best < 0 || d < best) {
                    best = d;
                    take = k;
                }
            }
        }
        sizes.push_back(take);
        pos += take;
    }
    return sizes;
}

}  // namespace

TEST(Slice, MatchesReferenceOn200RandomSentences) {
    std::mt19937_64 rng(5);
    const char* vocab[] = {"buy", "sell", "shares", "the", "market", "price", "is", "good", "100", "Moutai", "today"};
    const char* marks[] = {",", ".", "!", "?", ";", ":", "..."};
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng() % 60;
        const std::size_t target = 1 + rng() % 14;
        std::string text;
        std::vector<std::string> words;
        for (std::size_t w = 0; w < n; ++w) {
            std::string word = vocab[rng() % std::size(vocab)];
            if (rng() % 5 == 0) word += marks[rng() % std::size(marks)];
            words.push_back(word);
            text += word;
            if (w + 1 < n) text += rng() % 6 == 0 ? "  " : " ";
        }
        const auto segs = slice(text, target);
        std::string joined;
        std::vector<std::size_t> sizes;
        for (const auto& s : segs) {
            joined += s.text + s.separator;
            sizes.push_back(word_count(s.text));
            EXPECT_LE(word_count(s.text), target + 2);
            EXPECT_GE(word_count(s.text), 1u);
        }
        EXPECT_EQ(joined, text);
        EXPECT_EQ(sizes, reference_cuts(words, target)) << text << " target=" << target;
    }
}
