#include "orderline/forge.hpp"

#include <fstream>
#include <random>

#include "lexicon.hpp"
#include "text_util.hpp"

namespace orderline {

NoiseSpec NoiseSpec::defaults(std::uint64_t seed) {
    NoiseSpec s;
    s.seed = seed;
    s.modal_lexicon = {"uh,", "um,", "emmm...", "hmm,", "oh,", "\xE5\x97\xAF,"};  // 嗯
    s.punctuation_variants = {",", ".", "!", "?", "...", "\xEF\xBC\x8C", "\xE3\x80\x82"};  // ， 。
    s.code_mix_lexicon = {
        {"and", "\xE5\x92\x8C"},                       // 和
        {"but", "\xE4\xBD\x86\xE6\x98\xAF"},           // 但是
        {"so", "\xE6\x89\x80\xE4\xBB\xA5"},            // 所以
        {"then", "\xE7\x84\xB6\xE5\x90\x8E"},          // 然后
        {"because", "\xE5\x9B\xA0\xE4\xB8\xBA"},       // 因为
        {"really", "\xE7\x9C\x9F\xE7\x9A\x84"},        // 真的
        {"think", "\xE8\xA7\x89\xE5\xBE\x97"},         // 觉得
        {"very", "\xE9\x9D\x9E\xE5\xB8\xB8"},          // 非常
    };
    return s;
}

NoiseSpec NoiseSpec::none(std::uint64_t seed) {
    NoiseSpec s = defaults(seed);
    s.filler_probability = 0.0;
    s.punctuation_probability = 0.0;
    s.code_mix_probability = 0.0;
    return s;
}

void NoiseSpec::validate() const {
    auto check = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be within [0, 1]");
    };
    check(filler_probability, "filler_probability");
    check(punctuation_probability, "punctuation_probability");
    check(code_mix_probability, "code_mix_probability");
    if (filler_probability > 0 && modal_lexicon.empty())
        throw ConfigError("modal lexicon is empty but filler_probability > 0");
    if (punctuation_probability > 0 && punctuation_variants.empty())
        throw ConfigError("punctuation variants are empty but punctuation_probability > 0");
    if (code_mix_probability > 0 && code_mix_lexicon.empty())
        throw ConfigError("code-mix lexicon is empty but code_mix_probability > 0");
    for (const auto& f : modal_lexicon) {
        if (text::trim(f).empty() || f.find_first_of(" \t\n") != std::string::npos)
            throw ConfigError("modal lexicon entries must be single non-empty tokens");
    }
}

namespace {

std::vector<std::string> read_entries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon: " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.emplace_back(t);
    }
    return out;
}

}  // namespace

std::vector<std::string> load_word_list(const std::filesystem::path& path) { return read_entries(path); }

std::vector<std::pair<std::string, std::string>> load_code_mix(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : read_entries(path)) {
        const auto tab = e.find('\t');
        if (tab == std::string::npos) throw ConfigError(path.string() + ": expected word<TAB>replacement: " + e);
        out.emplace_back(text::to_lower(text::trim(std::string_view(e).substr(0, tab))),
                         std::string(text::trim(std::string_view(e).substr(tab + 1))));
    }
    return out;
}

// --- protected tokens -------------------------------------------------------

ProtectedTokens ProtectedTokens::standard(const SymbolDirectory& directory) {
    ProtectedTokens p;
    p.directory_ = &directory;
    // Numerals with optional currency marks; this also covers ticker codes.
    p.add_pattern(R"(^[^0-9A-Za-z]*(\$|¥|￥)?[0-9][0-9,]*(\.[0-9]+)?(元)?[^0-9A-Za-z]*$)");
    return p;
}

void ProtectedTokens::add_pattern(const std::string& regex) {
    try {
        patterns_.emplace_back(regex);
    } catch (const std::regex_error& e) {
        throw ConfigError("bad protected-token pattern '" + regex + "': " + e.what());
    }
}

std::vector<bool> ProtectedTokens::mark(const std::vector<std::string>& raw) const {
    std::vector<bool> flags(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (const auto& re : patterns_) {
            if (std::regex_match(raw[i], re)) {
                flags[i] = true;
                break;
            }
        }
    }
    if (directory_ == nullptr) return flags;

    // Alias spans over the normalized tokens, mapped back to raw positions.
    std::vector<std::string> norm;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto t = lex::tokenize(raw[i]);
        if (t.size() != 1) continue;
        norm.push_back(t.front().norm);
        origin.push_back(i);
    }
    for (std::size_t k = 0; k < norm.size(); ++k) {
        if (auto m = directory_->match_at(norm, k)) {
            for (std::size_t j = k; j < k + m->token_count; ++j) flags[origin[j]] = true;
        }
    }
    return flags;
}

// --- noise ------------------------------------------------------------------

namespace {

struct RawToken {
    std::string text;
    std::string trailing_ws;
};

std::pair<std::string, std::vector<RawToken>> split_keep_ws(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && text::is_space(s[i])) ++i;
    std::string leading(s.substr(0, i));
    std::vector<RawToken> out;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && !text::is_space(s[j])) ++j;
        std::size_t k = j;
        while (k < s.size() && text::is_space(s[k])) ++k;
        out.push_back({std::string(s.substr(i, j - i)), std::string(s.substr(j, k - j))});
        i = k;
    }
    return {leading, out};
}

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : rng_(seed) {}
    double next() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) {
        const auto i = static_cast<std::size_t>(next() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace

std::string inject_noise(std::string_view input, const NoiseSpec& spec, const ProtectedTokens& protect) {
    spec.validate();
    auto [leading, tokens] = split_keep_ws(input);
    std::vector<std::string> raw;
    raw.reserve(tokens.size());
    for (const auto& t : tokens) raw.push_back(t.text);
    const auto prot = protect.mark(raw);

    Uniform rng(spec.seed);
    std::string out = leading;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        // Fillers never split a run of protected tokens such as a multi-word alias.
        const bool inside_run = i > 0 && prot[i] && prot[i - 1];
        if (rng.next() < spec.filler_probability && !inside_run) {
            out += spec.modal_lexicon[rng.index(spec.modal_lexicon.size())];
            out += ' ';
        }
        std::string tok = tokens[i].text;
        if (!prot[i]) {
            auto [core_view, marks_view] = text::split_trailing_marks(tok);
            std::string core(core_view);
            std::string marks(marks_view);
            if (!core.empty() && rng.next() < spec.code_mix_probability) {
                const std::string key = text::to_lower(core);
                for (const auto& [word, replacement] : spec.code_mix_lexicon) {
                    if (word == key) {
                        core = replacement;
                        break;
                    }
                }
            }
            if (!marks.empty() && !core.empty() && rng.next() < spec.punctuation_probability) {
                marks = spec.punctuation_variants[rng.index(spec.punctuation_variants.size())];
            }
            tok = core + marks;
        }
        out += tok;
        out += tokens[i].trailing_ws;
    }
    return out;
}

// --- slicing ----------------------------------------------------------------

std::size_t word_count(std::string_view s) { return text::split_ws(s).size(); }

std::string Segment::as_sentence() const {
    const auto marks = text::trim(separator);
    for (std::string_view end : {"...", "\xE2\x80\xA6", ".", "!", "?", "\xE3\x80\x82",
                                 "\xEF\xBC\x81", "\xEF\xBC\x9F"}) {
        if (marks.size() >= end.size() && marks.substr(marks.size() - end.size()) == end) {
            return text + std::string(marks);
        }
    }
    return text + ".";
}

std::vector<Segment> slice(std::string_view input, std::size_t target) {
    if (target < 1) throw std::invalid_argument("target_words must be at least 1");
    auto [leading, tokens] = split_keep_ws(input);
    const std::size_t n = tokens.size();
    std::vector<Segment> out;
    if (n == 0) {
        if (!leading.empty()) out.push_back({"", leading});
        return out;
    }

    auto marks_of = [&](std::size_t i) {
        auto [core, marks] = text::split_trailing_marks(tokens[i].text);
        return core.empty() ? std::string_view{} : marks;
    };

    std::size_t pos = 0;
    while (pos < n) {
        const std::size_t remaining = n - pos;
        std::size_t take = remaining;
        if (remaining > target + 2) {
            take = target;
            std::size_t best_dist = SIZE_MAX;
            const std::size_t lo = std::max<std::size_t>(1, target - 1);
            for (std::size_t k = lo; k <= target + 2; ++k) {
                if (marks_of(pos + k - 1).empty()) continue;
                const std::size_t dist = k > target ? k - target : target - k;
                if (dist < best_dist) {
                    best_dist = dist;
                    take = k;
                }
            }
        }
        Segment seg;
        if (pos == 0) seg.text = leading;
        for (std::size_t i = pos; i < pos + take; ++i) {
            const bool last = i + 1 == pos + take;
            if (!last) {
                seg.text += tokens[i].text + tokens[i].trailing_ws;
                continue;
            }
            const auto marks = marks_of(i);
            seg.text += tokens[i].text.substr(0, tokens[i].text.size() - marks.size());
            seg.separator = std::string(marks) + tokens[i].trailing_ws;
        }
        out.push_back(std::move(seg));
        pos += take;
    }
    return out;
}

}  // namespace orderline
