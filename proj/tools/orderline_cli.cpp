// orderline command-line entry point.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "orderline/bench.hpp"
#include "orderline/dialogue.hpp"
#include "orderline/exchange.hpp"
#include "orderline/forge.hpp"
#include "orderline/gateway.hpp"
#include "orderline/service.hpp"

namespace fs = std::filesystem;
using namespace orderline;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct ProviderSetup {
    ProviderConfig config;
    SymbolDirectory directory = SymbolDirectory::builtin();
};

ProviderSetup load_provider(const std::string& config_path, const std::vector<std::string>& extra_symbols) {
    ProviderSetup s;
    if (!config_path.empty()) s.config = load_provider_config(config_path);
    std::vector<fs::path> files;
    if (s.config.symbols) files.push_back(*s.config.symbols);
    for (const auto& f : extra_symbols) files.emplace_back(f);
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot open symbol file: " + f.string());
        s.directory.add_from_stream(in, f.string());
    }
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string dataset;
    std::string provider_config;
    std::vector<std::string> symbols;
    std::size_t parallelism = 1;
    std::string format = "markdown";
    std::string policy = "strict";
    std::string detail;
    std::string output;
};

int run_eval_command(const EvalArgs& a) {
    const auto format = parse_report_format(a.format);
    const auto policy = parse_policy(a.policy);
    if (!format || !policy) {
        std::cerr << "error: unknown --format or --policy\n";
        return kUsageError;
    }
    auto setup = load_provider(a.provider_config, a.symbols);
    auto provider = make_provider(setup.config, setup.directory, make_http_transport());
    const auto records = load_dataset(a.dataset);

    EvalOptions options;
    options.parallelism = a.parallelism;
    options.policy = *policy;
    const auto run = run_eval(records, *provider, render_system_prompt(setup.directory), options);

    const std::string report = emit_report({run.report}, *format);
    if (a.output.empty()) {
        std::cout << report;
    } else {
        write_file(a.output, report);
    }
    if (!a.detail.empty()) write_file(a.detail, emit_detail_csv(run.outcomes, records));
    for (const auto& o : run.outcomes) {
        if (!o.error.empty()) std::cerr << o.id << ": " << o.error << '\n';
    }
    return run.errored == 0 ? 0 : kRuntimeFailure;
}

// --- dataset ----------------------------------------------------------------

int run_validate(const std::string& path, const std::string& manifest) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << '\n';
        return kRuntimeFailure;
    }
    const auto issues = validate_dataset(in);
    for (const auto& i : issues) std::cerr << i.message << '\n';
    if (!issues.empty()) {
        std::cerr << path << ": " << issues.size() << " problem(s)\n";
        return kRuntimeFailure;
    }
    const auto records = load_dataset(path);
    const auto counts = count_categories(records);
    if (!manifest.empty()) {
        std::ifstream m(manifest);
        if (!m) throw ConfigError("cannot open manifest " + manifest);
        const auto j = nlohmann::json::parse(m);
        const CategoryCounts want{j.at("trade_instruction").get<std::size_t>(),
                                  j.at("trade_related").get<std::size_t>(),
                                  j.at("other").get<std::size_t>()};
        if (counts != want || j.value("records", records.size()) != records.size()) {
            std::cerr << path << ": category counts " << counts.trade_instruction << '/'
                      << counts.trade_related << '/' << counts.other << " differ from manifest\n";
            return kRuntimeFailure;
        }
    }
    std::cout << path << ": " << records.size() << " records ok (" << counts.trade_instruction
              << " trade_instruction, " << counts.trade_related << " trade_related, " << counts.other
              << " other)\n";
    return 0;
}

// --- forge ------------------------------------------------------------------

struct NoiseArgs {
    std::uint64_t seed = 0;
    double filler = 0.3;
    double punctuation = 0.3;
    double code_mix = 0.1;
    std::string modal_lexicon;
    std::string punctuation_variants;
    std::string code_mix_lexicon;
    std::vector<std::string> symbols;
};

template <class Fn>
int for_each_jsonl(std::istream& in, Fn fn) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = nlohmann::ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("input_text") ||
            !j["input_text"].is_string()) {
            std::cerr << "line " << line_no << ": expected a JSON object with \"input_text\"\n";
            return kRuntimeFailure;
        }
        fn(j, line_no);
    }
    return 0;
}

int run_noise(const NoiseArgs& a) {
    NoiseSpec spec = NoiseSpec::defaults(a.seed);
    spec.filler_probability = a.filler;
    spec.punctuation_probability = a.punctuation;
    spec.code_mix_probability = a.code_mix;
    if (!a.modal_lexicon.empty()) spec.modal_lexicon = load_word_list(a.modal_lexicon);
    if (!a.punctuation_variants.empty()) spec.punctuation_variants = load_word_list(a.punctuation_variants);
    if (!a.code_mix_lexicon.empty()) spec.code_mix_lexicon = load_code_mix(a.code_mix_lexicon);
    spec.validate();

    auto directory = load_provider("", a.symbols).directory;
    const auto protect = ProtectedTokens::standard(directory);
    std::uint64_t index = 0;
    return for_each_jsonl(std::cin, [&](nlohmann::ordered_json& j, int) {
        NoiseSpec s = spec;
        s.seed = a.seed + index++;  // one stream per record
        j["input_text"] = inject_noise(j["input_text"].get<std::string>(), s, protect);
        std::cout << j.dump() << '\n';
    });
}

int run_slice(std::size_t target) {
    return for_each_jsonl(std::cin, [&](const nlohmann::ordered_json& j, int line_no) {
        const std::string id = j.contains("id") ? j["id"].get<std::string>() : "line" + std::to_string(line_no);
        const auto segments = slice(j["input_text"].get<std::string>(), target);
        std::size_t k = 0;
        for (const auto& seg : segments) {
            if (seg.text.find_first_not_of(" \t") == std::string::npos) continue;
            nlohmann::ordered_json out = {{"id", id + "-" + std::to_string(++k)},
                                          {"input_text", seg.as_sentence()},
                                          {"source_id", id}};
            std::cout << out.dump() << '\n';
        }
    });
}

// --- feed -------------------------------------------------------------------

int run_walk(const std::vector<std::string>& walks, std::size_t ticks, std::uint64_t seed) {
    PriceFeed feed;
    std::uint64_t i = 0;
    for (const auto& w : walks) {
        const auto colon = w.find(':');
        auto sym = TickerSymbol::parse(w.substr(0, colon));
        auto start = colon == std::string::npos ? std::nullopt : Money::parse(w.substr(colon + 1));
        if (!sym || !start) {
            std::cerr << "error: --walk expects CODE:START_PRICE, got '" << w << "'\n";
            return kUsageError;
        }
        feed.merge(PriceFeed::random_walk(*sym, *start, ticks, seed + i++));
    }
    feed.write_csv(std::cout);
    return 0;
}

// --- repl -------------------------------------------------------------------

struct ReplArgs {
    std::string provider_config;
    std::vector<std::string> symbols;
    std::string feed;
    int max_turns = 5;
    bool auto_execute = false;
    std::string policy = "lenient";
};

void print_outbound(const std::vector<OutboundMessage>& out) {
    for (const auto& m : out) {
        if (const auto* q = std::get_if<Question>(&m)) std::cout << "? " << q->text << '\n';
        if (const auto* n = std::get_if<Notice>(&m)) std::cout << "- " << n->text << '\n';
    }
}

int run_repl(const ReplArgs& a) {
    auto setup = load_provider(a.provider_config, a.symbols);
    auto provider = make_provider(setup.config, setup.directory, make_http_transport());
    Venue venue(a.feed.empty() ? PriceFeed{} : PriceFeed::load_csv(a.feed));

    DialogueContext ctx;
    ctx.directory = &setup.directory;
    ctx.config.max_turns = a.max_turns;
    ctx.config.auto_execute = a.auto_execute;
    ctx.config.policy = parse_policy(a.policy).value_or(ExtractionPolicy::Lenient);
    ctx.config.validate();
    ctx.system_prompt = render_system_prompt(setup.directory);
    ctx.execute = [&venue](const ExecutableOrder& o) { return venue.execute(o); };

    std::cout << "Enter a trade instruction (/execute to confirm, /quit to leave).\n";
    SessionState state = session::AwaitInput{};
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
        if (line == "/quit") break;
        if (line.empty()) continue;
        try {
            SessionEvent ev = line == "/execute" ? SessionEvent{ConfirmExecute{}} : SessionEvent{UserMessage{line}};
            StepResult r = step(state, ev, ctx);
            print_outbound(r.outbound);
            for (const auto& m : r.outbound) {
                if (const auto* req = std::get_if<ProviderRequest>(&m)) {
                    const std::string reply = complete(req->transcript, *provider);
                    r = step(r.state, ProviderReply{reply}, ctx);
                    print_outbound(r.outbound);
                    break;
                }
            }
            state = r.state;
            if (auto d = current_draft(state)) std::cout << "  " << serialize_draft(*d) << '\n';
        } catch (const std::logic_error& e) {
            std::cout << "! " << e.what() << '\n';
        } catch (const Error& e) {
            std::cout << "! " << e.what() << '\n';
        }
        if (is_terminal(state)) {
            std::cout << "(session " << state_name(state) << "; starting a new one)\n";
            state = session::AwaitInput{};
        }
    }
    return 0;
}

// --- serve ------------------------------------------------------------------

std::atomic<HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

int run_serve(const std::string& config_path) {
    ServiceConfig cfg = config_path.empty() ? ServiceConfig{} : load_service_config(config_path);
    cfg = apply_env_overrides(std::move(cfg), process_env());
    auto service = Service::from_config(cfg);
    HttpServer server(*service);
    const int port = server.bind(cfg.host, cfg.port);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << cfg.host << ':' << port << '\n';
    server.listen();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orderline: trade instruction extraction, dialogue, evaluation and simulation"};
    app.require_subcommand(1);

    std::string serve_config;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--config", serve_config, "Service config file")->check(CLI::ExistingFile);

    ReplArgs repl_args;
    auto* repl = app.add_subcommand("repl", "Interactive dialogue on the terminal");
    repl->add_option("--provider-config", repl_args.provider_config)->check(CLI::ExistingFile);
    repl->add_option("--symbols", repl_args.symbols, "Extra alias files")->check(CLI::ExistingFile);
    repl->add_option("--feed", repl_args.feed, "Price feed CSV")->check(CLI::ExistingFile);
    repl->add_option("--max-turns", repl_args.max_turns)->check(CLI::PositiveNumber);
    repl->add_flag("--auto-execute", repl_args.auto_execute);
    repl->add_option("--policy", repl_args.policy)->check(CLI::IsMember({"strict", "lenient"}));

    auto* eval = app.add_subcommand("eval", "Evaluation harness");
    eval->require_subcommand(1);
    EvalArgs eval_args;
    auto* eval_run = eval->add_subcommand("run", "Score a provider on a dataset");
    eval_run->add_option("--dataset", eval_args.dataset)->required()->check(CLI::ExistingFile);
    eval_run->add_option("--provider-config", eval_args.provider_config)->check(CLI::ExistingFile);
    eval_run->add_option("--symbols", eval_args.symbols, "Extra alias files")->check(CLI::ExistingFile);
    eval_run->add_option("--parallelism", eval_args.parallelism)->check(CLI::PositiveNumber);
    eval_run->add_option("--format", eval_args.format)->check(CLI::IsMember({"markdown", "md", "csv"}));
    eval_run->add_option("--policy", eval_args.policy)->check(CLI::IsMember({"strict", "lenient"}));
    eval_run->add_option("--detail", eval_args.detail, "Write per-record CSV here");
    eval_run->add_option("-o,--output", eval_args.output, "Write the report here instead of stdout");

    auto* forge = app.add_subcommand("forge", "Dataset augmentation (JSONL stdin to stdout)");
    forge->require_subcommand(1);
    NoiseArgs noise_args;
    auto* noise = forge->add_subcommand("noise", "Inject fillers, punctuation and code-mixing");
    noise->add_option("--seed", noise_args.seed);
    noise->add_option("--filler-p", noise_args.filler)->check(CLI::Range(0.0, 1.0));
    noise->add_option("--punctuation-p", noise_args.punctuation)->check(CLI::Range(0.0, 1.0));
    noise->add_option("--code-mix-p", noise_args.code_mix)->check(CLI::Range(0.0, 1.0));
    noise->add_option("--modal-lexicon", noise_args.modal_lexicon)->check(CLI::ExistingFile);
    noise->add_option("--punctuation-variants", noise_args.punctuation_variants)->check(CLI::ExistingFile);
    noise->add_option("--code-mix-lexicon", noise_args.code_mix_lexicon)->check(CLI::ExistingFile);
    noise->add_option("--symbols", noise_args.symbols, "Alias files to protect")->check(CLI::ExistingFile);
    std::size_t slice_target = 10;
    auto* slicer = forge->add_subcommand("slice", "Cut each record into ~N-word segments");
    slicer->add_option("--target-words", slice_target)->check(CLI::PositiveNumber);

    auto* dataset = app.add_subcommand("dataset", "Dataset utilities");
    dataset->require_subcommand(1);
    std::string validate_path, manifest_path;
    auto* validate = dataset->add_subcommand("validate", "Check record invariants");
    validate->add_option("path", validate_path)->required();
    validate->add_option("--manifest", manifest_path, "Expected category counts (JSON)");

    auto* feed = app.add_subcommand("feed", "Price feed utilities");
    feed->require_subcommand(1);
    std::vector<std::string> walks;
    std::size_t walk_ticks = 1000;
    std::uint64_t walk_seed = 0;
    auto* walk = feed->add_subcommand("walk", "Write a seeded random-walk feed as CSV");
    walk->add_option("--walk", walks, "CODE:START_PRICE, repeatable")->required();
    walk->add_option("--ticks", walk_ticks)->check(CLI::PositiveNumber);
    walk->add_option("--seed", walk_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*serve) return run_serve(serve_config);
        if (*repl) return run_repl(repl_args);
        if (*eval_run) return run_eval_command(eval_args);
        if (*noise) return run_noise(noise_args);
        if (*slicer) return run_slice(slice_target);
        if (*validate) return run_validate(validate_path, manifest_path);
        if (*walk) return run_walk(walks, walk_ticks, walk_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kUsageError;
}
