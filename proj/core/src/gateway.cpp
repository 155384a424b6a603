#include "orderline/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "kv_config.hpp"
#include "lexicon.hpp"
#include "orderline/followup.hpp"
#include "text_util.hpp"

namespace orderline {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "?";
}

// --- config ---------------------------------------------------------------

void ProviderConfig::validate() const {
    if (name.empty()) throw ConfigError("provider name must not be empty");
    if (!(temperature >= 0.0 && temperature <= 2.0))
        throw ConfigError("temperature must be within [0, 2]");
    if (kind == ProviderKind::RuleBased) return;
    if (!(timeout_s > 0.0)) throw ConfigError("timeout_s must be positive");
    if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
    if (endpoint.empty()) throw ConfigError("remote provider needs an endpoint");
    if (model.empty()) throw ConfigError("remote provider needs a model");
    if (credential_env.empty()) throw ConfigError("remote provider needs credential_env");
}

ProviderConfig parse_provider_config(std::istream& in, const std::filesystem::path& base_dir) {
    ProviderConfig cfg;
    for (const auto& [line, key, value] : kv::read(in, "provider config")) {
        if (key == "name") {
            cfg.name = value;
        } else if (key == "kind") {
            if (value == "rule_based") {
                cfg.kind = ProviderKind::RuleBased;
            } else if (value == "remote_chat") {
                cfg.kind = ProviderKind::RemoteChat;
            } else {
                throw ConfigError("unknown provider kind '" + value + "'");
            }
        } else if (key == "endpoint") {
            cfg.endpoint = value;
        } else if (key == "model") {
            cfg.model = value;
        } else if (key == "credential_env") {
            cfg.credential_env = value;
        } else if (key == "timeout_s") {
            cfg.timeout_s = kv::to_double(key, value);
        } else if (key == "max_retries") {
            cfg.max_retries = static_cast<int>(kv::to_integer(key, value));
        } else if (key == "temperature") {
            cfg.temperature = kv::to_double(key, value);
        } else if (key == "symbols") {
            std::filesystem::path p(value);
            cfg.symbols = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        } else {
            throw ConfigError("provider config line " + std::to_string(line) + ": unknown key '" +
                              key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ProviderConfig load_provider_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open provider config: " + path.string());
    return parse_provider_config(in, path.parent_path());
}

// --- envelope -------------------------------------------------------------

ordered_json to_json(const ReplyEnvelope& e) {
    ordered_json j = ordered_json::object();
    j["order"] = to_wire(e.order);
    j["follow_up"] = ordered_json::array();
    for (FieldName f : e.follow_up) j["follow_up"].push_back(to_string(f));
    if (!e.question_texts.empty()) j["question_texts"] = e.question_texts;
    j["non_trade"] = e.non_trade;
    return j;
}

std::string serialize_envelope(const ReplyEnvelope& e) { return to_json(e).dump(); }

ParsedReply parse_reply(std::string_view reply_text, ExtractionPolicy policy) {
    const std::string block = extract_json_block(reply_text);
    const json object = json::parse(block);
    ParsedReply out;
    const auto order_it = object.find("order");
    if (order_it != object.end() && order_it->is_object()) {
        out.structured = true;
        auto parsed = parse_draft(*order_it, policy);
        out.draft = std::move(parsed.draft);
        out.warnings = std::move(parsed.warnings);
        if (auto fu = object.find("follow_up"); fu != object.end() && !fu->is_null()) {
            if (!fu->is_array()) throw SchemaViolation("follow_up must be an array");
            FieldSet seen;
            for (const auto& item : *fu) {
                auto f = item.is_string() ? parse_field_name(item.get<std::string>()) : std::nullopt;
                if (!f) throw SchemaViolation("unknown follow_up field " + item.dump());
                if (seen.contains(*f)) throw SchemaViolation("duplicate follow_up field " + item.dump());
                seen.insert(*f);
                out.follow_up.push_back(*f);
            }
        }
        if (auto qt = object.find("question_texts"); qt != object.end() && qt->is_array()) {
            for (const auto& q : *qt) {
                if (q.is_string()) out.questions.push_back(q.get<std::string>());
            }
        }
        if (auto nt = object.find("non_trade"); nt != object.end() && nt->is_boolean()) {
            out.non_trade = nt->get<bool>();
        }
        return out;
    }
    auto parsed = parse_draft(object, policy);
    out.draft = std::move(parsed.draft);
    out.warnings = std::move(parsed.warnings);
    // Free-text questions live outside the JSON block.
    std::string rest(reply_text);
    if (auto pos = rest.find(block); pos != std::string::npos) rest.erase(pos, block.size());
    out.questions = find_questions(rest);
    return out;
}

// --- providers ----------------------------------------------------------

RuleBasedProvider::RuleBasedProvider(SymbolDirectory directory, std::string name)
    : directory_(std::move(directory)), name_(std::move(name)) {}

std::string RuleBasedProvider::reply(std::span<const ChatTurn> transcript) {
    std::string_view utterance;
    for (const auto& turn : transcript) {
        if (turn.role == Role::User) utterance = turn.content;
    }
    return serialize_envelope(rule_extract(utterance, directory_));
}

RemoteChatProvider::RemoteChatProvider(ProviderConfig config,
                                       std::shared_ptr<HttpTransport> transport, Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
    config_.validate();
    if (!transport_) throw ConfigError("remote provider needs a transport");
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string RemoteChatProvider::reply(std::span<const ChatTurn> transcript) {
    const char* key = std::getenv(config_.credential_env.c_str());
    if (key == nullptr || *key == '\0') throw CredentialMissing(config_.credential_env);

    json body = {{"model", config_.model}, {"temperature", config_.temperature}};
    body["messages"] = json::array();
    for (const auto& turn : transcript) {
        body["messages"].push_back({{"role", to_string(turn.role)}, {"content", turn.content}});
    }
    HttpRequest request;
    request.url = config_.endpoint;
    request.headers = {{"Authorization", std::string("Bearer ") + key},
                       {"Content-Type", "application/json"}};
    request.body = body.dump();
    request.timeout = std::chrono::milliseconds(static_cast<long>(config_.timeout_s * 1000.0));

    std::chrono::milliseconds backoff{1000};
    for (int attempt = 0;; ++attempt) {
        const bool last = attempt >= config_.max_retries;
        HttpResponse response;
        try {
            response = transport_->post(request);
        } catch (const TransportFailure& e) {
            if (last) throw ProviderTimeout(e.what());
            sleeper_(backoff);
            backoff *= 2;
            continue;
        }
        if (response.status == 200) {
            auto parsed = json::parse(response.body, nullptr, false);
            if (parsed.is_discarded()) throw RemoteError(response.status, response.body);
            try {
                return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception&) {
                throw RemoteError(response.status, response.body);
            }
        }
        const bool transient = response.status == 429 || response.status >= 500;
        if (!transient || last) throw RemoteError(response.status, response.body);
        sleeper_(backoff);
        backoff *= 2;
    }
}

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config,
                                            const SymbolDirectory& directory,
                                            std::shared_ptr<HttpTransport> transport) {
    config.validate();
    if (config.kind == ProviderKind::RuleBased) {
        return std::make_unique<RuleBasedProvider>(directory, config.name);
    }
    if (!transport) transport = make_http_transport();
    return std::make_unique<RemoteChatProvider>(config, std::move(transport));
}

std::string complete(std::span<const ChatTurn> transcript, ChatProvider& provider) {
    if (transcript.empty() || transcript.front().role != Role::System) {
        throw std::invalid_argument("transcript must start with a system turn");
    }
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        if (i > 0 && transcript[i].role == Role::System)
            throw std::invalid_argument("transcript has more than one system turn");
        if (transcript[i].content.empty())
            throw std::invalid_argument("transcript turn " + std::to_string(i) + " is empty");
    }
    return provider.reply(transcript);
}

// --- system prompt --------------------------------------------------------

std::string render_system_prompt(const SymbolDirectory& directory) {
    std::ostringstream p;
    p << "You convert a user's trading instruction into a JSON order.\n"
         "\n"
         "Schema keys, exactly these five: strategy, symbol, order_type, price, quantity.\n"
         "- strategy: \"market order\" or \"limit order\"\n"
         "- symbol: the exchange code as a string of 5 or 6 digits\n"
         "- order_type: \"buy\" or \"sell\"\n"
         "- price: a number\n"
         "- quantity: a positive integer number of shares\n"
         "\n"
         "Missing information: when the user did not state a field, write JSON null "
         "(the literal null, not the string \"null\").\n"
         "Market orders carry no price: write the string \"None\" for price.\n"
         "\n"
         "Order types:\n"
         "- A limit order trades at a set price or a more favourable one; it only "
         "executes if the market reaches that price.\n"
         "- A market order executes straight away at whatever price the market offers; "
         "the fill price is not fixed in advance.\n"
         "\n"
         "Reply with one JSON object of this form and nothing else:\n"
         "{\"order\": {\"strategy\": ..., \"symbol\": ..., \"order_type\": ..., "
         "\"price\": ..., \"quantity\": ...}, \"follow_up\": [...], "
         "\"question_texts\": [...]}\n"
         "follow_up lists the field names you need to ask the user about, only fields "
         "that are null and required; question_texts holds one question per entry.\n"
         "\n"
         "Known company names and their codes:\n";
    for (const auto& [alias, code] : directory.entries()) {
        p << "- " << alias << ": " << code.code() << "\n";
    }
    return p.str();
}

// --- rule grammar -----------------------------------------------------------

ReplyEnvelope rule_extract(std::string_view utterance, const SymbolDirectory& directory) {
    const lex::Analysis a = lex::analyze(utterance, directory);

    OrderDraft d;
    if (a.side) d.side = FieldState<Side>::present(*a.side);
    if (a.quantity) d.quantity = FieldState<ShareCount>::present(*a.quantity);
    if (a.symbol) d.symbol = FieldState<TickerSymbol>::present(*a.symbol);

    std::optional<Strategy> strategy;
    if (a.explicit_limit) {
        strategy = Strategy::Limit;
    } else if (a.explicit_market) {
        strategy = Strategy::Market;
    } else if (a.price) {
        strategy = Strategy::Limit;
    } else if (a.market_cue) {
        strategy = Strategy::Market;
    }
    if (strategy) d.strategy = FieldState<Strategy>::present(*strategy);
    if (strategy == Strategy::Market) {
        d.price = FieldState<Money>::not_applicable();
    } else if (a.price) {
        d.price = FieldState<Money>::present(*a.price);
    }

    ReplyEnvelope e;
    e.order = d;
    e.follow_up = missing_fields(d).to_vector();
    e.non_trade = !a.side && !a.quantity && !a.price && !a.symbol && !strategy;
    return e;
}

}  // namespace orderline
