#include "orderline/service.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "kv_config.hpp"

namespace orderline {

using nlohmann::json;
using nlohmann::ordered_json;

// --- config -----------------------------------------------------------------

void ServiceConfig::validate() const {
    if (host.empty()) throw ConfigError("host must not be empty");
    if (port < 0 || port > 65535) throw ConfigError("port must be within [0, 65535]");
    if (session_cap < 1) throw ConfigError("session_cap must be at least 1");
    session.validate();
}

ServiceConfig parse_service_config(std::istream& in, const std::filesystem::path& base_dir) {
    ServiceConfig cfg;
    auto path_of = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    };
    for (const auto& [line, key, value] : kv::read(in, "service config")) {
        if (key == "host") {
            cfg.host = value;
        } else if (key == "port") {
            cfg.port = static_cast<int>(kv::to_integer(key, value));
        } else if (key == "provider_config") {
            cfg.provider_config = path_of(value);
        } else if (key == "feed") {
            cfg.feed = path_of(value);
        } else if (key == "symbols") {
            cfg.symbols = path_of(value);
        } else if (key == "transcript_log") {
            cfg.transcript_log = path_of(value);
        } else if (key == "session_cap") {
            const auto n = kv::to_integer(key, value);
            if (n < 1) throw ConfigError("session_cap must be at least 1");
            cfg.session_cap = static_cast<std::size_t>(n);
        } else if (key == "max_turns") {
            cfg.session.max_turns = static_cast<int>(kv::to_integer(key, value));
        } else if (key == "auto_execute") {
            cfg.session.auto_execute = kv::to_bool(key, value);
        } else if (key == "policy") {
            auto p = parse_policy(value);
            if (!p) throw ConfigError("unknown extraction policy '" + value + "'");
            cfg.session.policy = *p;
        } else if (key == "horizon") {
            if (value == "none") {
                cfg.venue.horizon = std::nullopt;
            } else {
                const auto h = kv::to_integer(key, value);
                if (h < 0) throw ConfigError("horizon must be non-negative");
                cfg.venue.horizon = static_cast<std::uint64_t>(h);
            }
        } else if (key == "oversell_protection") {
            cfg.venue.oversell_protection = kv::to_bool(key, value);
        } else {
            throw ConfigError("service config line " + std::to_string(line) + ": unknown key '" +
                              key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open service config: " + path.string());
    return parse_service_config(in, path.parent_path());
}

EnvLookup process_env() {
    return [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
    };
}

ServiceConfig apply_env_overrides(ServiceConfig cfg, const EnvLookup& env) {
    if (auto v = env("ORDERLINE_HOST")) cfg.host = *v;
    if (auto v = env("ORDERLINE_PORT")) cfg.port = static_cast<int>(kv::to_integer("ORDERLINE_PORT", *v));
    if (auto v = env("ORDERLINE_PROVIDER_CONFIG")) cfg.provider_config = *v;
    if (auto v = env("ORDERLINE_FEED")) cfg.feed = *v;
    if (auto v = env("ORDERLINE_SESSION_CAP")) {
        const auto n = kv::to_integer("ORDERLINE_SESSION_CAP", *v);
        if (n < 1) throw ConfigError("ORDERLINE_SESSION_CAP must be at least 1");
        cfg.session_cap = static_cast<std::size_t>(n);
    }
    cfg.validate();
    return cfg;
}

// --- service ----------------------------------------------------------------

struct Service::Session {
    std::mutex mutex;
    SessionState state = session::AwaitInput{};
    ordered_json transcript = ordered_json::array();
};

namespace {

HttpResult error(int status, const std::string& message) {
    return HttpResult{status, ordered_json{{"error", message}}};
}

std::vector<std::string> split_path(std::string_view path) {
    const auto q = path.find('?');
    if (q != std::string_view::npos) path = path.substr(0, q);
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        const auto j = std::min(path.find('/', i), path.size());
        parts.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return parts;
}

void append_outbound(ordered_json& transcript, const std::vector<OutboundMessage>& outbound) {
    for (const auto& m : outbound) {
        if (const auto* q = std::get_if<Question>(&m)) {
            transcript.push_back({{"role", "system"}, {"kind", "question"}, {"text", q->text}});
        } else if (const auto* n = std::get_if<Notice>(&m)) {
            transcript.push_back({{"role", "system"}, {"kind", "notice"}, {"text", n->text}});
        }
    }
}

}  // namespace

Service::Service(ServiceConfig config, SymbolDirectory directory,
                 std::shared_ptr<ChatProvider> provider, PriceFeed feed)
    : config_(std::move(config)),
      directory_(std::move(directory)),
      provider_(std::move(provider)),
      venue_(std::move(feed), config_.venue),
      id_salt_(std::random_device{}()) {
    config_.validate();
    if (!provider_) throw ConfigError("service needs a provider");
    context_.directory = &directory_;
    context_.config = config_.session;
    context_.system_prompt = render_system_prompt(directory_);
    context_.execute = [this](const ExecutableOrder& order) {
        std::lock_guard lock(venue_mutex_);
        return venue_.execute(order);
    };
    if (config_.transcript_log) {
        auto out = std::make_unique<std::ofstream>(*config_.transcript_log, std::ios::app);
        if (!*out) throw ConfigError("cannot open transcript log: " + config_.transcript_log->string());
        log_stream_ = std::move(out);
        log_ = std::make_unique<TranscriptLog>(*log_stream_);
    }
}

Service::~Service() = default;

std::unique_ptr<Service> Service::from_config(const ServiceConfig& config) {
    ProviderConfig pcfg;
    if (config.provider_config) pcfg = load_provider_config(*config.provider_config);
    SymbolDirectory directory = SymbolDirectory::builtin();
    for (const auto& path : {pcfg.symbols, config.symbols}) {
        if (!path) continue;
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot open symbol file: " + path->string());
        directory.add_from_stream(in, path->string());
    }
    std::shared_ptr<ChatProvider> provider = make_provider(pcfg, directory, make_http_transport());
    PriceFeed feed = config.feed ? PriceFeed::load_csv(*config.feed) : PriceFeed{};
    return std::make_unique<Service>(config, std::move(directory), std::move(provider), std::move(feed));
}

std::size_t Service::session_count() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
}

std::string Service::new_id() {
    // splitmix64 of a counter, salted per process.
    std::uint64_t z = (++id_counter_ + id_salt_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(z));
    return buf;
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

ordered_json Service::view(const std::string& id, const Session& s) const {
    ordered_json j = {{"id", id}};
    const ordered_json state = session_view(s.state);
    for (const auto& [k, v] : state.items()) j[k] = v;
    if (!j.contains("last_report")) j["last_report"] = nullptr;
    j["transcript"] = s.transcript;
    return j;
}

HttpResult Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    const auto parts = split_path(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    try {
        if (parts.size() == 1 && parts[0] == "sessions") {
            return post ? create_session() : error(405, "method not allowed");
        }
        if (parts.size() == 2 && parts[0] == "sessions") {
            return get ? get_session(parts[1]) : error(405, "method not allowed");
        }
        if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "message") {
            return post ? post_message(parts[1], body) : error(405, "method not allowed");
        }
        if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "execute") {
            return post ? execute(parts[1]) : error(405, "method not allowed");
        }
        if (parts.size() == 1 && parts[0] == "portfolio") {
            return get ? portfolio() : error(405, "method not allowed");
        }
        if (parts.size() == 1 && parts[0] == "trades") {
            return get ? trades() : error(405, "method not allowed");
        }
        if (parts.size() == 1 && parts[0] == "health") {
            return get ? HttpResult{200, {{"status", "ok"}}} : error(405, "method not allowed");
        }
        return error(404, "no route for " + std::string(path));
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

HttpResult Service::create_session() {
    std::string id;
    auto s = std::make_shared<Session>();
    {
        std::lock_guard lock(sessions_mutex_);
        if (sessions_.size() >= config_.session_cap) return error(503, "session cap reached");
        do {
            id = new_id();
        } while (sessions_.count(id));
        sessions_[id] = s;
    }
    std::lock_guard lock(s->mutex);
    return HttpResult{201, view(id, *s)};
}

HttpResult Service::get_session(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "unknown session " + id);
    std::lock_guard lock(s->mutex);
    return HttpResult{200, view(id, *s)};
}

HttpResult Service::post_message(const std::string& id, std::string_view body) {
    auto s = find(id);
    if (!s) return error(404, "unknown session " + id);

    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
        return error(400, "body must be a JSON object with a string \"text\"");
    }
    const std::string text = j["text"].get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return error(400, "text must not be empty");

    std::lock_guard lock(s->mutex);
    if (is_terminal(s->state)) {
        return error(409, "session is " + std::string(state_name(s->state)));
    }

    // Work on copies; nothing is committed unless every step succeeds.
    struct Logged {
        SessionState from;
        SessionEvent event;
        StepResult result;
    };
    std::vector<Logged> steps;
    ordered_json transcript = s->transcript;
    transcript.push_back({{"role", "user"}, {"text", text}});
    try {
        SessionEvent ev = UserMessage{text};
        StepResult r = step(s->state, ev, context_);
        steps.push_back({s->state, ev, r});
        for (const auto& m : r.outbound) {
            const auto* req = std::get_if<ProviderRequest>(&m);
            if (req == nullptr) continue;
            std::string reply;
            try {
                reply = complete(req->transcript, *provider_);
            } catch (const ProviderError& e) {
                return error(502, e.what());
            }
            SessionEvent pev = ProviderReply{reply};
            StepResult r2 = step(r.state, pev, context_);
            steps.push_back({r.state, pev, r2});
            break;
        }
    } catch (const IllegalEvent& e) {
        return error(409, e.what());
    } catch (const OversellRejected& e) {
        return error(422, e.what());
    } catch (const UnknownSymbolFeed& e) {
        return error(422, e.what());
    }

    for (const auto& st : steps) append_outbound(transcript, st.result.outbound);
    s->state = steps.back().result.state;
    s->transcript = std::move(transcript);
    if (log_) {
        std::lock_guard log_lock(log_mutex_);
        for (const auto& st : steps) log_->record(id, st.from, st.event, st.result);
    }
    return HttpResult{200, view(id, *s)};
}

HttpResult Service::execute(const std::string& id) {
    auto s = find(id);
    if (!s) return error(404, "unknown session " + id);
    std::lock_guard lock(s->mutex);
    if (!std::holds_alternative<session::ReadyToExecute>(s->state)) {
        return error(409, "session is " + std::string(state_name(s->state)));
    }
    SessionEvent ev = ConfirmExecute{};
    StepResult r;
    try {
        r = step(s->state, ev, context_);
    } catch (const OversellRejected& e) {
        return error(422, e.what());
    } catch (const UnknownSymbolFeed& e) {
        return error(422, e.what());
    }
    const SessionState from = s->state;
    s->state = r.state;
    append_outbound(s->transcript, r.outbound);
    if (log_) {
        std::lock_guard log_lock(log_mutex_);
        log_->record(id, from, ev, r);
    }
    return HttpResult{200, to_json(std::get<session::Executed>(s->state).report)};
}

HttpResult Service::portfolio() const {
    std::lock_guard lock(venue_mutex_);
    ordered_json positions = ordered_json::object();
    for (const auto& [code, qty] : venue_.portfolio().positions) positions[code] = qty;
    return HttpResult{200, {{"positions", positions}}};
}

HttpResult Service::trades() const {
    std::lock_guard lock(venue_mutex_);
    ordered_json list = ordered_json::array();
    for (const auto& r : venue_.portfolio().trade_log) list.push_back(to_json(r));
    return HttpResult{200, {{"trades", list}}};
}

}  // namespace orderline
