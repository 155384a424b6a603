#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "orderline/dialogue.hpp"
#include "orderline/exchange.hpp"
#include "orderline/gateway.hpp"
#include "orderline/symbols.hpp"

namespace orderline {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::filesystem::path> provider_config;  // rule provider when absent
    std::optional<std::filesystem::path> feed;             // CSV; empty feed when absent
    std::optional<std::filesystem::path> symbols;          // extra aliases
    std::optional<std::filesystem::path> transcript_log;   // JSONL audit log
    std::size_t session_cap = 64;
    SessionConfig session;
    Venue::Options venue;

    void validate() const;  // throws ConfigError
};

// Keys: host, port, provider_config, feed, symbols, transcript_log,
// session_cap, max_turns, auto_execute, policy, horizon (integer or "none"),
// oversell_protection. Relative paths resolve against base_dir.
ServiceConfig parse_service_config(std::istream& in, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup process_env();

// ORDERLINE_HOST, ORDERLINE_PORT, ORDERLINE_PROVIDER_CONFIG, ORDERLINE_FEED,
// ORDERLINE_SESSION_CAP override the file values.
ServiceConfig apply_env_overrides(ServiceConfig config, const EnvLookup& env);

struct HttpResult {
    int status = 200;
    nlohmann::ordered_json body;
};

/// Sessions, one shared venue, and the REST routing, independent of any
/// socket. Requests on distinct sessions run in parallel; requests on one
/// session and all venue access are serialized.
class Service {
public:
    Service(ServiceConfig config, SymbolDirectory directory, std::shared_ptr<ChatProvider> provider,
            PriceFeed feed);
    ~Service();

    // Builds directory, provider and feed from the config files.
    static std::unique_ptr<Service> from_config(const ServiceConfig& config);

    HttpResult handle(std::string_view method, std::string_view path, std::string_view body);

    const ServiceConfig& config() const { return config_; }
    std::size_t session_count() const;

private:
    struct Session;

    HttpResult create_session();
    HttpResult get_session(const std::string& id);
    HttpResult post_message(const std::string& id, std::string_view body);
    HttpResult execute(const std::string& id);
    HttpResult portfolio() const;
    HttpResult trades() const;

    std::shared_ptr<Session> find(const std::string& id) const;
    nlohmann::ordered_json view(const std::string& id, const Session& s) const;
    std::string new_id();

    ServiceConfig config_;
    SymbolDirectory directory_;
    std::shared_ptr<ChatProvider> provider_;
    DialogueContext context_;

    mutable std::mutex venue_mutex_;
    Venue venue_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t id_counter_ = 0;
    std::uint64_t id_salt_;

    std::mutex log_mutex_;
    std::unique_ptr<std::ostream> log_stream_;
    std::unique_ptr<TranscriptLog> log_;
};

/// cpp-httplib front end for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    // Binds and returns the bound port (pass 0 for an ephemeral one).
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace orderline
