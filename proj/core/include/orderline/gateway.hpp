#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orderline/errors.hpp"
#include "orderline/extract.hpp"
#include "orderline/order.hpp"
#include "orderline/symbols.hpp"

namespace orderline {

// --- chat transcript --------------------------------------------------------

enum class Role { System, User, Assistant };
std::string_view to_string(Role role);

struct ChatTurn {
    Role role;
    std::string content;
};

// --- provider configuration ---------------------------------------------

enum class ProviderKind { RuleBased, RemoteChat };

/// Provider settings. Credentials are never stored here, only the name of the
/// environment variable that holds them.
struct ProviderConfig {
    std::string name = "rule";
    ProviderKind kind = ProviderKind::RuleBased;
    std::string endpoint;        // e.g. https://api.example.com/v1/chat/completions
    std::string model;
    std::string credential_env;  // environment variable holding the API key
    double timeout_s = 30.0;
    int max_retries = 3;
    double temperature = 0.0;
    std::optional<std::filesystem::path> symbols;  // alias file, resolved against the config dir

    void validate() const;  // throws ConfigError
};

// `key = value` lines, `#` comments, values optionally double-quoted. Keys:
// name, kind (rule_based | remote_chat), endpoint, model, credential_env,
// timeout_s, max_retries, temperature, symbols.
ProviderConfig parse_provider_config(std::istream& in,
                                     const std::filesystem::path& base_dir = {});
ProviderConfig load_provider_config(const std::filesystem::path& path);

// --- errors -------------------------------------------------------------

class ProviderError : public Error {
public:
    using Error::Error;
};

class ProviderTimeout : public ProviderError {
public:
    explicit ProviderTimeout(const std::string& detail) : ProviderError("provider timeout: " + detail) {}
};

class RemoteError : public ProviderError {
public:
    RemoteError(int status, std::string body)
        : ProviderError("provider returned HTTP " + std::to_string(status)),
          status_(status),
          body_(std::move(body)) {}
    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

class CredentialMissing : public ProviderError {
public:
    explicit CredentialMissing(const std::string& variable)
        : ProviderError("credential environment variable not set: " + variable) {}
};

// --- reply envelope -------------------------------------------------------

/// Structured reply: the order in wire form plus the fields the model wants
/// to ask the user about.
///
///   {"order": {...}, "follow_up": ["strategy", "price"],
///    "question_texts": ["..."], "non_trade": false}
struct ReplyEnvelope {
    OrderDraft order;
    std::vector<FieldName> follow_up;
    std::vector<std::string> question_texts;
    bool non_trade = false;

    bool operator==(const ReplyEnvelope&) const = default;
};

nlohmann::ordered_json to_json(const ReplyEnvelope& envelope);
std::string serialize_envelope(const ReplyEnvelope& envelope);

/// What a reply said, whether it arrived as an envelope or as a bare draft
/// object with free-text questions around it.
struct ParsedReply {
    OrderDraft draft;
    std::vector<std::string> warnings;
    bool structured = false;
    std::vector<FieldName> follow_up;    // envelope fields (structured only)
    std::vector<std::string> questions;  // envelope question_texts, or free-text questions
    bool non_trade = false;
};

// Throws NoJsonFound or SchemaViolation.
ParsedReply parse_reply(std::string_view reply_text, ExtractionPolicy policy);

// --- HTTP transport ---------------------------------------------------------

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Connection failures and timeouts. Retried by the remote provider.
class TransportFailure : public Error {
public:
    using Error::Error;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

std::shared_ptr<HttpTransport> make_http_transport();

// --- providers ----------------------------------------------------------

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual const std::string& name() const = 0;
    // Transcript already validated by complete().
    virtual std::string reply(std::span<const ChatTurn> transcript) = 0;
};

/// Deterministic offline provider backed by rule_extract. Answers the last
/// user turn with a serialized ReplyEnvelope. Never touches the network.
class RuleBasedProvider final : public ChatProvider {
public:
    explicit RuleBasedProvider(SymbolDirectory directory, std::string name = "rule");
    const std::string& name() const override { return name_; }
    std::string reply(std::span<const ChatTurn> transcript) override;

private:
    SymbolDirectory directory_;
    std::string name_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Chat-completions style HTTP provider: POSTs {"model", "messages",
/// "temperature"} and reads choices[0].message.content. Retries timeouts,
/// 429 and 5xx with 1s/2s/4s... backoff up to max_retries times.
class RemoteChatProvider final : public ChatProvider {
public:
    RemoteChatProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport,
                       Sleeper sleeper = {});
    const std::string& name() const override { return config_.name; }
    std::string reply(std::span<const ChatTurn> transcript) override;

private:
    ProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    Sleeper sleeper_;
};

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config,
                                            const SymbolDirectory& directory,
                                            std::shared_ptr<HttpTransport> transport = nullptr);

/// Validates the transcript (exactly one leading System turn, no empty turns)
/// and returns the provider's reply text.
std::string complete(std::span<const ChatTurn> transcript, ChatProvider& provider);

// --- prompting and the rule grammar ---------------------------------------

/// Deterministic system prompt: schema keys, null vs "None" rule, order type
/// definitions, the envelope protocol, and the directory's aliases.
std::string render_system_prompt(const SymbolDirectory& directory);

/// Rule grammar over a single utterance. Always produces an envelope whose
/// follow_up equals missing_fields(order) in ask order.
ReplyEnvelope rule_extract(std::string_view utterance, const SymbolDirectory& directory);

}  // namespace orderline
