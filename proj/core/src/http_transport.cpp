// cpp-httplib backed HttpTransport.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <regex>

#include "orderline/gateway.hpp"

namespace orderline {

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ConfigError("bad endpoint URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& request) override {
        const auto url = split_url(request.url);
        httplib::Client client(url.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
        const auto usecs =
            std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto& [k, v] : request.headers) {
            if (k == "Content-Type") {
                content_type = v;
            } else {
                headers.emplace(k, v);
            }
        }
        auto result = client.Post(url.path, headers, request.body, content_type);
        if (!result) {
            throw TransportFailure("POST " + request.url + ": " + httplib::to_string(result.error()));
        }
        return HttpResponse{result->status, result->body};
    }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace orderline
