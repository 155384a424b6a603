// cpp-httplib server front end.

#include <httplib.h>

#include "orderline/service.hpp"

namespace orderline {

struct HttpServer::Impl {
    Service* service;
    httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
    impl_->service = &service;
    auto handler = [svc = &service](const httplib::Request& req, httplib::Response& res) {
        HttpResult r = svc->handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto& s = impl_->server;
    s.Get(R"(/.*)", handler);
    s.Post(R"(/.*)", handler);
    s.Put(R"(/.*)", handler);
    s.Delete(R"(/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& s = impl_->server;
    const int bound = port == 0 ? s.bind_to_any_port(host) : (s.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace orderline
