#pragma once

#include <string>

#include <httplib.h>

#include "service.hpp"

namespace supercluster::app {

/// cpp-httplib front end for Service, optionally serving a static directory.
class HttpServer {
public:
    explicit HttpServer(Service& service, const std::string& static_dir = {}) : service_(service) {
        if (!static_dir.empty() && !server_.set_mount_point("/", static_dir))
            throw PreconditionError("static directory not found: " + static_dir);
        auto forward = [this](const httplib::Request& req, httplib::Response& res) {
            const ApiResponse r = service_.handle(req.method, req.path, req.body);
            res.status = r.status;
            res.set_content(r.body.dump(), "application/json");
        };
        server_.Get("/api/.*", forward);
        server_.Post("/api/.*", forward);
    }

    /// Binds and returns the port (an ephemeral one when port is 0).
    int bind(const std::string& host, int port) {
        const int p = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (p < 0)
            throw Error("cannot bind " + host + ":" + std::to_string(port));
        return p;
    }

    /// Blocks until stop().
    bool run() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    Service& service_;
    httplib::Server server_;
};

} // namespace supercluster::app
