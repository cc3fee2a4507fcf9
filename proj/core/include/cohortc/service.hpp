#pragma once

// HTTP front end over the engine. Handlers are plain functions of
// (method, path, body) so they can be exercised without a socket.

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "cohortc/engine.hpp"

namespace cohortc::service {

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

class Service {
public:
    /// `databases` maps names accepted by /api/execute to database paths
    /// (see engine::open_database); each is loaded on first use.
    Service(const engine::Engine& engine, std::map<std::string, std::filesystem::path> databases);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Reply handle(const std::string& method, const std::string& path, const std::string& body);

    /// Binds and returns the port; port 0 picks a free one.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cohortc::service
