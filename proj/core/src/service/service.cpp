#include "cohortc/service.hpp"

#include <deque>
#include <mutex>
#include <optional>

#include <httplib.h>

namespace cohortc::service {

using nlohmann::json;

namespace {

constexpr std::size_t kPlanCacheSize = 1024;

Reply error_reply(int status, const std::string& code, const std::string& message, json extra = json::object()) {
    json body{{"error", code}, {"message", message}};
    body.update(extra);
    return {status, body.dump(), "application/json"};
}

int status_for(const std::string& code) {
    if (code == "UnknownPlan" || code == "UnknownDatabase") return 404;
    if (code == "ExecutionError") return 422;
    return 400;
}

}  // namespace

struct Service::Impl {
    struct DatabaseSlot {
        std::filesystem::path path;
        std::optional<sql::Database> db;
        std::mutex mu;  // execution serializes per database
    };

    explicit Impl(const engine::Engine& e) : engine(e) {}

    const engine::Engine& engine;
    std::map<std::string, std::unique_ptr<DatabaseSlot>> databases;
    std::mutex plans_mu;
    std::map<std::string, codegen::QueryPlan> plans;
    std::deque<std::string> plan_order;
    httplib::Server server;

    void remember(const std::string& id, const codegen::QueryPlan& plan) {
        std::lock_guard lock(plans_mu);
        if (plans.contains(id)) return;
        plans.emplace(id, plan);
        plan_order.push_back(id);
        while (plan_order.size() > kPlanCacheSize) {
            plans.erase(plan_order.front());
            plan_order.pop_front();
        }
    }

    std::optional<codegen::QueryPlan> recall(const std::string& id) {
        std::lock_guard lock(plans_mu);
        auto it = plans.find(id);
        if (it == plans.end()) return std::nullopt;
        return it->second;
    }

    Reply smm_list() const {
        json list = json::array();
        for (const auto& s : engine.smms()) list.push_back(smm::to_json(s));
        return {200, json{{"smms", list}}.dump(), "application/json"};
    }

    Reply queries(const std::string& body) {
        auto request = engine::request_from_json(json::parse(body));
        auto response = engine.generate(request);
        remember(response.plan_id, response.plan);
        return {200, engine::to_json(response).dump(), "application/json"};
    }

    Reply execute(const std::string& body) {
        json j = json::parse(body);
        if (!j.is_object()) throw engine::InvalidRequest("request must be an object");
        codegen::QueryPlan plan;
        if (j.contains("plan") && !j["plan"].is_null()) {
            plan = codegen::plan_from_json(j["plan"]);
        } else if (j.contains("plan_id") && j["plan_id"].is_string()) {
            auto cached = recall(j["plan_id"].get<std::string>());
            if (!cached) throw Error("UnknownPlan", "no plan with id " + j["plan_id"].get<std::string>());
            plan = std::move(*cached);
        } else {
            throw engine::InvalidRequest("plan or plan_id is required");
        }
        if (!j.contains("database") || !j["database"].is_string()) throw engine::InvalidRequest("database is required");
        const std::string name = j["database"].get<std::string>();
        engine::ExecuteOptions options;
        if (j.contains("skip_zero")) {
            if (!j["skip_zero"].is_boolean()) throw engine::InvalidRequest("skip_zero must be a boolean");
            options.skip_zero = j["skip_zero"].get<bool>();
        }
        auto it = databases.find(name);
        if (it == databases.end()) throw Error("UnknownDatabase", "no database named '" + name + "'");
        auto& slot = *it->second;
        std::lock_guard lock(slot.mu);
        if (!slot.db) slot.db = engine::open_database(slot.path);
        auto result = engine.execute(plan, *slot.db, options);
        return {200, engine::to_json(result).dump(), "application/json"};
    }
};

Service::Service(const engine::Engine& engine, std::map<std::string, std::filesystem::path> databases)
    : impl_(std::make_unique<Impl>(engine)) {
    for (auto& [name, path] : databases) {
        auto slot = std::make_unique<Impl::DatabaseSlot>();
        slot->path = std::move(path);
        impl_->databases.emplace(name, std::move(slot));
    }
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        Reply r = handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    impl_->server.Get(".*", forward);
    impl_->server.Post(".*", forward);
}

Service::~Service() = default;

Reply Service::handle(const std::string& method, const std::string& path, const std::string& body) {
    try {
        if (path == "/api/health") {
            if (method != "GET") return error_reply(405, "MethodNotAllowed", "use GET");
            return {200, "ok", "text/plain"};
        }
        if (path == "/api/smm") {
            if (method != "GET") return error_reply(405, "MethodNotAllowed", "use GET");
            return impl_->smm_list();
        }
        if (path == "/api/queries") {
            if (method != "POST") return error_reply(405, "MethodNotAllowed", "use POST");
            return impl_->queries(body);
        }
        if (path == "/api/execute") {
            if (method != "POST") return error_reply(405, "MethodNotAllowed", "use POST");
            return impl_->execute(body);
        }
        return error_reply(404, "NotFound", "no endpoint " + path);
    } catch (const json::exception& e) {
        return error_reply(400, "InvalidJson", e.what());
    } catch (const engine::MalformedLogicalForm& e) {
        return error_reply(400, e.code(), e.what(), {{"line", e.line()}, {"position", e.position()}});
    } catch (const engine::ExecutionError& e) {
        return error_reply(422, e.code(), e.what(), {{"line", e.line()}});
    } catch (const Error& e) {
        return error_reply(status_for(e.code()), e.code(), e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "InternalError", e.what());
    }
}

int Service::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    if (!impl_->server.bind_to_port(host, port)) throw Error("BindError", "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void Service::serve() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace cohortc::service
