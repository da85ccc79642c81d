#include "nbs/service.hpp"

#include <functional>

#include "httplib.h"

#include "nbs/error.hpp"
#include "nbs/json_codec.hpp"
#include "nbs/query.hpp"

namespace nbs {

namespace {

constexpr const char* kJson = "application/json";

struct HttpError {
    int status;
    Json body;
};

HttpError classify(const std::exception& e) {
    auto body = [](const char* code, const std::string& message, const std::string& detail) {
        return Json{{"code", code}, {"message", message}, {"detail", detail}};
    };
    if (const auto* x = dynamic_cast<const NotFoundError*>(&e)) return {404, body("not_found", x->what(), x->detail())};
    if (const auto* x = dynamic_cast<const ValidationError*>(&e))
        return {422, body("validation_error", x->what(), x->detail())};
    if (const auto* x = dynamic_cast<const DomainError*>(&e)) return {422, body("domain_error", x->what(), x->detail())};
    if (const auto* x = dynamic_cast<const ParseError*>(&e)) return {400, body("parse_error", x->what(), x->detail())};
    if (const auto* x = dynamic_cast<const Json::exception*>(&e)) return {400, body("parse_error", x->what(), "")};
    return {500, body("internal_error", e.what(), "")};
}

std::optional<int> query_int(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    const auto v = req.get_param_value(key);
    try {
        std::size_t pos = 0;
        const int n = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ValidationError(std::string("query parameter '") + key + "' must be an integer", v);
    }
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
    snapshot_ = build_snapshot(config_.data_dir, 1, config_.snapshot);
    server_ = std::make_unique<httplib::Server>();
    install_routes();
}

Service::~Service() { stop(); }

std::shared_ptr<const Snapshot> Service::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

std::uint64_t Service::reload(const std::optional<std::filesystem::path>& dir) {
    // Serialize writers; readers only contend on the pointer swap.
    std::lock_guard writer(reload_mutex_);
    const auto current = snapshot();
    auto next = build_snapshot(dir.value_or(current->data_dir), current->version + 1, config_.snapshot);
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = std::move(next);
    return snapshot_->version;
}

void Service::install_routes() {
    auto& svr = *server_;
    svr.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                             {"Access-Control-Expose-Headers", "X-Snapshot-Version"}});

    using Handler = std::function<Json(const Snapshot&, const httplib::Request&)>;
    auto wrap = [this](Handler fn) {
        return [this, fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            const auto snap = snapshot();
            res.set_header("X-Snapshot-Version", std::to_string(snap->version));
            Json body;
            try {
                body = Json{{"version", snap->version}};
                body.update(fn(*snap, req));
                res.status = 200;
            } catch (const std::exception& e) {
                auto err = classify(e);
                res.status = err.status;
                body = err.body;
                body["version"] = snap->version;
            }
            res.set_content(body.dump(), kJson);
        };
    };

    svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    svr.Get("/nbs", wrap([](const Snapshot& s, const httplib::Request&) {
                Json list = Json::array();
                for (const auto& e : s.catalogue.entries()) list.push_back(to_json(e));
                return Json{{"nbs", list}};
            }));
    svr.Get(R"(/nbs/([^/]+))", wrap([](const Snapshot& s, const httplib::Request& req) {
                return Json{{"nbs", to_json(s.catalogue.at(req.matches[1].str()))}};
            }));
    svr.Get(R"(/nbs/([^/]+)/profile)", wrap([](const Snapshot& s, const httplib::Request& req) {
                return Json{{"profile", to_json(profile(s.catalogue, s.scores, req.matches[1].str()))}};
            }));
    svr.Get("/taxonomy", wrap([](const Snapshot& s, const httplib::Request&) {
                return Json{{"taxonomy", to_json(s.catalogue.taxonomy(), s.catalogue)}};
            }));
    svr.Get("/facets", wrap([](const Snapshot& s, const httplib::Request&) {
                Json list = Json::array();
                for (const auto& f : s.catalogue.facets()) list.push_back(to_json(f));
                return Json{{"facets", list}};
            }));
    svr.Get("/scores", wrap([](const Snapshot& s, const httplib::Request& req) {
                const auto view = req.has_param("view") ? req.get_param_value("view") : std::string("baseline");
                if (view == "baseline") return Json{{"scores", to_json(s.scores)}};
                if (view == "facet") return Json{{"scores", to_json(s.view)}};
                throw ValidationError("view must be 'baseline' or 'facet'", view);
            }));
    svr.Get("/evenness", wrap([](const Snapshot& s, const httplib::Request&) {
                Json list = Json::array();
                for (const auto& e : s.evenness) list.push_back(to_json(e));
                return Json{{"evenness", list}};
            }));
    svr.Get("/pca", wrap([](const Snapshot& s, const httplib::Request& req) {
                const int x = query_int(req, "x").value_or(1);
                const int y = query_int(req, "y").value_or(2);
                const auto points = scatter_data(s.pca, s.catalogue, x, y);
                return Json{{"pca", to_json(s.pca, s.pca_input.dropped)},
                            {"scatter", Json{{"dims", {x, y}}, {"points", to_json(points)}}}};
            }));
    svr.Get("/names", wrap([](const Snapshot& s, const httplib::Request&) {
                Json list = Json::array();
                for (const auto& d : s.decisions) list.push_back(to_json(d));
                return Json{{"decisions", list}};
            }));
    svr.Get(R"(/names/([^/]+)/decision)", wrap([](const Snapshot& s, const httplib::Request& req) {
                const auto id = req.matches[1].str();
                const auto* d = s.decision(id);
                if (!d) throw NotFoundError("no name decision for '" + id + "'", id);
                return Json{{"decision", to_json(*d)}};
            }));
    svr.Get("/rank", wrap([](const Snapshot& s, const httplib::Request& req) {
                if (!req.has_param("target")) throw ValidationError("query parameter 'target' is required");
                auto request = ranking_request_for_target(req.get_param_value("target"));
                if (req.has_param("filter")) request.filter = req.get_param_value("filter");
                if (auto n = query_int(req, "top_n")) request.top_n = *n;
                return Json{{"ranking", to_json(rank(s.catalogue, s.scores, request), s.catalogue)}};
            }));
    svr.Post("/rank", wrap([](const Snapshot& s, const httplib::Request& req) {
                 const auto request = ranking_request_from_json(Json::parse(req.body));
                 return Json{{"ranking", to_json(rank(s.catalogue, s.scores, request), s.catalogue)}};
             }));
    svr.Post("/reload", [this](const httplib::Request& req, httplib::Response& res) {
        Json body;
        try {
            std::optional<std::filesystem::path> dir;
            if (!req.body.empty()) {
                const auto in = Json::parse(req.body);
                if (in.contains("data_dir") && !in.at("data_dir").is_null())
                    dir = in.at("data_dir").get<std::string>();
            }
            const auto previous = snapshot()->version;
            const auto version = reload(dir);
            body = Json{{"version", version}, {"previous_version", previous}};
            res.status = 200;
        } catch (const std::exception& e) {
            auto err = classify(e);
            res.status = err.status;
            body = err.body;
            body["version"] = snapshot()->version;
        }
        const auto v = body.at("version").get<std::uint64_t>();
        res.set_header("X-Snapshot-Version", std::to_string(v));
        res.set_content(body.dump(), kJson);
    });

    svr.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        const auto snap = snapshot();
        res.set_header("X-Snapshot-Version", std::to_string(snap->version));
        Json body{{"code", res.status == 404 ? "not_found" : "http_error"},
                  {"message", res.status == 404 ? "no route for " + req.method + " " + req.path : "request failed"},
                  {"detail", req.path},
                  {"version", snap->version}};
        res.set_content(body.dump(), kJson);
    });
}

int Service::bind() {
    int port = config_.port;
    if (port == 0) {
        port = server_->bind_to_any_port(config_.host);
    } else if (!server_->bind_to_port(config_.host, port)) {
        port = -1;
    }
    if (port < 0) throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
    return port;
}

int Service::start() {
    const int port = bind();
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

void Service::run() {
    bind();
    server_->listen_after_bind();
}

void Service::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace nbs
