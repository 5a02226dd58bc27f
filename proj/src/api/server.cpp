#include "kumpul/api/server.hpp"

#include <charconv>
#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "kumpul/core/fields.hpp"
#include "kumpul/core/serialize.hpp"

namespace kumpul::api {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) {
        return fallback;
    }
    const auto v = req.get_param_value(name);
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw_validation(name, "must be a non-negative integer");
    }
    return out;
}

struct Page {
    std::size_t offset = 0;
    std::size_t limit = 0;
};

Page read_page(const httplib::Request& req, const ApiConfig& config) {
    Page p;
    p.limit = size_param(req, "limit", config.default_page_size);
    if (p.limit > config.max_page_size) {
        throw_validation("limit", fmt::format("must not exceed {}", config.max_page_size));
    }
    if (req.has_param("page")) {
        const auto page = size_param(req, "page", 1);
        if (page == 0) {
            throw_validation("page", "pages are numbered from 1");
        }
        p.offset = (page - 1) * p.limit;
    } else {
        p.offset = size_param(req, "offset", 0);
    }
    return p;
}

Json lineage_json(const store::LineageNode& node) {
    Json parents = Json::array();
    for (const auto& p : node.parents) {
        parents.push_back(lineage_json(p));
    }
    return Json{{"dataset", to_json(node.dataset)}, {"parents", std::move(parents)}};
}

Json parse_body(const httplib::Request& req) {
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
        throw_validation("body", "must be valid JSON");
    }
    return body;
}

} // namespace

void ApiConfig::apply_env() {
    if (const char* v = std::getenv("KUMPUL_PORT"); v != nullptr && *v != '\0') {
        int p = 0;
        auto [ptr, ec] = std::from_chars(v, v + std::strlen(v), p);
        if (ec != std::errc{} || *ptr != '\0') {
            throw_validation("KUMPUL_PORT", "must be an integer");
        }
        port = p;
    }
    if (const char* v = std::getenv("KUMPUL_BIND"); v != nullptr && *v != '\0') bind_address = v;
    if (const char* v = std::getenv("KUMPUL_STATIC_DIR"); v != nullptr && *v != '\0') static_dir = v;
    if (const char* v = std::getenv("KUMPUL_API_TOKEN"); v != nullptr && *v != '\0') auth_token = v;
}

void ApiConfig::check() const {
    if (port < 0 || port > 65535) {
        throw_validation("port", "must lie in [0, 65535]");
    }
    if (max_page_size == 0 || max_page_size > kMaxPageSize) {
        throw_validation("max_page_size", fmt::format("must lie in [1, {}]", kMaxPageSize));
    }
    if (default_page_size == 0 || default_page_size > max_page_size) {
        throw_validation("default_page_size", "must lie in [1, max_page_size]");
    }
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::validation: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::unavailable: return 503;
    case ErrorCode::protocol: return 502;
    case ErrorCode::storage:
    case ErrorCode::internal: return 500;
    }
    return 500;
}

Json error_body(const Error& e) {
    Json fields = Json::array();
    for (const auto& f : e.field_errors()) {
        fields.push_back(Json{{"field", f.field}, {"message", f.message}});
    }
    return Json{{"error", Json{{"code", to_string(e.code())}, {"message", e.what()}, {"fields", std::move(fields)}}}};
}

ApiServer::ApiServer(app::Platform& platform, ApiConfig config)
    : platform_(platform), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    config_.check();
    routes();
}

ApiServer::~ApiServer() {
    stop();
}

void ApiServer::routes() {
    auto& s = *server_;

    // Without SO_REUSEPORT, so a second server on a taken port fails to bind.
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            send_json(res, http_status(e.code()), error_body(e));
        } catch (const std::exception& e) {
            spdlog::error("unhandled error in request: {}", e.what());
            send_json(res, 500, error_body(Error(ErrorCode::internal, e.what())));
        }
    });

    s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        if (req.method == "OPTIONS") {
            res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type, Idempotency-Key");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Expose-Headers", "X-Total-Count");
            res.status = 204;
            return httplib::Server::HandlerResponse::Handled;
        }
        res.set_header("Access-Control-Expose-Headers", "X-Total-Count");
        const bool protected_route = req.path.rfind("/v1/", 0) == 0 && req.path != "/v1/health";
        if (config_.auth_token && protected_route) {
            const auto header = req.get_header_value("Authorization");
            if (header != "Bearer " + *config_.auth_token) {
                send_json(res, 401,
                          Json{{"error", Json{{"code", "unauthorized"},
                                              {"message", "missing or wrong bearer token"},
                                              {"fields", Json::array()}}}});
                return httplib::Server::HandlerResponse::Handled;
            }
        }
        return httplib::Server::HandlerResponse::Unhandled;
    });

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty() && res.status == 404) {
            send_json(res, 404, error_body(Error(ErrorCode::not_found, "no route for " + req.path)));
        }
    });

    auto health = [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, Json{{"status", "ok"}}); };
    s.Get("/health", health);
    s.Get("/v1/health", health);

    s.Get("/v1/sources", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, platform_.sources_catalog());
    });

    s.Post("/v1/jobs", [this](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_body(req);
        FieldErrors errors;
        ObjectReader r(body, "", errors);
        r.allow_only({"job_type", "payload"});
        std::optional<coord::JobType> type;
        if (auto t = r.string("job_type", true)) {
            type = coord::parse_job_type(*t);
            if (!type) {
                errors.add("job_type", "must be collect, preprocess or analyze");
            }
        }
        if (!r.has("payload")) {
            errors.add("payload", "is required");
        }
        errors.raise_if_any("invalid job submission");
        std::optional<std::string> key;
        if (req.has_header("Idempotency-Key")) {
            key = req.get_header_value("Idempotency-Key");
        }
        const auto id = platform_.coordinator().submit_job(*type, *r.raw("payload"), key);
        const auto job = platform_.coordinator().get_job(id);
        res.set_header("Location", "/v1/jobs/" + id);
        send_json(res, 201, Json{{"job_id", id}, {"status", coord::to_string(job.status)}});
    });

    s.Get("/v1/jobs", [this](const httplib::Request& req, httplib::Response& res) {
        store::JobFilter filter;
        if (req.has_param("status") && !req.get_param_value("status").empty()) {
            filter.status = coord::parse_job_status(req.get_param_value("status"));
            if (!filter.status) throw_validation("status", "unknown job status");
        }
        if (req.has_param("type") && !req.get_param_value("type").empty()) {
            filter.type = coord::parse_job_type(req.get_param_value("type"));
            if (!filter.type) throw_validation("type", "unknown job type");
        }
        const auto page = read_page(req, config_);
        Json out = Json::array();
        for (const auto& job : platform_.store().list_jobs(filter, page.offset, page.limit)) {
            out.push_back(coord::to_json(job));
        }
        res.set_header("X-Total-Count", std::to_string(platform_.store().count_jobs(filter)));
        send_json(res, 200, out);
    });

    s.Get(R"(/v1/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, coord::to_json(platform_.coordinator().get_job(req.matches[1])));
    });

    s.Post(R"(/v1/jobs/([^/]+)/cancel)", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, coord::to_json(platform_.coordinator().cancel_job(req.matches[1])));
    });

    s.Get(R"(/v1/jobs/([^/]+)/result)", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, platform_.job_result(req.matches[1]));
    });

    s.Get("/v1/datasets", [this](const httplib::Request& req, httplib::Response& res) {
        const auto page = read_page(req, config_);
        Json out = Json::array();
        for (const auto& d : platform_.store().list_datasets(page.offset, page.limit)) {
            out.push_back(to_json(d));
        }
        res.set_header("X-Total-Count", std::to_string(platform_.store().count_datasets()));
        send_json(res, 200, out);
    });

    s.Get(R"(/v1/datasets/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, to_json(platform_.store().resolve_dataset(req.matches[1])));
    });

    s.Get(R"(/v1/datasets/([^/]+)/records)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto dataset = platform_.store().resolve_dataset(req.matches[1]);
        const auto page = read_page(req, config_);
        Json out = Json::array();
        for (const auto& r : platform_.store().read_records(dataset.dataset_id, page.offset, page.limit)) {
            out.push_back(to_json(r));
        }
        res.set_header("X-Total-Count", std::to_string(dataset.record_count));
        send_json(res, 200, out);
    });

    s.Get(R"(/v1/datasets/([^/]+)/lineage)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto dataset = platform_.store().resolve_dataset(req.matches[1]);
        send_json(res, 200, lineage_json(platform_.store().get_lineage(dataset.dataset_id)));
    });

    if (!config_.static_dir.empty() && std::filesystem::is_directory(config_.static_dir)) {
        s.set_mount_point("/", config_.static_dir.string());
    } else {
        s.Get("/", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, Json{{"service", "kumpul"}, {"api", "/v1"}});
        });
    }
}

int ApiServer::bind() {
    if (port_ >= 0) {
        return port_;
    }
    if (config_.port == 0) {
        port_ = server_->bind_to_any_port(config_.bind_address);
    } else if (server_->bind_to_port(config_.bind_address, config_.port)) {
        port_ = config_.port;
    }
    if (port_ < 0) {
        throw Error(ErrorCode::unavailable,
                    fmt::format("cannot bind {}:{}", config_.bind_address, config_.port));
    }
    spdlog::info("api listening on {}:{}", config_.bind_address, port_);
    return port_;
}

void ApiServer::listen() {
    bind();
    server_->listen_after_bind();
}

int ApiServer::start() {
    const int port = bind();
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port;
}

void ApiServer::stop() {
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace kumpul::api
