#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "kumpul/app/platform.hpp"
#include "kumpul/core/error.hpp"

namespace httplib {
class Server;
}

namespace kumpul::api {

inline constexpr std::size_t kMaxPageSize = 1000;

struct ApiConfig {
    std::string bind_address = "0.0.0.0";
    int port = 8080;
    /// Built web UI assets served at "/"; skipped when empty or missing.
    std::filesystem::path static_dir;
    std::size_t default_page_size = 50;
    std::size_t max_page_size = kMaxPageSize;
    /// When set, /v1 routes other than /v1/health need "Authorization: Bearer <token>".
    std::optional<std::string> auth_token;

    /// Applies KUMPUL_PORT, KUMPUL_BIND, KUMPUL_STATIC_DIR and KUMPUL_API_TOKEN.
    void apply_env();
    /// Throws Error(validation) on a bad port or page size.
    void check() const;
};

int http_status(ErrorCode code) noexcept;
Json error_body(const Error& e);

/// JSON HTTP front end under /v1. Every state change goes through the
/// platform's coordinator or datastore; no handler runs jobs inline.
class ApiServer {
public:
    ApiServer(app::Platform& platform, ApiConfig config);
    ~ApiServer();

    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds the configured port (0 picks a free one) and returns it.
    /// Throws Error(unavailable) when the bind fails.
    int bind();
    /// Serves until stop(); binds first when needed.
    void listen();
    /// bind() + listen() on a background thread.
    int start();
    /// Stops accepting, finishes in-flight responses, joins the thread.
    void stop();

    int port() const noexcept { return port_; }

private:
    void routes();

    app::Platform& platform_;
    ApiConfig config_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = -1;
};

} // namespace kumpul::api
