#pragma once

#include <aspui/backend.hpp>
#include <aspui/domain_control.hpp>
#include <aspui/log.hpp>
#include <aspui/solver_bridge.hpp>
#include <aspui/term.hpp>

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace aspui {

struct ServerConfig {
    std::vector<std::filesystem::path> domain_files;
    std::vector<std::filesystem::path> ui_files;
    std::string backend = "ClingoBackend";
    OptionValues backend_options;
    std::string host = "127.0.0.1";
    int port = 8000;
    SolverConfig solver;
    log::Level log_level = log::Level::Warning;
    /// Served under `/` when set.
    std::optional<std::filesystem::path> frontend_dir;
};

struct HttpResponse {
    int status = 200;
    std::string body;
};

using ContextMap = std::map<std::string, std::string>;

/// Replaces `_context_value(K)`, `_context_value(K,T)` and
/// `_context_value(K,T,D)` anywhere in `term`. T is str, int or const.
/// Throws MissingContextKey or InvalidContextValue.
Term resolve_context(Term const &term, ContextMap const &context);

/// `{"error": code, "detail": text}`
std::string error_body(std::string_view code, std::string_view detail);

/// HTTP status for a library error code.
int error_status(std::string_view code);

/// The single global session behind the HTTP endpoints. All handlers are
/// serialized by one lock.
class Session {
public:
    explicit Session(ServerConfig config);

    HttpResponse get_ui();
    /// Body: `{"operation": string, "context": [{"key":..,"value":..}...]}`.
    HttpResponse post_operation(std::string const &body);
    HttpResponse get_health();

    std::uint64_t revision() const;
    ServerConfig const &config() const noexcept { return config_; }

private:
    HttpResponse render_ui();

    ServerConfig config_;
    SolverBridge bridge_;
    std::unique_ptr<Backend> backend_;
    ProgramBundle ui_files_;
    std::unique_ptr<DomainControl> domain_;
    mutable std::mutex mutex_;
    std::optional<std::pair<std::uint64_t, std::string>> ui_cache_;
};

/// HTTP front of a session: GET /ui, POST /operation, GET /health.
class HttpServer {
public:
    explicit HttpServer(Session &session);
    ~HttpServer();

    /// Binds `host:port` (0 picks a free port) and returns the bound port.
    /// Throws IoError when binding fails.
    int bind(std::string const &host, int port);
    /// Blocks until `stop()` is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class CliMode { Server, Client, ClientServer };

struct ClientOptions {
    std::string url = "http://127.0.0.1:8000";
    std::optional<std::string> operation;
    ContextMap context;
    bool json = false;
};

struct CliOptions {
    CliMode mode = CliMode::Server;
    ServerConfig server;
    ClientOptions client;
    /// Set when help or version output was requested; print it and exit 0.
    std::optional<std::string> message;
};

/// Parses `aspui <server|client|client-server> ...`. `env` supplies
/// ASPUI_SOLVER and ASPUI_PORT (flags win). Throws UsageError whose message
/// includes the help text.
CliOptions parse_cli(std::vector<std::string> const &args,
                     std::function<std::optional<std::string>(std::string const &)> env = {});

} // namespace aspui
