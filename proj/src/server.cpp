#include <aspui/server.hpp>

#include <aspui/errors.hpp>
#include <aspui/snapshot.hpp>
#include <aspui/ui_engine.hpp>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <charconv>
#include <sstream>

namespace aspui {

// ---------------------------------------------------------------------------
// context placeholders

namespace {

std::string context_key(Term const &key) {
    if (key.is_constant() || key.is_string()) {
        return key.name();
    }
    return render_term(key);
}

Term typed_value(std::string const &key, std::string const &value, std::optional<std::string> const &type) {
    if (!type) {
        try {
            return parse_term(value);
        } catch (SyntaxError const &) {
            return Term::string(value);
        }
    }
    if (*type == "str") {
        return Term::string(value);
    }
    if (*type == "int") {
        std::int64_t n = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
            throw InvalidContextValue("context value for " + key + " is not an integer: '" + value + "'");
        }
        return Term::number(n);
    }
    // const
    if (!is_identifier(value)) {
        throw InvalidContextValue("context value for " + key + " is not a constant: '" + value + "'");
    }
    return Term::constant(value);
}

} // namespace

Term resolve_context(Term const &term, ContextMap const &context) {
    if (term.is_function() && term.name() == "_context_value" && term.arity() <= 3) {
        auto args = term.args();
        auto key = context_key(args[0]);
        std::optional<std::string> type;
        if (args.size() >= 2) {
            auto const &t = args[1];
            if (!t.is_constant() || (t.name() != "str" && t.name() != "int" && t.name() != "const")) {
                throw InvalidContextValue("unknown context value type " + render_term(t));
            }
            type = t.name();
        }
        auto it = context.find(key);
        if (it == context.end()) {
            if (args.size() == 3) {
                return args[2];
            }
            throw MissingContextKey("no context value for key '" + key + "'");
        }
        return typed_value(key, it->second, type);
    }
    if (term.is_function() || term.is_tuple()) {
        std::vector<Term> args;
        args.reserve(term.arity());
        for (auto const &a : term.args()) {
            args.push_back(resolve_context(a, context));
        }
        return term.is_tuple() ? Term::tuple(std::move(args)) : Term::function(term.name(), std::move(args));
    }
    return term;
}

std::string error_body(std::string_view code, std::string_view detail) {
    nlohmann::ordered_json j;
    j["error"] = code;
    j["detail"] = detail;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

int error_status(std::string_view code) {
    static std::set<std::string_view> const client = {"SyntaxError",         "UnknownOperation", "InvalidOperation",
                                                      "MissingContextKey",   "InvalidContextValue",
                                                      "UnknownExternal",     "BadRequest"};
    if (client.contains(code)) return 400;
    if (code == "ConflictingTruth" || code == "NoSolution") return 409;
    if (code == "SolverUnavailable") return 503;
    return 500;
}

// ---------------------------------------------------------------------------
// session

namespace {

HttpResponse error_response(std::exception const &e) {
    if (auto const *err = dynamic_cast<Error const *>(&e)) {
        return {error_status(err->code()), error_body(err->code(), err->what())};
    }
    return {500, error_body("InternalError", e.what())};
}

} // namespace

Session::Session(ServerConfig config)
: config_(std::move(config))
, bridge_(config_.solver)
, backend_(make_backend(config_.backend)) {
    if (config_.domain_files.empty()) {
        throw InvalidConfig("no domain files given");
    }
    if (config_.ui_files.empty()) {
        throw InvalidConfig("no UI files given");
    }
    backend_->configure(config_.backend_options);
    for (auto const &path : config_.ui_files) {
        ui_files_.add_file(path);
    }
    domain_ = std::make_unique<DomainControl>(config_.domain_files, *backend_, bridge_);
}

std::uint64_t Session::revision() const {
    std::lock_guard lock(mutex_);
    return domain_->revision();
}

HttpResponse Session::render_ui() {
    auto rev = domain_->revision();
    if (ui_cache_ && ui_cache_->first == rev) {
        return {200, ui_cache_->second};
    }
    auto facts = snapshot_facts(*domain_->snapshot());
    auto json = serialize_tree(assemble_tree(build_ui_atoms(ui_files_, facts, bridge_)));
    ui_cache_.emplace(rev, json);
    return {200, std::move(json)};
}

HttpResponse Session::get_ui() {
    std::lock_guard lock(mutex_);
    try {
        return render_ui();
    } catch (std::exception const &e) {
        return error_response(e);
    }
}

HttpResponse Session::post_operation(std::string const &body) {
    Term operation;
    ContextMap context;
    try {
        auto j = nlohmann::json::parse(body);
        if (!j.is_object() || !j.contains("operation") || !j["operation"].is_string()) {
            return {400, error_body("BadRequest", "body must be an object with a string field 'operation'")};
        }
        if (j.contains("context")) {
            if (!j["context"].is_array()) {
                return {400, error_body("BadRequest", "'context' must be a list of key/value objects")};
            }
            for (auto const &entry : j["context"]) {
                if (!entry.is_object() || !entry.contains("key") || !entry["key"].is_string() ||
                    !entry.contains("value") || !entry["value"].is_string()) {
                    return {400, error_body("BadRequest", "context entries need string 'key' and 'value'")};
                }
                context[entry["key"].get<std::string>()] = entry["value"].get<std::string>();
            }
        }
        operation = parse_term(j["operation"].get<std::string>());
    } catch (nlohmann::json::exception const &e) {
        return {400, error_body("BadRequest", std::string("invalid JSON: ") + e.what())};
    } catch (std::exception const &e) {
        return error_response(e);
    }

    std::vector<Term> ops;
    if (operation.is_tuple()) {
        ops.assign(operation.args().begin(), operation.args().end());
    } else {
        ops.push_back(operation);
    }
    std::lock_guard lock(mutex_);
    try {
        for (auto const &op : ops) {
            domain_->execute(resolve_context(op, context));
        }
        return render_ui();
    } catch (std::exception const &e) {
        return error_response(e);
    }
}

HttpResponse Session::get_health() {
    try {
        auto info = bridge_.solver_info();
        nlohmann::ordered_json j;
        j["status"] = "ok";
        j["solver"] = info;
        j["revision"] = revision();
        return {200, j.dump()};
    } catch (std::exception const &e) {
        return error_response(e);
    }
}

// ---------------------------------------------------------------------------
// HTTP

struct HttpServer::Impl {
    explicit Impl(Session &s) : session(s) {}
    Session &session;
    httplib::Server server;
};

namespace {

thread_local std::chrono::steady_clock::time_point request_start;

void reply(httplib::Response &res, HttpResponse const &r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
}

} // namespace

HttpServer::HttpServer(Session &session) : impl_(std::make_unique<Impl>(session)) {
    auto &svr = impl_->server;
    // SO_REUSEADDR only: with SO_REUSEPORT a second server would silently share the port
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<char const *>(&yes), sizeof yes);
    });
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    svr.set_pre_routing_handler([](httplib::Request const &, httplib::Response &) {
        request_start = std::chrono::steady_clock::now();
        return httplib::Server::HandlerResponse::Unhandled;
    });
    svr.Get("/ui", [this](httplib::Request const &, httplib::Response &res) { reply(res, impl_->session.get_ui()); });
    svr.Post("/operation", [this](httplib::Request const &req, httplib::Response &res) {
        reply(res, impl_->session.post_operation(req.body));
    });
    svr.Get("/health",
            [this](httplib::Request const &, httplib::Response &res) { reply(res, impl_->session.get_health()); });
    svr.Options(".*", [](httplib::Request const &, httplib::Response &res) { res.status = 204; });
    if (auto const &dir = session.config().frontend_dir) {
        if (!svr.set_mount_point("/", dir->string())) {
            throw InvalidConfig("frontend directory not found: " + dir->string());
        }
    }
    svr.set_logger([this](httplib::Request const &req, httplib::Response const &res) {
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - request_start).count();
        std::ostringstream line;
        line << req.method << ' ' << req.path << ' ' << res.status << " revision=" << impl_->session.revision()
             << " duration=" << static_cast<long long>(ms) << "ms";
        log::info(line.str());
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(std::string const &host, int port) {
    auto &svr = impl_->server;
    if (port == 0) {
        int bound = svr.bind_to_any_port(host);
        if (bound < 0) {
            throw IoError("cannot bind " + host);
        }
        return bound;
    }
    if (!svr.bind_to_port(host, port)) {
        throw IoError("cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

// ---------------------------------------------------------------------------
// command line

CliOptions parse_cli(std::vector<std::string> const &args,
                     std::function<std::optional<std::string>(std::string const &)> env) {
    CliOptions opts;
    auto &cfg = opts.server;
    if (env) {
        if (auto solver = env("ASPUI_SOLVER")) {
            cfg.solver.executable = *solver;
        }
        if (auto port = env("ASPUI_PORT")) {
            int p = 0;
            auto [ptr, ec] = std::from_chars(port->data(), port->data() + port->size(), p);
            if (ec != std::errc{} || ptr != port->data() + port->size() || p < 0 || p > 65535) {
                throw UsageError("ASPUI_PORT is not a valid port: " + *port);
            }
            cfg.port = p;
        }
    }
    cfg.log_level = log::Level::Info;

    CLI::App app{"Interactive user interfaces from answer-set programs", "aspui"};
    app.set_version_flag("--version", "aspui 0.1.0");
    app.require_subcommand(1, 1);

    std::string log_level = "info";
    std::string scripting = "auto";
    long timeout_ms = static_cast<long>(cfg.solver.timeout.count());
    std::string frontend_dir;
    std::map<std::string, std::vector<std::string>> backend_values;
    std::vector<std::string> context_entries;

    auto server_flags = [&](CLI::App *sub) {
        sub->add_option("--domain-files", cfg.domain_files, "Domain encoding and instance files")->required();
        sub->add_option("--ui-files", cfg.ui_files, "UI encoding files")->required();
        auto backends = registered_backends();
        sub->add_option("--backend", cfg.backend, "Backend name")
            ->check(CLI::IsMember(backends))
            ->capture_default_str();
        std::set<std::string> seen;
        for (auto const &name : backends) {
            for (auto const &spec : make_backend(name)->options()) {
                if (seen.insert(spec.flag).second) {
                    auto *opt = sub->add_option(spec.flag, backend_values[spec.flag], spec.description + " (" + name + ")");
                    if (spec.repeatable) {
                        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)->allow_extra_args(false);
                    }
                }
            }
        }
        sub->add_option("--host", cfg.host, "Address to listen on")->capture_default_str();
        sub->add_option("--port", cfg.port, "Port to listen on (0 picks a free one)")->check(CLI::Range(0, 65535));
        sub->add_option("--solver", cfg.solver.executable, "clingo executable");
        sub->add_option("--solver-timeout", timeout_ms, "Per-call solver timeout in milliseconds")
            ->check(CLI::PositiveNumber);
        sub->add_option("--scripting", scripting, "Assumption handling: auto, lua or plain")
            ->check(CLI::IsMember({"auto", "lua", "plain"}));
        sub->add_option("--log-level", log_level, "debug, info, warning, error or off")
            ->check(CLI::IsMember({"debug", "info", "warning", "error", "off"}));
        sub->add_option("--frontend-dir", frontend_dir, "Directory of static frontend files served under /");
    };

    auto *server = app.add_subcommand("server", "Run the HTTP server");
    server_flags(server);
    auto *client_server = app.add_subcommand("client-server", "Run the server and print the client address");
    server_flags(client_server);

    auto *client = app.add_subcommand("client", "Query a running server from the terminal");
    client->add_option("--url", opts.client.url, "Server address")->capture_default_str();
    client->add_option("--operation", opts.client.operation, "Operation to post before printing the UI");
    client->add_option("--context", context_entries, "Context entry key=value (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->allow_extra_args(false);
    client->add_flag("--json", opts.client.json, "Print the raw UI JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (CLI::CallForHelp const &) {
        opts.message = app.help();
        return opts;
    } catch (CLI::CallForAllHelp const &) {
        opts.message = app.help("", CLI::AppFormatMode::All);
        return opts;
    } catch (CLI::CallForVersion const &) {
        opts.message = app.version();
        return opts;
    } catch (CLI::ParseError const &e) {
        auto *failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        throw UsageError(std::string(e.what()) + "\n\n" + failed->help());
    }

    auto *chosen = app.get_subcommands().front();
    if (chosen == client) {
        opts.mode = CliMode::Client;
        for (auto const &entry : context_entries) {
            auto eq = entry.find('=');
            if (eq == std::string::npos) {
                throw UsageError("--context expects key=value but got '" + entry + "'");
            }
            opts.client.context[entry.substr(0, eq)] = entry.substr(eq + 1);
        }
        return opts;
    }
    opts.mode = chosen == server ? CliMode::Server : CliMode::ClientServer;
    cfg.solver.timeout = std::chrono::milliseconds(timeout_ms);
    cfg.solver.scripting = scripting == "lua" ? ScriptingMode::Lua
                           : scripting == "plain" ? ScriptingMode::Plain
                                                  : ScriptingMode::Auto;
    cfg.log_level = log::parse_level(log_level);
    if (!frontend_dir.empty()) {
        cfg.frontend_dir = frontend_dir;
    }
    for (auto &[flag, values] : backend_values) {
        if (!values.empty()) {
            cfg.backend_options[flag] = values;
        }
    }
    // let the chosen backend reject options it does not understand
    try {
        make_backend(cfg.backend)->configure(cfg.backend_options);
    } catch (Error const &e) {
        throw UsageError(std::string(e.what()) + "\n\n" + chosen->help());
    }
    return opts;
}

} // namespace aspui
