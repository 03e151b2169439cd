#include <aspui/errors.hpp>
#include <aspui/log.hpp>
#include <aspui/server.hpp>
#include <aspui/ui_engine.hpp>

#include <httplib.h>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

using namespace aspui;

void print_outline(UINode const &node, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    std::cout << indent << node.type << ' ' << render_term(node.id);
    for (auto const &a : node.attributes) {
        std::cout << ' ' << render_term(a.key) << '=' << render_term(a.value);
    }
    std::cout << '\n';
    for (auto const &h : node.when) {
        std::cout << indent << "  on " << render_term(h.event) << ' ' << h.action << ' ' << render_term(h.operand)
                  << '\n';
    }
    for (auto const &c : node.children) {
        print_outline(c, depth + 1);
    }
}

int run_client(ClientOptions const &opts) {
    httplib::Client cli(opts.url);
    cli.set_read_timeout(120, 0);
    httplib::Result res;
    if (opts.operation) {
        nlohmann::json body;
        body["operation"] = *opts.operation;
        body["context"] = nlohmann::json::array();
        for (auto const &[k, v] : opts.context) {
            body["context"].push_back({{"key", k}, {"value", v}});
        }
        res = cli.Post("/operation", body.dump(), "application/json");
    } else {
        res = cli.Get("/ui");
    }
    if (!res) {
        std::cerr << "aspui: cannot reach " << opts.url << ": " << httplib::to_string(res.error()) << '\n';
        return 1;
    }
    if (res->status != 200) {
        std::cerr << "aspui: server answered " << res->status << ": " << res->body << '\n';
        return 1;
    }
    if (opts.json) {
        std::cout << res->body << '\n';
    } else {
        print_outline(parse_tree(res->body), 0);
    }
    return 0;
}

int run_server(ServerConfig const &cfg, bool announce_client) {
    // handled by a dedicated thread so the server can shut down cleanly
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Session session(cfg);
    HttpServer server(session);
    int port = server.bind(cfg.host, cfg.port);
    std::string url = "http://" + cfg.host + ":" + std::to_string(port);
    std::cerr << "aspui: serving on " << url << " (solver: " << cfg.solver.executable << ")\n";
    if (announce_client) {
        if (cfg.frontend_dir) {
            std::cout << "open " << url << "/ in a browser" << std::endl;
        } else {
            std::cout << "client: aspui client --url " << url << std::endl;
        }
    }
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        auto opts = parse_cli(args, [](std::string const &name) -> std::optional<std::string> {
            if (char const *v = std::getenv(name.c_str()); v && *v) {
                return std::string(v);
            }
            return std::nullopt;
        });
        if (opts.message) {
            std::cout << *opts.message << '\n';
            return 0;
        }
        if (opts.mode == CliMode::Client) {
            return run_client(opts.client);
        }
        log::set_level(opts.server.log_level);
        return run_server(opts.server, opts.mode == CliMode::ClientServer);
    } catch (UsageError const &e) {
        std::cerr << "aspui: " << e.what() << '\n';
        return 2;
    } catch (std::exception const &e) {
        std::cerr << "aspui: " << e.what() << '\n';
        return 1;
    }
}
