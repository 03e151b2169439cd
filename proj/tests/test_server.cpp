#include <aspui/errors.hpp>
#include <aspui/server.hpp>
#include <aspui/ui_engine.hpp>

#include "test_env.hpp"

#include <httplib.h>
#include <json.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <csignal>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

using namespace aspui;
namespace ts = aspui::test_support;
using nlohmann::json;

namespace {

Term t(char const *text) { return parse_term(text); }

ServerConfig seating_config(std::vector<std::string> ui = {"ui-tables.lp", "ui-menu.lp", "ui-people.lp"},
                            std::string backend = "ClingoBackend") {
    ServerConfig c;
    c.domain_files = {ts::seating("ins.lp"), ts::seating("enc.lp")};
    for (auto const &f : ui) c.ui_files.push_back(ts::seating(f));
    c.backend = std::move(backend);
    c.solver = ts::solver_config();
    return c;
}

std::string op_body(std::string const &op, std::vector<std::pair<std::string, std::string>> context = {}) {
    json j;
    j["operation"] = op;
    j["context"] = json::array();
    for (auto const &[k, v] : context) j["context"].push_back({{"key", k}, {"value", v}});
    return j.dump();
}

std::string error_code(HttpResponse const &r) { return json::parse(r.body).at("error").get<std::string>(); }

UINode const *find(UINode const &n, Term const &id) {
    if (n.id == id) return &n;
    for (auto const &c : n.children)
        if (auto f = find(c, id)) return f;
    return nullptr;
}

std::optional<std::string> no_env(std::string const &) { return std::nullopt; }

} // namespace

// ---------------------------------------------------------------------------
// context placeholders

TEST(ResolveContext, Types) {
    ContextMap ctx{{"name", "Ana"}, {"pet", "dog"}, {"n", "42"}, {"tuple", "(1,2)"}, {"text", "two words"}};
    EXPECT_EQ(resolve_context(t("add_atom(person(_context_value(name,str),_context_value(pet,const)))"), ctx),
              t("add_atom(person(\"Ana\",dog))"));
    EXPECT_EQ(resolve_context(t("f(_context_value(n,int))"), ctx), t("f(42)"));
    // untyped values are parsed as terms when possible
    EXPECT_EQ(resolve_context(t("f(_context_value(tuple))"), ctx), t("f((1,2))"));
    EXPECT_EQ(resolve_context(t("f(_context_value(n))"), ctx), t("f(42)"));
    EXPECT_EQ(resolve_context(t("f(_context_value(text))"), ctx), t("f(\"two words\")"));
    EXPECT_EQ(resolve_context(t("f(_context_value(\"name\",str))"), ctx), t("f(\"Ana\")"));
    EXPECT_EQ(resolve_context(t("(a,_context_value(pet,const))"), ctx), t("(a,dog)"));
    EXPECT_EQ(resolve_context(t("next_solution"), ctx), t("next_solution"));
}

TEST(ResolveContext, DefaultsAndErrors) {
    ContextMap ctx{{"name", "Ana"}, {"bad", "1x"}};
    EXPECT_EQ(resolve_context(t("f(_context_value(missing,int,7))"), ctx), t("f(7)"));
    EXPECT_EQ(resolve_context(t("f(_context_value(name,str,\"x\"))"), ctx), t("f(\"Ana\")"));
    EXPECT_THROW(resolve_context(t("f(_context_value(missing))"), ctx), MissingContextKey);
    EXPECT_THROW(resolve_context(t("f(_context_value(name,int))"), ctx), InvalidContextValue);
    EXPECT_THROW(resolve_context(t("f(_context_value(name,const))"), ctx), InvalidContextValue);
    EXPECT_THROW(resolve_context(t("f(_context_value(bad,const))"), ctx), InvalidContextValue);
    EXPECT_THROW(resolve_context(t("f(_context_value(name,float))"), ctx), InvalidContextValue);
}

TEST(ErrorMapping, StatusCodes) {
    for (auto code : {"SyntaxError", "UnknownOperation", "InvalidOperation", "MissingContextKey",
                      "InvalidContextValue", "UnknownExternal", "BadRequest"}) {
        EXPECT_EQ(error_status(code), 400) << code;
    }
    EXPECT_EQ(error_status("ConflictingTruth"), 409);
    EXPECT_EQ(error_status("NoSolution"), 409);
    EXPECT_EQ(error_status("SolverUnavailable"), 503);
    EXPECT_EQ(error_status("GroundingError"), 500);
    EXPECT_EQ(error_status("NoUIModel"), 500);
    EXPECT_EQ(error_body("NoSolution", "say \"no\""), R"({"error":"NoSolution","detail":"say \"no\""})");
}

// ---------------------------------------------------------------------------
// command line

TEST(ParseCli, ServerInvocation) {
    auto o = parse_cli({"server", "--domain-files", "ins.lp", "enc.lp", "--ui-files", "ui-tables.lp"}, no_env);
    EXPECT_EQ(o.mode, CliMode::Server);
    EXPECT_FALSE(o.message);
    EXPECT_EQ(o.server.domain_files, (std::vector<std::filesystem::path>{"ins.lp", "enc.lp"}));
    EXPECT_EQ(o.server.ui_files, (std::vector<std::filesystem::path>{"ui-tables.lp"}));
    EXPECT_EQ(o.server.backend, "ClingoBackend");
    EXPECT_TRUE(o.server.backend_options.empty());
    EXPECT_EQ(o.server.host, "127.0.0.1");
    EXPECT_EQ(o.server.port, 8000);
    EXPECT_EQ(o.server.solver.executable, "clingo");
}

TEST(ParseCli, ExplanationInvocation) {
    auto o = parse_cli({"client-server", "--domain-files", "ins.lp", "enc.lp", "--ui-files", "ui-tables.lp",
                        "ui-menu.lp", "ui-people.lp", "ui-explain.lp", "ui-explain-msg.lp", "--backend",
                        "ExplanationBackend", "--assumption-signature", "cons,2"},
                       no_env);
    EXPECT_EQ(o.mode, CliMode::ClientServer);
    EXPECT_EQ(o.server.ui_files.size(), 5u);
    EXPECT_EQ(o.server.backend, "ExplanationBackend");
    EXPECT_EQ(o.server.backend_options, (OptionValues{{"--assumption-signature", {"cons,2"}}}));

    auto b = make_backend(o.server.backend);
    b->configure(o.server.backend_options);
    EXPECT_EQ(dynamic_cast<ExplanationBackend &>(*b).signatures(), (std::vector<Signature>{{"cons", 2}}));
}

TEST(ParseCli, ServerOptions) {
    auto o = parse_cli({"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--port", "0", "--host", "0.0.0.0",
                        "--solver", "/opt/clingo", "--solver-timeout", "1500", "--scripting", "plain", "--log-level",
                        "debug", "--backend", "ExplanationBackend", "--assumption-signature", "p,1",
                        "--assumption-signature", "q,0", "--frontend-dir", "web"},
                       no_env);
    EXPECT_EQ(o.server.port, 0);
    EXPECT_EQ(o.server.host, "0.0.0.0");
    EXPECT_EQ(o.server.solver.executable, "/opt/clingo");
    EXPECT_EQ(o.server.solver.timeout, std::chrono::milliseconds(1500));
    EXPECT_EQ(o.server.solver.scripting, ScriptingMode::Plain);
    EXPECT_EQ(o.server.log_level, log::Level::Debug);
    EXPECT_EQ(o.server.backend_options.at("--assumption-signature"), (std::vector<std::string>{"p,1", "q,0"}));
    EXPECT_EQ(o.server.frontend_dir, std::filesystem::path("web"));
}

TEST(ParseCli, Environment) {
    auto env = [](std::string const &name) -> std::optional<std::string> {
        if (name == "ASPUI_SOLVER") return "/env/clingo";
        if (name == "ASPUI_PORT") return "9001";
        return std::nullopt;
    };
    auto o = parse_cli({"server", "--domain-files", "a.lp", "--ui-files", "u.lp"}, env);
    EXPECT_EQ(o.server.solver.executable, "/env/clingo");
    EXPECT_EQ(o.server.port, 9001);
    o = parse_cli({"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--port", "7000", "--solver", "x"}, env);
    EXPECT_EQ(o.server.port, 7000);
    EXPECT_EQ(o.server.solver.executable, "x");
    auto bad = [](std::string const &name) -> std::optional<std::string> {
        if (name == "ASPUI_PORT") return "eighty";
        return std::nullopt;
    };
    EXPECT_THROW(parse_cli({"server", "--domain-files", "a.lp", "--ui-files", "u.lp"}, bad), UsageError);
}

TEST(ParseCli, Client) {
    auto o = parse_cli({"client", "--url", "http://localhost:9000", "--operation",
                        "add_atom(person(_context_value(name,str),dog))", "--context", "name=Ana", "--context",
                        "note=a=b", "--json"},
                       no_env);
    EXPECT_EQ(o.mode, CliMode::Client);
    EXPECT_EQ(o.client.url, "http://localhost:9000");
    EXPECT_EQ(o.client.operation, "add_atom(person(_context_value(name,str),dog))");
    EXPECT_EQ(o.client.context, (ContextMap{{"name", "Ana"}, {"note", "a=b"}}));
    EXPECT_TRUE(o.client.json);
    EXPECT_EQ(parse_cli({"client"}, no_env).client.url, "http://127.0.0.1:8000");
}

TEST(ParseCli, Errors) {
    using Args = std::vector<std::string>;
    for (auto const &args : {
             Args{},
             Args{"serve"},
             Args{"server", "--ui-files", "u.lp"},
             Args{"server", "--domain-files", "a.lp"},
             Args{"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--backend", "Nope"},
             Args{"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--assumption-signature", "cons,2"},
             Args{"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--backend", "ExplanationBackend",
                  "--assumption-signature", "cons"},
             Args{"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--port", "70000"},
             Args{"server", "--domain-files", "a.lp", "--ui-files", "u.lp", "--scripting", "python"},
             Args{"client", "--context", "novalue"},
             Args{"server", "client"},
         }) {
        EXPECT_THROW(parse_cli(args, no_env), UsageError) << ::testing::PrintToString(args);
    }
    try {
        parse_cli({"server", "--domain-files", "a.lp"}, no_env);
    } catch (UsageError const &e) {
        EXPECT_NE(std::string(e.what()).find("--ui-files"), std::string::npos);
    }
}

TEST(ParseCli, HelpAndVersion) {
    auto help = parse_cli({"--help"}, no_env);
    ASSERT_TRUE(help.message);
    EXPECT_NE(help.message->find("client-server"), std::string::npos);
    auto sub = parse_cli({"server", "--help"}, no_env);
    ASSERT_TRUE(sub.message);
    EXPECT_NE(sub.message->find("--assumption-signature"), std::string::npos);
    auto version = parse_cli({"--version"}, no_env);
    ASSERT_TRUE(version.message);
    EXPECT_NE(version.message->find("aspui"), std::string::npos);
}

// ---------------------------------------------------------------------------
// session

TEST(SessionSetup, Errors) {
    auto c = seating_config();
    c.ui_files.clear();
    EXPECT_THROW(Session{c}, InvalidConfig);
    c = seating_config();
    c.domain_files.clear();
    EXPECT_THROW(Session{c}, InvalidConfig);
    c = seating_config();
    c.backend = "Nope";
    EXPECT_THROW(Session{c}, InvalidConfig);
    c = seating_config();
    c.ui_files.push_back("/nonexistent/ui.lp");
    EXPECT_THROW(Session{c}, FileNotFound);
    c = seating_config();
    c.solver.executable = "/nonexistent/clingo";
    EXPECT_THROW(Session{c}, SolverUnavailable);
}

class SeatingSession : public ::testing::Test {
protected:
    Session session{seating_config()};
};

TEST_F(SeatingSession, GetIsIdempotent) {
    auto a = session.get_ui();
    auto b = session.get_ui();
    ASSERT_EQ(a.status, 200) << a.body;
    EXPECT_EQ(a.body, b.body);
    EXPECT_EQ(session.revision(), 0u);
    auto tree = parse_tree(a.body);
    EXPECT_EQ(tree.id, t("root"));
    EXPECT_NE(find(tree, t("seat_dd((2,3))")), nullptr);
    EXPECT_EQ(serialize_tree(tree), a.body);
}

TEST_F(SeatingSession, OperationsUpdateTheUI) {
    auto r = session.post_operation(op_body("add_assumption(assign(alexander,(1,1)),true)"));
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(session.revision(), 1u);
    EXPECT_EQ(session.get_ui().body, r.body);
    auto tree = parse_tree(r.body);
    auto const *dd = find(tree, t("seat_dd((1,2))"));
    ASSERT_NE(dd, nullptr);
    EXPECT_NE(std::find(dd->attributes.begin(), dd->attributes.end(), UIAttribute{t("selected"), t("susana")}),
              dd->attributes.end());

    // a tuple runs its elements in order
    r = session.post_operation(op_body("(clear_assumptions,next_solution)"));
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(session.revision(), 3u);
}

TEST_F(SeatingSession, ContextOperation) {
    auto r = session.post_operation(op_body("add_atom(person(_context_value(name,str),_context_value(pet,const)))",
                                            {{"name", "Ana"}, {"pet", "dog"}}));
    ASSERT_EQ(r.status, 200) << r.body;
    auto tree = parse_tree(r.body);
    EXPECT_NE(find(tree, t("person(\"Ana\")")), nullptr);
}

TEST_F(SeatingSession, Errors) {
    auto expect_error = [&](std::string const &body, int status, std::string const &code) {
        auto r = session.post_operation(body);
        EXPECT_EQ(r.status, status) << body << " -> " << r.body;
        EXPECT_EQ(error_code(r), code) << body;
        auto j = json::parse(r.body);
        EXPECT_TRUE(j.at("detail").is_string());
    };
    expect_error("not json", 400, "BadRequest");
    expect_error("[]", 400, "BadRequest");
    expect_error(R"({"operation": 3})", 400, "BadRequest");
    expect_error(R"({"operation": "restart", "context": {}})", 400, "BadRequest");
    expect_error(R"({"operation": "restart", "context": [{"key": "a"}]})", 400, "BadRequest");
    expect_error(op_body("add_assumption("), 400, "SyntaxError");
    expect_error(op_body("launch"), 400, "UnknownOperation");
    expect_error(op_body("add_assumption(a,maybe)"), 400, "InvalidOperation");
    expect_error(op_body("add_atom(_context_value(name))"), 400, "MissingContextKey");
    expect_error(op_body("add_atom(f(_context_value(n,int)))", {{"n", "x"}}), 400, "InvalidContextValue");
    expect_error(op_body("set_external(e,true)"), 400, "UnknownExternal");
    EXPECT_EQ(session.revision(), 0u);

    ASSERT_EQ(session.post_operation(op_body("add_assumption(assign(alexander,(1,1)),true)")).status, 200);
    expect_error(op_body("add_assumption(assign(alexander,(1,1)),false)"), 409, "ConflictingTruth");
    auto unsat = session.post_operation(op_body("add_assumption(assign(torsten,(1,2)),true)"));
    EXPECT_EQ(unsat.status, 200) << unsat.body;
    expect_error(op_body("next_solution"), 409, "NoSolution");
}

TEST_F(SeatingSession, Health) {
    auto r = session.get_health();
    ASSERT_EQ(r.status, 200) << r.body;
    auto j = json::parse(r.body);
    EXPECT_EQ(j.at("status"), "ok");
    EXPECT_NE(j.at("solver").get<std::string>().find("clingo"), std::string::npos);
    EXPECT_EQ(j.at("revision"), 0);
}

TEST(SessionExplanation, UnsatUIShowsExplanation) {
    auto c = seating_config({"ui-tables-explain.lp", "ui-menu.lp", "ui-people.lp", "ui-explain.lp",
                             "ui-explain-msg.lp"},
                            "ExplanationBackend");
    c.backend_options["--assumption-signature"] = {"cons,2"};
    Session session(c);
    ASSERT_EQ(session.post_operation(op_body("add_assumption(assign(alexander,(1,1)),true)")).status, 200);
    auto r = session.post_operation(op_body("add_assumption(assign(torsten,(1,2)),true)"));
    ASSERT_EQ(r.status, 200) << r.body;
    auto tree = parse_tree(r.body);
    auto const *msg = find(tree, t("explanation(same_pet)"));
    ASSERT_NE(msg, nullptr) << r.body;
    EXPECT_EQ(msg->type, "message");
    EXPECT_NE(std::find(msg->attributes.begin(), msg->attributes.end(),
                        UIAttribute{t("message"), t("\"Cat and dog people cannot share a table\"")}),
              msg->attributes.end());
    // both assumptions stay selected in the Unsat view
    auto const *dd = find(tree, t("seat_dd((1,2))"));
    EXPECT_NE(std::find(dd->attributes.begin(), dd->attributes.end(), UIAttribute{t("selected"), t("torsten")}),
              dd->attributes.end());
}

TEST(SessionConcurrency, SerializedWriters) {
    Session session(seating_config());
    std::atomic<int> ok{0};
    std::vector<std::thread> threads;
    std::vector<std::string> people{"alexander", "susana", "torsten"};
    std::mutex seen_mutex;
    std::vector<std::uint64_t> seen;
    for (int i = 0; i < 3; ++i) {
        threads.emplace_back([&, i] {
            auto atom = "assign(" + people[static_cast<std::size_t>(i)] + ",(2,3))";
            for (int k = 0; k < 2; ++k) {
                auto op = k == 0 ? "add_assumption(" + atom + ",false)" : "remove_assumption(" + atom + ")";
                if (session.post_operation(op_body(op)).status == 200) ++ok;
                EXPECT_EQ(session.get_ui().status, 200);
                std::lock_guard lock(seen_mutex);
                seen.push_back(session.revision());
            }
        });
    }
    for (auto &th : threads) th.join();
    EXPECT_EQ(ok.load(), 6);
    EXPECT_EQ(session.revision(), 6u);
    for (auto r : seen) EXPECT_LE(r, 6u);
    auto a = session.get_ui();
    EXPECT_EQ(a.body, session.get_ui().body);
}

// ---------------------------------------------------------------------------
// HTTP

class HttpFixture : public ::testing::Test {
protected:
    void SetUp() override {
        port = server.bind("127.0.0.1", 0);
        ASSERT_GT(port, 0);
        thread = std::thread([this] { server.listen(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(120, 0);
    }
    void TearDown() override {
        server.stop();
        thread.join();
    }

    Session session{seating_config()};
    HttpServer server{session};
    int port = 0;
    std::thread thread;
    std::unique_ptr<httplib::Client> client;
};

TEST_F(HttpFixture, Endpoints) {
    auto ui = client->Get("/ui");
    ASSERT_TRUE(ui);
    EXPECT_EQ(ui->status, 200);
    EXPECT_EQ(ui->get_header_value("Content-Type"), "application/json");
    EXPECT_EQ(ui->get_header_value("Access-Control-Allow-Origin"), "*");
    auto again = client->Get("/ui");
    EXPECT_EQ(again->body, ui->body);

    auto post = client->Post("/operation", op_body("add_assumption(assign(alexander,(1,1)),true)"), "application/json");
    ASSERT_TRUE(post);
    EXPECT_EQ(post->status, 200);
    EXPECT_NE(post->body, ui->body);

    auto bad = client->Post("/operation", op_body("add_assumption(assign(alexander,(1,1)),false)"), "application/json");
    EXPECT_EQ(bad->status, 409);
    EXPECT_EQ(json::parse(bad->body).at("error"), "ConflictingTruth");

    auto health = client->Get("/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(json::parse(health->body).at("revision"), 1);

    auto options = client->Options("/operation");
    ASSERT_TRUE(options);
    EXPECT_EQ(options->status, 204);
    EXPECT_FALSE(options->get_header_value("Access-Control-Allow-Methods").empty());

    EXPECT_EQ(client->Get("/nothing")->status, 404);
}

TEST(HttpServerBind, Conflict) {
    Session session(seating_config());
    HttpServer a(session);
    int port = a.bind("127.0.0.1", 0);
    HttpServer b(session);
    EXPECT_THROW(b.bind("127.0.0.1", port), IoError);
}

// ---------------------------------------------------------------------------
// the aspui executable

namespace {

struct Child {
    pid_t pid = -1;
    int out = -1;
};

Child spawn(std::vector<std::string> args, bool merge_stderr) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe");
    pid_t pid = fork();
    if (pid == 0) {
        dup2(fds[1], STDOUT_FILENO);
        if (merge_stderr) dup2(fds[1], STDERR_FILENO);
        close(fds[0]);
        close(fds[1]);
        std::vector<char *> argv;
        args.insert(args.begin(), ASPUI_CLI_PATH);
        for (auto &a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        execv(ASPUI_CLI_PATH, argv.data());
        _exit(127);
    }
    close(fds[1]);
    return {pid, fds[0]};
}

std::string read_line(int fd) {
    std::string line;
    char c;
    while (read(fd, &c, 1) == 1 && c != '\n') line += c;
    return line;
}

std::string read_all(int fd) {
    std::string out;
    char buf[4096];
    ssize_t n;
    while ((n = read(fd, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    return out;
}

int wait_exit(pid_t pid) {
    int status = 0;
    waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::pair<int, std::string> run(std::vector<std::string> args) {
    auto c = spawn(std::move(args), true);
    auto out = read_all(c.out);
    close(c.out);
    return {wait_exit(c.pid), out};
}

} // namespace

TEST(Executable, HelpVersionAndUsage) {
    auto [code, out] = run({"--help"});
    EXPECT_EQ(code, 0);
    EXPECT_NE(out.find("server"), std::string::npos);
    std::tie(code, out) = run({"--version"});
    EXPECT_EQ(code, 0);
    std::tie(code, out) = run({"server", "--domain-files", "x.lp"});
    EXPECT_EQ(code, 2);
    EXPECT_NE(out.find("--ui-files"), std::string::npos);
    std::tie(code, out) = run({"server", "--domain-files", "/nonexistent.lp", "--ui-files", "/nonexistent-ui.lp",
                               "--solver", ASPUI_TEST_SOLVER});
    EXPECT_EQ(code, 1);
    std::tie(code, out) = run({"client", "--url", "http://127.0.0.1:1"});
    EXPECT_EQ(code, 1);
}

TEST(Executable, ClientServerRoundTrip) {
    auto server = spawn({"client-server", "--domain-files", ts::seating("ins.lp").string(),
                         ts::seating("enc.lp").string(), "--ui-files", ts::seating("ui-tables.lp").string(),
                         ts::seating("ui-menu.lp").string(), "--port", "0", "--solver", ASPUI_TEST_SOLVER,
                         "--log-level", "warning"},
                        false);
    auto line = read_line(server.out);
    auto pos = line.find("--url ");
    ASSERT_NE(pos, std::string::npos) << line;
    auto url = line.substr(pos + 6);

    auto [code, out] = run({"client", "--url", url});
    EXPECT_EQ(code, 0) << out;
    EXPECT_NE(out.find("window w"), std::string::npos) << out;
    EXPECT_NE(out.find("on click call next_solution"), std::string::npos) << out;

    std::tie(code, out) = run({"client", "--url", url, "--operation", "add_assumption(assign(alexander,(1,1)),true)",
                               "--json"});
    EXPECT_EQ(code, 0) << out;
    auto tree = parse_tree(out);
    auto const *dd = find(tree, t("seat_dd((1,2))"));
    ASSERT_NE(dd, nullptr);
    EXPECT_NE(std::find(dd->attributes.begin(), dd->attributes.end(), UIAttribute{t("selected"), t("susana")}),
              dd->attributes.end());

    std::tie(code, out) = run({"client", "--url", url, "--operation", "fly"});
    EXPECT_EQ(code, 1);
    EXPECT_NE(out.find("UnknownOperation"), std::string::npos) << out;

    kill(server.pid, SIGTERM);
    EXPECT_EQ(wait_exit(server.pid), 0);
    close(server.out);
}
