#include <aspui/solver_bridge.hpp>

#include <aspui/errors.hpp>
#include <aspui/subprocess.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <system_error>

namespace aspui {

namespace {

constexpr std::string_view driver_marker = "@@aspui ";

// clasp exit codes signalling a failed run
bool is_error_exit(int code) { return code == 33 || code == 65 || code == 128 || code == 127; }

std::string lua_quote(std::string const &text) {
    std::string eq;
    for (;;) {
        std::string close = "]" + eq + "]";
        if ((text + close).find(close) == text.size()) {
            return "[" + eq + "[" + text + close;
        }
        eq += '=';
    }
}

char const *mode_name(SolveMode::Kind kind) {
    switch (kind) {
        case SolveMode::Kind::Models: return "auto";
        case SolveMode::Kind::Cautious: return "cautious";
        case SolveMode::Kind::Brave: return "brave";
    }
    return "auto";
}

char const *external_name(ExternalValue v) {
    switch (v) {
        case ExternalValue::True: return "true";
        case ExternalValue::False: return "false";
        case ExternalValue::Release: return "release";
    }
    return "false";
}

constexpr char const *driver_main = R"LUA(
function main(prg)
  prg:ground({{"base", {}}})
  local err = io.stderr
  if aspui_list_externals then
    for a in prg.symbolic_atoms:iter() do
      if a.is_external then err:write("@@aspui external ", tostring(a.symbol), "\n") end
    end
  end
  for i, e in ipairs(aspui_externals) do
    local sym = clingo.parse_term(e[1])
    local sa = prg.symbolic_atoms:lookup(sym)
    if sa == nil or not sa.is_external then
      err:write("@@aspui unknown-external ", i, "\n")
      return
    elseif e[2] == "release" then
      prg:release_external(sym)
    else
      prg:assign_external(sym, e[2] == "true")
    end
  end
  local fresh = nil
  for i, q in ipairs(aspui_queries) do
    prg.configuration.solve.enum_mode = q.mode
    prg.configuration.solve.models = q.models
    local lits, owner = {}, {}
    for j, a in ipairs(q.assumptions) do
      local sa = prg.symbolic_atoms:lookup(clingo.parse_term(a[1]))
      local lit = nil
      if sa ~= nil and sa.literal ~= 0 then
        if a[2] then lit = sa.literal else lit = -sa.literal end
      elseif a[2] then
        -- an atom without definition, or one simplified away (literal 0), is
        -- false; a fresh undefined atom stands in for it
        if fresh == nil then
          local b = prg:backend()
          fresh = b:add_atom()
          b:close()
        end
        lit = fresh
      end
      if lit ~= nil then
        lits[#lits + 1] = lit
        if owner[lit] == nil then owner[lit] = j end
      end
    end
    -- core() traps once the program itself is conflicting; the empty core
    -- is the right answer then
    local conflicting = prg.is_conflicting
    local h = prg:solve{assumptions = lits, yield = true}
    for _ in h:iter() do end
    local r = h:get()
    local status, core = "unknown", {}
    if r.unsatisfiable then
      status = "unsat"
      if not conflicting and not prg.is_conflicting then
        for _, l in ipairs(h:core() or {}) do
          local o = owner[math.tointeger(l)]
          if o ~= nil then core[#core + 1] = tostring(o) end
        end
      end
    elseif r.satisfiable then
      status = "sat"
    end
    h:close()
    err:write("@@aspui result ", i, " ", status, " ", table.concat(core, " "), "\n")
  end
end
)LUA";

std::string make_driver(std::span<ExternalAssignment const> externals, std::span<Query const> queries,
                        bool list_externals) {
    std::ostringstream out;
    out << "#script (lua)\n";
    out << "aspui_list_externals = " << (list_externals ? "true" : "false") << "\n";
    out << "aspui_externals = {\n";
    for (auto const &e : externals) {
        out << "  {" << lua_quote(render_term(e.atom)) << ", \"" << external_name(e.value) << "\"},\n";
    }
    out << "}\naspui_queries = {\n";
    for (auto const &q : queries) {
        int models = q.mode.kind == SolveMode::Kind::Models ? q.mode.max_models : 0;
        out << "  {mode = \"" << mode_name(q.mode.kind) << "\", models = \"" << models << "\", assumptions = {";
        for (auto const &a : q.assumptions) {
            out << "{" << lua_quote(render_term(a.atom)) << ", " << (a.truth ? "true" : "false") << "}, ";
        }
        out << "}},\n";
    }
    out << "}\n" << driver_main << "#end.\n";
    return out.str();
}

void validate_assumptions(std::span<Assumption const> assumptions) {
    std::map<Term, bool> seen;
    for (auto const &a : assumptions) {
        auto [it, inserted] = seen.emplace(a.atom, a.truth);
        if (!inserted && it->second != a.truth) {
            throw std::invalid_argument("assumption with both truth values: " + render_term(a.atom));
        }
    }
}

AtomSet parse_atoms(nlohmann::json const &values) {
    AtomSet atoms;
    for (auto const &v : values) {
        if (!v.is_string()) {
            throw ProtocolError("witness value is not a string");
        }
        try {
            atoms.insert(parse_term(v.get<std::string>()));
        } catch (SyntaxError const &e) {
            throw ProtocolError("cannot parse atom '" + v.get<std::string>() + "': " + e.what());
        }
    }
    return atoms;
}

nlohmann::json parse_json(std::string const &text) {
    try {
        return nlohmann::json::parse(text);
    } catch (nlohmann::json::exception const &e) {
        throw ProtocolError(std::string("unparseable solver output: ") + e.what());
    }
}

/// Witnesses of one call; consequence modes keep only the final estimate.
std::vector<AtomSet> call_models(nlohmann::json const &call, SolveMode::Kind kind) {
    std::vector<AtomSet> models;
    auto it = call.find("Witnesses");
    if (it == call.end()) {
        return models;
    }
    if (!it->is_array()) {
        throw ProtocolError("Witnesses is not an array");
    }
    for (auto const &w : *it) {
        models.push_back(parse_atoms(w.value("Value", nlohmann::json::array())));
    }
    if (kind != SolveMode::Kind::Models && !models.empty()) {
        AtomSet last = std::move(models.back());
        models.clear();
        models.push_back(std::move(last));
    }
    return models;
}

std::vector<std::string> split_ws(std::string const &text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string w; in >> w;) {
        out.push_back(w);
    }
    return out;
}

std::string stderr_without_markers(std::string const &err) {
    std::istringstream in(err);
    std::string out;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind(driver_marker, 0) != 0) {
            out += line;
            out += '\n';
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// ProgramBundle

void ProgramBundle::add(std::string label, std::string text) {
    for (auto const &p : parts_) {
        if (p.label == label) {
            throw std::invalid_argument("duplicate program part: " + label);
        }
    }
    parts_.push_back({std::move(label), std::move(text)});
}

void ProgramBundle::add_file(std::filesystem::path const &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileNotFound("cannot read file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    add(path.string(), buf.str());
}

std::string ProgramBundle::text() const {
    std::string out;
    for (auto const &p : parts_) {
        out += p.text;
        if (p.text.empty() || p.text.back() != '\n') {
            out += '\n';
        }
    }
    return out;
}

std::pair<std::string, int> ProgramBundle::locate(int line) const {
    int start = 1;
    for (auto const &p : parts_) {
        int lines = static_cast<int>(std::count(p.text.begin(), p.text.end(), '\n'));
        if (p.text.empty() || p.text.back() != '\n') {
            ++lines;
        }
        if (line < start + lines) {
            return {p.label, line - start + 1};
        }
        start += lines;
    }
    return {std::string(), line - start + 1};
}

// ---------------------------------------------------------------------------
// Diagnostics

std::string to_string(Diagnostic const &d) {
    std::string out;
    if (!d.origin.empty()) {
        out += d.origin + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
    }
    switch (d.severity) {
        case Severity::Info: out += "info: "; break;
        case Severity::Warning: out += "warning: "; break;
        case Severity::Error: out += "error: "; break;
    }
    return out + d.message;
}

std::string to_string(std::vector<Diagnostic> const &ds) {
    std::string out;
    for (auto const &d : ds) {
        if (!out.empty()) {
            out += '\n';
        }
        out += to_string(d);
    }
    return out;
}

std::vector<Diagnostic> parse_diagnostics(std::string const &text, ProgramBundle const &program) {
    static std::regex const located(R"(^(-|<stdin>):(\d+):(\d+)(?:-(?:\d+:)?\d+)?: (error|warning|info): (.*)$)");
    static std::regex const global(R"(^\*\*\* (ERROR|Info|Warn)\s*: (.*)$)");
    std::vector<Diagnostic> out;
    std::istringstream in(text);
    bool continuing = false;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continuing = false;
            continue;
        }
        if (line.rfind(driver_marker, 0) == 0) {
            continue;
        }
        std::smatch m;
        if (std::regex_match(line, m, located)) {
            Diagnostic d;
            auto [label, local] = program.locate(std::stoi(m[2]));
            d.origin = label.empty() ? "<driver>" : label;
            d.line = local;
            d.column = std::stoi(m[3]);
            d.severity = m[4] == "error" ? Severity::Error : m[4] == "warning" ? Severity::Warning : Severity::Info;
            d.message = m[5];
            // a syntax error at the very start of a part or of the driver is
            // almost always an unterminated statement at the end of the part before
            if (d.column == 1 && (local == 1 || label.empty()) && d.message.rfind("syntax error", 0) == 0) {
                auto const &parts = program.parts();
                auto it = std::find_if(parts.begin(), parts.end(), [&](auto const &p) { return p.label == label; });
                if (it != parts.begin() && !parts.empty()) {
                    auto const &prev = label.empty() ? parts.back() : *std::prev(it);
                    d.origin = prev.label;
                    d.line = static_cast<int>(std::count(prev.text.begin(), prev.text.end(), '\n')) +
                             (prev.text.empty() || prev.text.back() != '\n' ? 1 : 0);
                    d.message += " (unterminated statement?)";
                }
            }
            out.push_back(std::move(d));
            continuing = true;
        } else if (std::regex_match(line, m, global)) {
            bool located_error = std::any_of(out.begin(), out.end(), [](Diagnostic const &x) {
                return x.severity == Severity::Error && !x.origin.empty();
            });
            // summary lines repeat what the located errors already say
            if (located_error && m[1] == "ERROR") {
                continuing = false;
                continue;
            }
            Diagnostic d;
            d.severity = m[1] == "ERROR" ? Severity::Error : m[1] == "Warn" ? Severity::Warning : Severity::Info;
            d.message = m[2];
            out.push_back(std::move(d));
            continuing = true;
        } else if (continuing && !out.empty()) {
            out.back().message += "\n" + line;
        } else {
            out.push_back({Severity::Info, {}, 0, 0, line});
            continuing = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SolverBridge

struct SolverBridge::Capabilities {
    std::once_flag probed;
    bool lua = false;
};

SolverBridge::SolverBridge(SolverConfig config)
: config_(std::move(config))
, caps_(std::make_shared<Capabilities>()) {}

std::string SolverBridge::resolve_executable() const {
    auto path = find_executable(config_.executable);
    if (!path) {
        throw SolverUnavailable("solver executable not found: " + config_.executable);
    }
    return *path;
}

std::string SolverBridge::solver_info() const {
    auto exe = resolve_executable();
    ProcessResult r;
    try {
        r = run_process({exe, "--version"}, "", config_.timeout);
    } catch (std::system_error const &e) {
        throw SolverUnavailable(std::string("cannot start solver: ") + e.what());
    }
    if (r.exit_code != 0 || r.out.empty()) {
        throw SolverUnavailable("solver did not report a version: " + r.err);
    }
    return r.out.substr(0, r.out.find('\n'));
}

bool SolverBridge::supports_scripting() const {
    switch (config_.scripting) {
        case ScriptingMode::Lua: return true;
        case ScriptingMode::Plain: return false;
        case ScriptingMode::Auto: break;
    }
    std::call_once(caps_->probed, [this] {
        auto exe = resolve_executable();
        try {
            auto r = run_process({exe, "--version"}, "", config_.timeout);
            caps_->lua = r.exit_code == 0 && r.out.find("with Lua") != std::string::npos;
        } catch (std::system_error const &) {
            caps_->lua = false;
        }
    });
    return caps_->lua;
}

SolveOutcome SolverBridge::solve(SolveRequest const &request) const {
    Query q{request.assumptions, request.mode};
    return solve_all(request.program, request.externals, std::span<Query const>(&q, 1)).front();
}

namespace {

struct Invocation {
    ProcessResult result;
    std::vector<Diagnostic> diagnostics;
};

Invocation invoke(std::string const &exe, SolverConfig const &config, std::vector<std::string> args,
                  std::string const &text, ProgramBundle const &program) {
    std::vector<std::string> argv{exe};
    argv.insert(argv.end(), config.extra_args.begin(), config.extra_args.end());
    argv.insert(argv.end(), args.begin(), args.end());
    Invocation inv;
    try {
        inv.result = run_process(argv, text, config.timeout);
    } catch (std::system_error const &e) {
        throw SolverUnavailable(std::string("cannot start solver: ") + e.what());
    }
    inv.diagnostics = parse_diagnostics(inv.result.err, program);
    if (!inv.result.timed_out && is_error_exit(inv.result.exit_code)) {
        if (inv.result.exit_code == 127 && inv.diagnostics.empty()) {
            throw SolverUnavailable("solver could not run: " + stderr_without_markers(inv.result.err));
        }
        std::string detail = to_string(inv.diagnostics);
        throw GroundingError(detail.empty() ? "solver failed with exit code " + std::to_string(inv.result.exit_code)
                                            : detail);
    }
    return inv;
}

std::vector<SolveOutcome> timeout_outcomes(std::size_t n, SolverConfig const &config) {
    SolveOutcome o;
    o.status = SolveStatus::Error;
    o.diagnostics.push_back(
        {Severity::Error, {}, 0, 0, "solver timed out after " + std::to_string(config.timeout.count()) + " ms"});
    return std::vector<SolveOutcome>(n, o);
}

} // namespace

std::vector<SolveOutcome> SolverBridge::solve_all(ProgramBundle const &program,
                                                  std::span<ExternalAssignment const> externals,
                                                  std::span<Query const> queries) const {
    for (auto const &q : queries) {
        validate_assumptions(q.assumptions);
    }
    if (queries.empty()) {
        return {};
    }
    auto exe = resolve_executable();

    if (supports_scripting()) {
        std::string text = program.text() + make_driver(externals, queries, false);
        auto inv = invoke(exe, config_, {"--outf=2"}, text, program);
        if (inv.result.timed_out) {
            return timeout_outcomes(queries.size(), config_);
        }
        std::map<int, std::pair<std::string, std::vector<int>>> results;
        std::istringstream err(inv.result.err);
        for (std::string line; std::getline(err, line);) {
            if (line.rfind(driver_marker, 0) != 0) {
                continue;
            }
            auto words = split_ws(line.substr(driver_marker.size()));
            if (words.size() >= 2 && words[0] == "unknown-external") {
                auto const &atom = externals[static_cast<std::size_t>(std::stoi(words[1]) - 1)].atom;
                throw UnknownExternal("atom is not declared external: " + render_term(atom));
            }
            if (words.size() >= 3 && words[0] == "result") {
                std::vector<int> core;
                for (std::size_t k = 3; k < words.size(); ++k) {
                    core.push_back(std::stoi(words[k]));
                }
                results[std::stoi(words[1])] = {words[2], std::move(core)};
            }
        }
        auto json = parse_json(inv.result.out);
        auto calls = json.value("Call", nlohmann::json::array());
        if (results.size() != queries.size() || calls.size() != queries.size()) {
            throw ProtocolError("expected " + std::to_string(queries.size()) + " solve calls, solver reported " +
                                std::to_string(calls.size()));
        }
        std::vector<SolveOutcome> outcomes;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            auto const &[status, core] = results[static_cast<int>(i + 1)];
            SolveOutcome o;
            o.diagnostics = inv.diagnostics;
            if (status == "sat") {
                o.status = SolveStatus::Sat;
                o.models = call_models(calls[i], queries[i].mode.kind);
                if (o.models.empty()) {
                    throw ProtocolError("satisfiable call without witnesses");
                }
            } else if (status == "unsat") {
                o.status = SolveStatus::Unsat;
                for (int idx : core) {
                    if (idx < 1 || static_cast<std::size_t>(idx) > queries[i].assumptions.size()) {
                        throw ProtocolError("core index out of range");
                    }
                    o.core.insert(queries[i].assumptions[static_cast<std::size_t>(idx - 1)].atom);
                }
            } else {
                o.status = SolveStatus::Error;
                o.diagnostics.push_back({Severity::Error, {}, 0, 0, "solve call ended without a result"});
            }
            outcomes.push_back(std::move(o));
        }
        return outcomes;
    }

    // plain mode: externals and assumptions become program text
    if (!externals.empty()) {
        auto declared = declared_externals(program);
        for (auto const &e : externals) {
            if (!declared.contains(e.atom)) {
                throw UnknownExternal("atom is not declared external: " + render_term(e.atom));
            }
        }
    }
    std::string base = program.text();
    for (auto const &e : externals) {
        if (e.value == ExternalValue::True) {
            base += render_term(e.atom) + ".\n";
        }
    }
    std::vector<SolveOutcome> outcomes;
    for (auto const &q : queries) {
        std::string text = base;
        for (auto const &a : q.assumptions) {
            text += (a.truth ? ":- not " : ":- ") + render_term(a.atom) + ".\n";
        }
        std::vector<std::string> args{"--outf=2", std::string("--enum-mode=") + mode_name(q.mode.kind),
                                      std::to_string(q.mode.kind == SolveMode::Kind::Models ? q.mode.max_models : 0)};
        auto inv = invoke(exe, config_, args, text, program);
        if (inv.result.timed_out) {
            outcomes.push_back(timeout_outcomes(1, config_).front());
            continue;
        }
        auto json = parse_json(inv.result.out);
        std::string result = json.value("Result", "");
        SolveOutcome o;
        o.diagnostics = inv.diagnostics;
        if (result == "SATISFIABLE" || result == "OPTIMUM FOUND") {
            auto calls = json.value("Call", nlohmann::json::array());
            if (calls.empty()) {
                throw ProtocolError("satisfiable result without calls");
            }
            o.status = SolveStatus::Sat;
            o.models = call_models(calls.back(), q.mode.kind);
        } else if (result == "UNSATISFIABLE") {
            o.status = SolveStatus::Unsat;
            for (auto const &a : q.assumptions) {
                o.core.insert(a.atom);
            }
        } else if (result == "UNKNOWN") {
            o.status = SolveStatus::Error;
            o.diagnostics.push_back({Severity::Error, {}, 0, 0, "solver returned UNKNOWN"});
        } else {
            throw ProtocolError("unexpected Result field: '" + result + "'");
        }
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

std::vector<Diagnostic> SolverBridge::check_syntax(ProgramBundle const &program) const {
    auto exe = resolve_executable();
    std::vector<std::string> argv{exe, "--mode=gringo", "--text"};
    ProcessResult r;
    try {
        r = run_process(argv, program.text(), config_.timeout);
    } catch (std::system_error const &e) {
        throw SolverUnavailable(std::string("cannot start solver: ") + e.what());
    }
    if (r.exit_code == 127 && r.out.empty() && r.err.find("error") == std::string::npos) {
        throw SolverUnavailable("solver could not run: " + r.err);
    }
    auto diagnostics = parse_diagnostics(r.err, program);
    if (r.timed_out) {
        diagnostics.push_back({Severity::Error, {}, 0, 0, "grounding timed out"});
    }
    return diagnostics;
}

AtomSet SolverBridge::declared_externals(ProgramBundle const &program) const {
    auto exe = resolve_executable();
    AtomSet atoms;
    if (supports_scripting()) {
        auto inv = invoke(exe, config_, {"--outf=2"}, program.text() + make_driver({}, {}, true), program);
        if (inv.result.timed_out) {
            throw SolveFailed("solver timed out while grounding");
        }
        std::istringstream err(inv.result.err);
        for (std::string line; std::getline(err, line);) {
            std::string prefix = std::string(driver_marker) + "external ";
            if (line.rfind(prefix, 0) == 0) {
                atoms.insert(parse_term(line.substr(prefix.size())));
            }
        }
        return atoms;
    }
    auto inv = invoke(exe, config_, {"--mode=gringo", "--text"}, program.text(), program);
    if (inv.result.timed_out) {
        throw SolveFailed("solver timed out while grounding");
    }
    std::istringstream out(inv.result.out);
    for (std::string line; std::getline(out, line);) {
        if (line.rfind("#external ", 0) != 0) {
            continue;
        }
        std::string rest = line.substr(10);
        if (!rest.empty() && rest.back() == ']') {
            rest = rest.substr(0, rest.rfind(" ["));
        }
        while (!rest.empty() && (rest.back() == '.' || rest.back() == ' ')) {
            rest.pop_back();
        }
        try {
            atoms.insert(parse_term(rest));
        } catch (SyntaxError const &e) {
            throw ProtocolError("cannot parse external declaration '" + line + "': " + e.what());
        }
    }
    return atoms;
}

} // namespace aspui
