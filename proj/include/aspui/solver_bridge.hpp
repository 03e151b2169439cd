#pragma once

#include <aspui/term.hpp>

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aspui {

/// Ordered collection of ASP source parts, each tagged with an origin label
/// (usually a file path) so solver diagnostics can be mapped back.
class ProgramBundle {
public:
    struct Part {
        std::string label;
        std::string text;
    };

    ProgramBundle() = default;

    /// Throws std::invalid_argument when `label` is already present.
    void add(std::string label, std::string text);
    /// Reads a file into a new part labelled with its path. Throws FileNotFound.
    void add_file(std::filesystem::path const &path);

    std::vector<Part> const &parts() const noexcept { return parts_; }
    bool empty() const noexcept { return parts_.empty(); }

    /// Concatenation of all parts in declared order; every part ends in a newline.
    std::string text() const;

    /// Maps a 1-based line of `text()` to (label, local line). Lines past the
    /// last part yield an empty label.
    std::pair<std::string, int> locate(int line) const;

private:
    std::vector<Part> parts_;
};

struct Assumption {
    Term atom;
    bool truth = true;

    friend bool operator==(Assumption const &, Assumption const &) = default;
};

enum class ExternalValue { True, False, Release };

struct ExternalAssignment {
    Term atom;
    ExternalValue value = ExternalValue::False;
};

struct SolveMode {
    enum class Kind { Models, Cautious, Brave };
    Kind kind = Kind::Models;
    /// Number of models to enumerate in Models mode; 0 means all.
    int max_models = 1;

    static SolveMode models(int max) { return {Kind::Models, max}; }
    static SolveMode cautious() { return {Kind::Cautious, 0}; }
    static SolveMode brave() { return {Kind::Brave, 0}; }
};

struct SolveRequest {
    ProgramBundle program;
    std::vector<Assumption> assumptions;
    SolveMode mode;
    std::vector<ExternalAssignment> externals;
};

/// One query against a shared program; see SolverBridge::solve_all.
struct Query {
    std::vector<Assumption> assumptions;
    SolveMode mode;
};

enum class Severity { Info, Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string origin;
    int line = 0;
    int column = 0;
    std::string message;
};

std::string to_string(Diagnostic const &d);
std::string to_string(std::vector<Diagnostic> const &ds);

enum class SolveStatus { Sat, Unsat, Error };

struct SolveOutcome {
    SolveStatus status = SolveStatus::Error;
    /// Models mode: the enumerated models. Cautious/Brave: the consequence set.
    std::vector<AtomSet> models;
    /// Unsat only: a subset of the query's assumption atoms that is still unsatisfiable.
    AtomSet core;
    std::vector<Diagnostic> diagnostics;
};

enum class ScriptingMode {
    /// Use the embedded driver when the solver reports Lua support.
    Auto,
    Lua,
    /// Assumptions become integrity constraints; cores are the full assumption set.
    Plain,
};

struct SolverConfig {
    std::string executable = "clingo";
    std::chrono::milliseconds timeout{30000};
    ScriptingMode scripting = ScriptingMode::Auto;
    /// Extra command-line arguments passed on every invocation.
    std::vector<std::string> extra_args;
};

/// Runs an external clingo process per request and parses its JSON output.
///
/// In scripting mode the program is extended with a small Lua driver that
/// grounds once, assigns externals, and issues one solve call per query with
/// the solver's native assumption mechanism, so unsatisfiable cores can be read
/// back. Otherwise each query is a separate process and assumptions are added
/// as integrity constraints.
///
/// Thread-safe: concurrent calls each own their subprocess.
class SolverBridge {
public:
    explicit SolverBridge(SolverConfig config = {});

    SolverConfig const &config() const noexcept { return config_; }

    SolveOutcome solve(SolveRequest const &request) const;

    /// Answers several queries against the same program and externals, in one
    /// process when scripting is available.
    std::vector<SolveOutcome> solve_all(ProgramBundle const &program, std::span<ExternalAssignment const> externals,
                                        std::span<Query const> queries) const;

    /// Grounds without solving and returns the solver's messages.
    std::vector<Diagnostic> check_syntax(ProgramBundle const &program) const;

    /// Atoms declared `#external` after grounding.
    AtomSet declared_externals(ProgramBundle const &program) const;

    /// First line of `clingo --version`; throws SolverUnavailable.
    std::string solver_info() const;

    /// Whether queries use native assumptions (see ScriptingMode).
    bool supports_scripting() const;

private:
    std::string resolve_executable() const;

    SolverConfig config_;
    struct Capabilities;
    std::shared_ptr<Capabilities> caps_;
};

/// Parses clingo's stderr text into diagnostics, mapping line numbers through
/// `program`. Lines starting with the driver marker are skipped.
std::vector<Diagnostic> parse_diagnostics(std::string const &text, ProgramBundle const &program);

} // namespace aspui
