#pragma once

#include <aspui/snapshot.hpp>
#include <aspui/solver_bridge.hpp>
#include <aspui/term.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace aspui {

/// A command-line option contributed by a backend, e.g. `--assumption-signature`.
struct OptionSpec {
    std::string flag;
    std::string description;
    bool repeatable = false;
};

/// Option values keyed by flag, in command-line order.
using OptionValues = std::map<std::string, std::vector<std::string>>;

/// What a snapshot constructor sees while a snapshot is being built.
struct SnapshotContext {
    ProgramBundle const &program;
    std::span<ExternalAssignment const> externals;
    /// User assumptions plus those injected by the backend.
    std::span<Assumption const> active_assumptions;
    SolverBridge const &bridge;
    /// Core reported by the solver for the focused solve (Unsat only).
    AtomSet const &solver_core;
    DomainStateSnapshot &snapshot;
};

using SnapshotConstructor = std::function<std::string(SnapshotContext &)>;

/// Customization surface of the server. Hooks are invoked from the session's
/// single-writer context only.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string name() const = 0;

    virtual std::vector<OptionSpec> options() const { return {}; }
    /// Applies parsed option values; throws UsageError for values it does not accept.
    virtual void configure(OptionValues const &values);

    /// Source text used for a domain file.
    virtual std::string load_file(std::filesystem::path const &path, std::string text);
    virtual void on_ground(ProgramBundle const &program);
    /// Assumptions passed to every domain solve.
    virtual std::vector<Assumption> assumption_list(std::map<Term, bool> const &user) const;
    virtual std::vector<SnapshotConstructor> snapshot_constructors();
    /// Names of the operations accepted by the server.
    virtual std::set<std::string> operations() const;
};

/// Plain solving: no transformation, user assumptions only.
class ClingoBackend : public Backend {
public:
    std::string name() const override { return "ClingoBackend"; }
};

/// Adds `_clinguin_mus/1` facts to Unsat snapshots. Facts matching the
/// configured signatures become choices and are assumed true, so the
/// constraints they guard show up in unsatisfiable cores.
class ExplanationBackend : public ClingoBackend {
public:
    ExplanationBackend() = default;
    explicit ExplanationBackend(std::vector<Signature> signatures);

    std::string name() const override { return "ExplanationBackend"; }
    std::vector<OptionSpec> options() const override;
    void configure(OptionValues const &values) override;
    std::string load_file(std::filesystem::path const &path, std::string text) override;
    std::vector<Assumption> assumption_list(std::map<Term, bool> const &user) const override;
    std::vector<SnapshotConstructor> snapshot_constructors() override;

    std::vector<Signature> const &signatures() const noexcept { return signatures_; }
    AtomSet const &collected() const noexcept { return collected_; }

    /// On Unsat fills `snapshot.mus` with one MUS over the active assumptions.
    /// Always returns the `#defined _clinguin_mus/1.` declaration.
    std::string explanation_snapshot_constructor(SnapshotContext &ctx) const;

private:
    std::vector<Signature> signatures_;
    AtomSet collected_;
};

/// Backend by registered name; throws InvalidConfig listing the known names.
std::unique_ptr<Backend> make_backend(std::string const &name);
std::vector<std::string> registered_backends();

/// Parses `name,arity`; throws InvalidSignature.
Signature parse_assumption_signature(std::string_view text);

struct TransformResult {
    std::string text;
    AtomSet collected;
    std::vector<std::string> warnings;
};

/// Rewrites every ground fact `p(t...).` whose signature is in `signatures`
/// into the choice `{p(t...)}.`, leaving all other bytes untouched. Throws
/// TransformError on unterminated strings, comments or statements.
TransformResult transform_facts_to_choices(std::string_view source, std::span<Signature const> signatures);

struct ProbeResult {
    bool unsat = false;
    /// Optional subset of the probed set that is still unsatisfiable.
    std::optional<AtomSet> core;
};

/// Decides satisfiability of the domain under the given subset of assumptions.
using Probe = std::function<ProbeResult(AtomSet const &subset)>;

struct MusResult {
    AtomSet core;
    bool minimal = true;
};

/// Deletion-based MUS extraction. Candidates are tried in term order; every
/// unsatisfiable probe narrows the working set to its reported core. When
/// `seed` is given it must be an unsatisfiable subset of `candidates` and the
/// initial probe is skipped. Throws NotUnsat when `candidates` is satisfiable;
/// probe exceptions propagate as ProbeError.
MusResult compute_mus(AtomSet const &candidates, Probe const &probe, std::optional<AtomSet> seed = std::nullopt);

} // namespace aspui
