#pragma once

#include <aspui/backend.hpp>
#include <aspui/snapshot.hpp>
#include <aspui/solver_bridge.hpp>
#include <aspui/term.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aspui {

/// The mutable domain session: assumptions, externals, added atoms and the
/// browsing cursor over one set of domain files.
///
/// Not thread-safe; callers serialize access (single writer).
class DomainControl {
public:
    /// Loads `files` through the backend, checks that they ground, and
    /// computes the first snapshot. Throws InvalidConfig on an empty list,
    /// FileNotFound, or GroundingError naming the offending file.
    DomainControl(std::vector<std::filesystem::path> files, Backend &backend, SolverBridge const &bridge);

    /// Throws ConflictingTruth if `atom` is assumed with the opposite truth.
    void add_assumption(Term const &atom, bool truth);
    void remove_assumption(Term const &atom);
    void clear_assumptions();
    /// Throws UnknownExternal unless `atom` is declared `#external`.
    void set_external(Term const &atom, ExternalValue value);
    void add_atom(Term const &atom);
    void remove_atom(Term const &atom);
    /// Focuses the next stable model, wrapping after the last one. Throws
    /// NoSolution when the current state is unsatisfiable.
    void next_solution();
    void restart();

    /// Runs one server operation, e.g. `add_assumption(a,true)`. Throws
    /// UnknownOperation or InvalidOperation.
    void execute(Term const &operation);

    /// Added atoms as facts followed by assumptions as comments, each sorted.
    std::string export_instance() const;
    /// Writes `export_instance()` to `destination`; throws IoError.
    void export_instance(std::filesystem::path const &destination) const;

    /// Snapshot of the current state; recomputed only after a mutation.
    std::shared_ptr<DomainStateSnapshot const> snapshot();

    /// Domain files plus added atoms, as passed to the solver.
    ProgramBundle program() const;
    std::vector<Assumption> active_assumptions() const;

    std::uint64_t revision() const noexcept { return revision_; }
    std::map<Term, bool> const &assumptions() const noexcept { return assumptions_; }
    std::map<Term, ExternalValue> const &externals() const noexcept { return externals_; }
    AtomSet const &added_atoms() const noexcept { return added_atoms_; }
    bool browsing() const noexcept { return browsing_; }
    Backend &backend() noexcept { return backend_; }

private:
    void mutate();
    std::shared_ptr<DomainStateSnapshot const> compute_snapshot();

    Backend &backend_;
    SolverBridge const &bridge_;
    ProgramBundle files_;
    std::optional<AtomSet> declared_externals_;

    std::map<Term, bool> assumptions_;
    std::map<Term, ExternalValue> externals_;
    AtomSet added_atoms_;
    bool browsing_ = false;
    std::size_t cursor_ = 0;

    std::uint64_t revision_ = 0;
    std::shared_ptr<DomainStateSnapshot const> cached_;
    std::shared_ptr<DomainStateSnapshot const> last_sat_;
};

} // namespace aspui
