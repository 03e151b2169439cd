#pragma once

#include <aspui/solver_bridge.hpp>
#include <aspui/term.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aspui {

/// One consistent view of the domain, reified into facts for the UI encoding.
struct DomainStateSnapshot {
    /// Sat or Unsat; an Unsat snapshot carries the sets of the last Sat one.
    SolveStatus status = SolveStatus::Sat;
    AtomSet model;
    AtomSet cautious;
    AtomSet brave;
    std::map<Term, bool> assumptions;
    bool browsing = false;
    std::vector<AtomSet> mus;
    /// ASP text contributed by backend snapshot constructors.
    std::string extra_facts;
    std::uint64_t revision = 0;
};

/// Fact rendering of a snapshot, in this order: model atoms, `_all/1`,
/// `_any/1`, `_clinguin_assume/2`, `_clinguin_browsing`, `_clinguin_unsat`,
/// `_clinguin_mus/1` (first MUS only), then the backend text. Each group is
/// sorted by term order.
std::string snapshot_facts(DomainStateSnapshot const &snapshot);

} // namespace aspui
