#include <aspui/snapshot.hpp>

namespace aspui {

namespace {

void emit(std::string &out, std::string_view pred, AtomSet const &atoms) {
    for (auto const &a : atoms) {
        out += pred;
        out += '(';
        out += render_term(a);
        out += ").\n";
    }
}

} // namespace

std::string snapshot_facts(DomainStateSnapshot const &snapshot) {
    std::string out;
    for (auto const &a : snapshot.model) {
        out += render_term(a);
        out += ".\n";
    }
    emit(out, "_all", snapshot.cautious);
    emit(out, "_any", snapshot.brave);
    for (auto const &[atom, truth] : snapshot.assumptions) {
        out += "_clinguin_assume(" + render_term(atom) + (truth ? ",true).\n" : ",false).\n");
    }
    if (snapshot.browsing) {
        out += "_clinguin_browsing.\n";
    }
    if (snapshot.status == SolveStatus::Unsat) {
        out += "_clinguin_unsat.\n";
    }
    if (!snapshot.mus.empty()) {
        emit(out, "_clinguin_mus", snapshot.mus.front());
    }
    out += snapshot.extra_facts;
    if (!out.empty() && out.back() != '\n') {
        out += '\n';
    }
    return out;
}

} // namespace aspui
