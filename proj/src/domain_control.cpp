#include <aspui/domain_control.hpp>

#include <aspui/errors.hpp>
#include <aspui/log.hpp>

#include <fstream>
#include <sstream>

namespace aspui {

namespace {

bool truth_argument(Term const &t, std::string const &op) {
    if (t.is_constant() && t.name() == "true") return true;
    if (t.is_constant() && t.name() == "false") return false;
    throw InvalidOperation(op + ": expected true or false but got " + render_term(t));
}

ExternalValue external_argument(Term const &t) {
    if (t.is_constant()) {
        if (t.name() == "true") return ExternalValue::True;
        if (t.name() == "false") return ExternalValue::False;
        if (t.name() == "release") return ExternalValue::Release;
    }
    throw InvalidOperation("set_external: expected true, false or release but got " + render_term(t));
}

void expect_arity(Term const &op, std::size_t lo, std::size_t hi) {
    if (op.arity() < lo || op.arity() > hi) {
        std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi);
        throw InvalidOperation(op.name() + " takes " + want + " argument(s) but got " + std::to_string(op.arity()));
    }
}

std::string read_file(std::filesystem::path const &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileNotFound("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

DomainControl::DomainControl(std::vector<std::filesystem::path> files, Backend &backend, SolverBridge const &bridge)
: backend_(backend)
, bridge_(bridge) {
    if (files.empty()) {
        throw InvalidConfig("no domain files given");
    }
    for (auto const &path : files) {
        if (!std::filesystem::is_regular_file(path)) {
            throw FileNotFound("domain file not found: " + path.string());
        }
        try {
            files_.add(path.string(), backend_.load_file(path, read_file(path)));
        } catch (std::invalid_argument const &) {
            throw InvalidConfig("domain file given twice: " + path.string());
        } catch (TransformError const &e) {
            throw TransformError(path.string() + ": " + e.what());
        }
    }
    std::string errors;
    for (auto const &d : bridge_.check_syntax(files_)) {
        if (d.severity == Severity::Error) {
            errors += (errors.empty() ? "" : "\n") + to_string(d);
        } else {
            log::info(to_string(d));
        }
    }
    if (!errors.empty()) {
        throw GroundingError(errors);
    }
    backend_.on_ground(files_);
    snapshot();
}

void DomainControl::mutate() {
    ++revision_;
    browsing_ = false;
    cursor_ = 0;
    cached_.reset();
}

void DomainControl::add_assumption(Term const &atom, bool truth) {
    auto it = assumptions_.find(atom);
    if (it != assumptions_.end() && it->second != truth) {
        throw ConflictingTruth(render_term(atom) + " is already assumed " + (it->second ? "true" : "false"));
    }
    assumptions_[atom] = truth;
    mutate();
}

void DomainControl::remove_assumption(Term const &atom) {
    assumptions_.erase(atom);
    mutate();
}

void DomainControl::clear_assumptions() {
    assumptions_.clear();
    mutate();
}

void DomainControl::set_external(Term const &atom, ExternalValue value) {
    if (!declared_externals_) {
        declared_externals_ = bridge_.declared_externals(files_);
    }
    if (!declared_externals_->contains(atom)) {
        throw UnknownExternal(render_term(atom) + " is not declared #external");
    }
    externals_[atom] = value;
    mutate();
}

void DomainControl::add_atom(Term const &atom) {
    added_atoms_.insert(atom);
    mutate();
}

void DomainControl::remove_atom(Term const &atom) {
    added_atoms_.erase(atom);
    mutate();
}

void DomainControl::next_solution() {
    if (snapshot()->status != SolveStatus::Sat) {
        throw NoSolution("the current state has no stable model");
    }
    std::size_t next = browsing_ ? cursor_ + 1 : 0;
    ++revision_;
    cached_.reset();
    browsing_ = true;
    cursor_ = next;
}

void DomainControl::restart() {
    assumptions_.clear();
    externals_.clear();
    added_atoms_.clear();
    last_sat_.reset();
    mutate();
}

void DomainControl::execute(Term const &op) {
    if (!op.is_constant() && !op.is_function()) {
        throw InvalidOperation("not an operation: " + render_term(op));
    }
    auto const &name = op.name();
    if (!backend_.operations().contains(name)) {
        throw UnknownOperation("unknown operation '" + name + "'");
    }
    auto args = op.args();
    if (name == "add_assumption") {
        expect_arity(op, 1, 2);
        add_assumption(args[0], args.size() < 2 || truth_argument(args[1], name));
    } else if (name == "remove_assumption") {
        expect_arity(op, 1, 1);
        remove_assumption(args[0]);
    } else if (name == "clear_assumptions") {
        expect_arity(op, 0, 0);
        clear_assumptions();
    } else if (name == "set_external") {
        expect_arity(op, 2, 2);
        set_external(args[0], external_argument(args[1]));
    } else if (name == "add_atom") {
        expect_arity(op, 1, 1);
        add_atom(args[0]);
    } else if (name == "remove_atom") {
        expect_arity(op, 1, 1);
        remove_atom(args[0]);
    } else if (name == "next_solution") {
        // an optional enumeration hint is accepted and ignored
        expect_arity(op, 0, 1);
        next_solution();
    } else if (name == "restart") {
        expect_arity(op, 0, 0);
        restart();
    } else {
        throw UnknownOperation("operation '" + name + "' is registered but has no handler");
    }
}

std::string DomainControl::export_instance() const {
    std::string out;
    for (auto const &a : added_atoms_) {
        out += render_term(a) + ".\n";
    }
    for (auto const &[a, truth] : assumptions_) {
        out += "% _clinguin_assume(" + render_term(a) + (truth ? ",true).\n" : ",false).\n");
    }
    return out;
}

void DomainControl::export_instance(std::filesystem::path const &destination) const {
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + destination.string());
    }
    out << export_instance();
    if (!out.flush()) {
        throw IoError("error writing " + destination.string());
    }
}

ProgramBundle DomainControl::program() const {
    ProgramBundle bundle = files_;
    if (!added_atoms_.empty()) {
        std::string facts;
        for (auto const &a : added_atoms_) {
            facts += render_term(a) + ".\n";
        }
        bundle.add("<added-atoms>", std::move(facts));
    }
    return bundle;
}

std::vector<Assumption> DomainControl::active_assumptions() const { return backend_.assumption_list(assumptions_); }

std::shared_ptr<DomainStateSnapshot const> DomainControl::snapshot() {
    if (!cached_) {
        cached_ = compute_snapshot();
    }
    return cached_;
}

std::shared_ptr<DomainStateSnapshot const> DomainControl::compute_snapshot() {
    auto program = this->program();
    auto active = active_assumptions();
    std::vector<ExternalAssignment> externals;
    for (auto const &[atom, value] : externals_) {
        externals.push_back({atom, value});
    }
    int wanted = browsing_ ? static_cast<int>(cursor_) + 1 : 1;
    std::vector<Query> queries{{active, SolveMode::models(wanted)},
                               {active, SolveMode::cautious()},
                               {active, SolveMode::brave()}};
    auto outcomes = bridge_.solve_all(program, externals, queries);
    for (auto const &o : outcomes) {
        if (o.status == SolveStatus::Error) {
            throw SolveFailed("domain solve failed: " + to_string(o.diagnostics));
        }
    }

    auto snap = std::make_shared<DomainStateSnapshot>();
    snap->revision = revision_;
    snap->assumptions = assumptions_;
    snap->browsing = browsing_;
    AtomSet solver_core;
    if (outcomes[0].status == SolveStatus::Sat) {
        auto const &models = outcomes[0].models;
        if (browsing_) {
            cursor_ %= models.size();
        }
        snap->status = SolveStatus::Sat;
        snap->model = models[browsing_ ? cursor_ : 0];
        snap->cautious = outcomes[1].models.empty() ? AtomSet{} : outcomes[1].models.front();
        snap->brave = outcomes[2].models.empty() ? AtomSet{} : outcomes[2].models.front();
    } else {
        snap->status = SolveStatus::Unsat;
        solver_core = outcomes[0].core;
        if (last_sat_) {
            snap->model = last_sat_->model;
            snap->cautious = last_sat_->cautious;
            snap->brave = last_sat_->brave;
        }
    }

    SnapshotContext ctx{program, externals, active, bridge_, solver_core, *snap};
    for (auto const &constructor : backend_.snapshot_constructors()) {
        snap->extra_facts += constructor(ctx);
    }
    if (snap->status == SolveStatus::Sat) {
        last_sat_ = snap;
    }
    return snap;
}

} // namespace aspui
