#include <aspui/backend.hpp>

#include <aspui/errors.hpp>
#include <aspui/log.hpp>

#include <algorithm>
#include <charconv>

namespace aspui {

// ---------------------------------------------------------------------------
// Backend defaults

void Backend::configure(OptionValues const &values) {
    for (auto const &[flag, v] : values) {
        if (!v.empty()) {
            throw UsageError("option " + flag + " is not supported by backend " + name());
        }
    }
}

std::string Backend::load_file(std::filesystem::path const &, std::string text) { return text; }

void Backend::on_ground(ProgramBundle const &) {}

std::vector<Assumption> Backend::assumption_list(std::map<Term, bool> const &user) const {
    std::vector<Assumption> out;
    out.reserve(user.size());
    for (auto const &[atom, truth] : user) {
        out.push_back({atom, truth});
    }
    return out;
}

std::vector<SnapshotConstructor> Backend::snapshot_constructors() { return {}; }

std::set<std::string> Backend::operations() const {
    return {"add_assumption", "remove_assumption", "clear_assumptions", "set_external", "add_atom",
            "remove_atom",    "next_solution",     "restart"};
}

// ---------------------------------------------------------------------------
// ExplanationBackend

ExplanationBackend::ExplanationBackend(std::vector<Signature> signatures) : signatures_(std::move(signatures)) {}

std::vector<OptionSpec> ExplanationBackend::options() const {
    return {{"--assumption-signature", "Facts with this signature (name,arity) become true assumptions", true}};
}

void ExplanationBackend::configure(OptionValues const &values) {
    for (auto const &[flag, v] : values) {
        if (flag != "--assumption-signature") {
            if (!v.empty()) {
                throw UsageError("option " + flag + " is not supported by backend " + name());
            }
            continue;
        }
        for (auto const &text : v) {
            try {
                auto sig = parse_assumption_signature(text);
                if (std::find(signatures_.begin(), signatures_.end(), sig) == signatures_.end()) {
                    signatures_.push_back(std::move(sig));
                }
            } catch (InvalidSignature const &e) {
                throw UsageError(e.what());
            }
        }
    }
}

std::string ExplanationBackend::load_file(std::filesystem::path const &path, std::string text) {
    if (signatures_.empty()) {
        return text;
    }
    auto result = transform_facts_to_choices(text, signatures_);
    for (auto const &w : result.warnings) {
        log::warning(path.string() + ": " + w);
    }
    collected_.insert(result.collected.begin(), result.collected.end());
    return std::move(result.text);
}

std::vector<Assumption> ExplanationBackend::assumption_list(std::map<Term, bool> const &user) const {
    auto out = Backend::assumption_list(user);
    for (auto const &atom : collected_) {
        // a user assumption on the same atom takes precedence
        if (!user.contains(atom)) {
            out.push_back({atom, true});
        }
    }
    return out;
}

std::vector<SnapshotConstructor> ExplanationBackend::snapshot_constructors() {
    return {[this](SnapshotContext &ctx) { return explanation_snapshot_constructor(ctx); }};
}

std::string ExplanationBackend::explanation_snapshot_constructor(SnapshotContext &ctx) const {
    std::string const declaration = "#defined _clinguin_mus/1.\n";
    if (ctx.snapshot.status != SolveStatus::Unsat) {
        return declaration;
    }
    AtomSet candidates;
    for (auto const &a : ctx.active_assumptions) {
        candidates.insert(a.atom);
    }
    Probe probe = [&ctx](AtomSet const &subset) {
        Query q;
        q.mode = SolveMode::models(1);
        for (auto const &a : ctx.active_assumptions) {
            if (subset.contains(a.atom)) {
                q.assumptions.push_back(a);
            }
        }
        auto outcome = ctx.bridge.solve_all(ctx.program, ctx.externals, std::span<Query const>(&q, 1)).front();
        if (outcome.status == SolveStatus::Error) {
            throw ProbeError("probe failed: " + to_string(outcome.diagnostics));
        }
        ProbeResult r;
        r.unsat = outcome.status == SolveStatus::Unsat;
        if (r.unsat) {
            r.core = std::move(outcome.core);
        }
        return r;
    };
    AtomSet seed;
    std::set_intersection(ctx.solver_core.begin(), ctx.solver_core.end(), candidates.begin(), candidates.end(),
                          std::inserter(seed, seed.end()));
    ctx.snapshot.mus = {compute_mus(candidates, probe, seed).core};
    return declaration;
}

// ---------------------------------------------------------------------------
// registry

std::vector<std::string> registered_backends() { return {"ClingoBackend", "ExplanationBackend"}; }

std::unique_ptr<Backend> make_backend(std::string const &name) {
    if (name == "ClingoBackend") {
        return std::make_unique<ClingoBackend>();
    }
    if (name == "ExplanationBackend") {
        return std::make_unique<ExplanationBackend>();
    }
    std::string known;
    for (auto const &n : registered_backends()) {
        known += (known.empty() ? "" : ", ") + n;
    }
    throw InvalidConfig("unknown backend '" + name + "' (registered: " + known + ")");
}

namespace {
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
} // namespace

Signature parse_assumption_signature(std::string_view text) {
    auto comma = text.find(',');
    if (comma == std::string_view::npos) {
        throw InvalidSignature("expected name,arity but got '" + std::string(text) + "'");
    }
    auto name = text.substr(0, comma);
    auto arity = text.substr(comma + 1);
    auto trim = [](std::string_view &s) {
        while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
        while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    };
    trim(name);
    trim(arity);
    if (!is_identifier(name)) {
        throw InvalidSignature("invalid predicate name '" + std::string(name) + "'");
    }
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(arity.data(), arity.data() + arity.size(), value);
    if (arity.empty() || ec != std::errc{} || ptr != arity.data() + arity.size()) {
        throw InvalidSignature("invalid arity '" + std::string(arity) + "'");
    }
    return {std::string(name), value};
}

// ---------------------------------------------------------------------------
// fact transformation

namespace {

/// Statement text with comments removed, plus the source offset of each kept byte.
struct CleanStatement {
    std::string text;
    std::vector<std::size_t> offsets;
};

bool has_top_level_construct(std::string const &text) {
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == ':' || c == ';' || c == '|' || c == '{' || c == '}' || c == '@') {
            return true;
        }
    }
    return false;
}

std::string leading_identifier(std::string const &text) {
    std::size_t i = 0;
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' || text[i] == '\'')) ++i;
    return text.substr(start, i - start);
}

} // namespace

TransformResult transform_facts_to_choices(std::string_view source, std::span<Signature const> signatures) {
    TransformResult result;
    std::vector<std::pair<std::size_t, char>> insertions;
    CleanStatement stmt;

    auto finish_statement = [&]() {
        auto const &t = stmt.text;
        std::size_t first = 0;
        while (first < t.size() && is_space(t[first])) ++first;
        std::size_t last = t.size();
        while (last > first && is_space(t[last - 1])) --last;
        if (first == last || t[first] == '#') {
            return;
        }
        std::string body = t.substr(first, last - first);
        if (has_top_level_construct(body)) {
            if (body.find(":-") == std::string::npos && body.find(":~") == std::string::npos) {
                auto id = leading_identifier(body);
                for (auto const &sig : signatures) {
                    if (sig.name == id) {
                        result.warnings.push_back("statement '" + body + "' is not a plain fact and is left untouched");
                        break;
                    }
                }
            }
            return;
        }
        Term atom;
        try {
            atom = parse_term(body);
        } catch (SyntaxError const &) {
            return;
        }
        for (auto const &sig : signatures) {
            if (match_signature(atom, sig)) {
                insertions.emplace_back(stmt.offsets[first], '{');
                insertions.emplace_back(stmt.offsets[last - 1] + 1, '}');
                result.collected.insert(atom);
                return;
            }
        }
    };

    std::size_t i = 0;
    std::size_t n = source.size();
    while (i < n) {
        char c = source[i];
        if (c == '%') {
            if (i + 1 < n && source[i + 1] == '*') {
                auto end = source.find("*%", i + 2);
                if (end == std::string_view::npos) {
                    throw TransformError("unterminated block comment at offset " + std::to_string(i));
                }
                i = end + 2;
            } else {
                auto end = source.find('\n', i);
                i = end == std::string_view::npos ? n : end;
            }
            stmt.text += ' ';
            stmt.offsets.push_back(i == 0 ? 0 : i - 1);
            continue;
        }
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < n && source[j] != '"') {
                j += source[j] == '\\' ? 2 : 1;
            }
            if (j >= n) {
                throw TransformError("unterminated string at offset " + std::to_string(i));
            }
            for (std::size_t k = i; k <= j; ++k) {
                stmt.text += source[k];
                stmt.offsets.push_back(k);
            }
            i = j + 1;
            continue;
        }
        if (c == '#' && source.substr(i, 7) == "#script") {
            auto end = source.find("#end", i);
            auto dot = end == std::string_view::npos ? end : source.find('.', end);
            if (dot == std::string_view::npos) {
                throw TransformError("unterminated #script block at offset " + std::to_string(i));
            }
            stmt = {};
            i = dot + 1;
            continue;
        }
        if (c == '.') {
            bool range = (i + 1 < n && source[i + 1] == '.') || (i > 0 && source[i - 1] == '.');
            if (!range) {
                finish_statement();
                stmt = {};
                ++i;
                continue;
            }
        }
        stmt.text += c;
        stmt.offsets.push_back(i);
        ++i;
    }
    for (char c : stmt.text) {
        if (!is_space(c)) {
            throw TransformError("statement without terminating '.' at end of input");
        }
    }

    std::sort(insertions.begin(), insertions.end());
    result.text.reserve(source.size() + insertions.size());
    std::size_t pos = 0;
    for (auto const &[at, ch] : insertions) {
        result.text.append(source.substr(pos, at - pos));
        result.text += ch;
        pos = at;
    }
    result.text.append(source.substr(pos));
    return result;
}

// ---------------------------------------------------------------------------
// MUS extraction

MusResult compute_mus(AtomSet const &candidates, Probe const &probe, std::optional<AtomSet> seed) {
    auto call = [&probe](AtomSet const &subset) {
        try {
            return probe(subset);
        } catch (ProbeError const &) {
            throw;
        } catch (std::exception const &e) {
            throw ProbeError(e.what());
        }
    };
    auto narrow = [](AtomSet const &set, std::optional<AtomSet> const &core) {
        if (!core) {
            return set;
        }
        AtomSet out;
        std::set_intersection(set.begin(), set.end(), core->begin(), core->end(), std::inserter(out, out.end()));
        return out;
    };

    AtomSet current;
    if (seed) {
        if (!std::includes(candidates.begin(), candidates.end(), seed->begin(), seed->end())) {
            throw std::invalid_argument("MUS seed is not a subset of the candidates");
        }
        current = std::move(*seed);
    } else {
        auto r = call(candidates);
        if (!r.unsat) {
            throw NotUnsat("the candidate assumptions are satisfiable");
        }
        current = narrow(candidates, r.core);
    }

    std::vector<Term> order(current.begin(), current.end());
    for (auto const &atom : order) {
        if (!current.contains(atom)) {
            continue;
        }
        AtomSet test = current;
        test.erase(atom);
        auto r = call(test);
        if (r.unsat) {
            current = narrow(test, r.core);
        }
    }
    return {std::move(current), true};
}

} // namespace aspui
