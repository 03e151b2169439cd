#pragma once

#include <aspui/errors.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aspui {

/// A ground symbolic term: number, constant, quoted string, function or tuple.
///
/// Terms are immutable values. Ordering follows `compare_terms`: numbers before
/// constants before strings before compound terms (tuples and functions);
/// compound terms are ordered by name, then arity, then argument-wise.
class Term {
public:
    enum class Kind { Number, Constant, String, Function, Tuple };

    Term() : Term(number(0)) {}

    static Term number(std::int64_t value);
    /// Throws std::invalid_argument unless `name` is a valid identifier.
    static Term constant(std::string name);
    static Term string(std::string text);
    /// A function without arguments is the constant of the same name.
    static Term function(std::string name, std::vector<Term> args);
    static Term tuple(std::vector<Term> args);

    Kind kind() const noexcept { return kind_; }
    bool is_number() const noexcept { return kind_ == Kind::Number; }
    bool is_constant() const noexcept { return kind_ == Kind::Constant; }
    bool is_string() const noexcept { return kind_ == Kind::String; }
    bool is_function() const noexcept { return kind_ == Kind::Function; }
    bool is_tuple() const noexcept { return kind_ == Kind::Tuple; }

    std::int64_t number_value() const;
    /// Name of a constant or function, or the text of a string.
    std::string const &name() const noexcept { return text_; }
    std::span<Term const> args() const noexcept { return args_; }
    std::size_t arity() const noexcept { return args_.size(); }

    friend std::strong_ordering operator<=>(Term const &a, Term const &b);
    friend bool operator==(Term const &a, Term const &b) { return (a <=> b) == 0; }

private:
    Term(Kind kind, std::int64_t num, std::string text, std::vector<Term> args);

    Kind kind_;
    std::int64_t num_ = 0;
    std::string text_;
    std::vector<Term> args_;
};

/// Predicate signature `name/arity`.
struct Signature {
    std::string name;
    std::size_t arity = 0;

    friend auto operator<=>(Signature const &, Signature const &) = default;
};

using AtomSet = std::set<Term>;

/// True for identifiers of the form `_*[a-z][A-Za-z0-9_']*`.
bool is_identifier(std::string_view text);

Term parse_term(std::string_view text);
std::string render_term(Term const &term);
std::strong_ordering compare_terms(Term const &a, Term const &b);
bool match_signature(Term const &term, Signature const &sig);

/// Signature of a constant or function term; throws std::invalid_argument
/// for other kinds.
Signature signature_of(Term const &atom);

std::string to_string(Signature const &sig);

std::ostream &operator<<(std::ostream &out, Term const &term);

} // namespace aspui

template <>
struct std::hash<aspui::Term> {
    std::size_t operator()(aspui::Term const &t) const noexcept {
        return std::hash<std::string>{}(aspui::render_term(t));
    }
};
