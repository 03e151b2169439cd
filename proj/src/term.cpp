#include <aspui/term.hpp>

#include <charconv>
#include <limits>
#include <stdexcept>

namespace aspui {

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) {
    return is_lower(c) || (c >= 'A' && c <= 'Z') || is_digit(c) || c == '_' || c == '\'';
}

int kind_rank(Term::Kind kind) {
    switch (kind) {
        case Term::Kind::Number: return 0;
        case Term::Kind::Constant: return 1;
        case Term::Kind::String: return 2;
        case Term::Kind::Function:
        case Term::Kind::Tuple: return 3;
    }
    return 3;
}

std::strong_ordering compare_text(std::string const &a, std::string const &b) {
    int c = a.compare(b);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Term parse_complete() {
        skip_ws();
        if (at_end()) {
            throw SyntaxError(pos_, "term");
        }
        Term t = parse();
        skip_ws();
        if (!at_end()) {
            throw SyntaxError(pos_, "end of input");
        }
        return t;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    void expect(char c, char const *what) {
        skip_ws();
        if (peek() != c) {
            throw SyntaxError(pos_, what);
        }
        ++pos_;
    }

    Term parse() {
        skip_ws();
        char c = peek();
        if (c == '-' || is_digit(c)) {
            return parse_number();
        }
        if (c == '"') {
            return Term::string(parse_string());
        }
        if (c == '(') {
            return parse_parenthesized();
        }
        if (c == '_' || is_lower(c)) {
            std::string name = parse_identifier();
            skip_ws();
            if (peek() == '(') {
                ++pos_;
                skip_ws();
                if (peek() == ')') {
                    ++pos_;
                    return Term::constant(std::move(name));
                }
                std::vector<Term> args;
                for (;;) {
                    args.push_back(parse());
                    skip_ws();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    expect(')', "',' or ')'");
                    break;
                }
                return Term::function(std::move(name), std::move(args));
            }
            return Term::constant(std::move(name));
        }
        throw SyntaxError(pos_, "number, identifier, string or '('");
    }

    Term parse_number() {
        std::size_t start = pos_;
        bool negative = false;
        if (peek() == '-') {
            negative = true;
            ++pos_;
            skip_ws();
        }
        std::size_t digits = pos_;
        while (is_digit(peek())) {
            ++pos_;
        }
        if (digits == pos_) {
            throw SyntaxError(pos_, "digit");
        }
        std::uint64_t magnitude = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, magnitude);
        (void)ptr;
        std::uint64_t limit = negative ? std::uint64_t{1} << 63 : std::uint64_t{std::numeric_limits<std::int64_t>::max()};
        if (ec != std::errc{} || magnitude > limit) {
            throw SyntaxError(start, "integer in 64-bit range");
        }
        std::int64_t value = negative ? static_cast<std::int64_t>(0 - magnitude) : static_cast<std::int64_t>(magnitude);
        return Term::number(value);
    }

    std::string parse_string() {
        ++pos_;
        std::string out;
        for (;;) {
            if (at_end()) {
                throw SyntaxError(pos_, "closing '\"'");
            }
            char c = text_[pos_++];
            if (c == '"') {
                return out;
            }
            if (c == '\\') {
                if (at_end()) {
                    throw SyntaxError(pos_, "escape sequence");
                }
                char e = text_[pos_++];
                switch (e) {
                    case '\\': out += '\\'; break;
                    case '"': out += '"'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: throw SyntaxError(pos_ - 1, "one of \\\\, \\\", \\n, \\t");
                }
                continue;
            }
            out += c;
        }
    }

    Term parse_parenthesized() {
        ++pos_;
        skip_ws();
        if (peek() == ')') {
            ++pos_;
            return Term::tuple({});
        }
        std::vector<Term> args;
        bool trailing_comma = false;
        for (;;) {
            args.push_back(parse());
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                skip_ws();
                if (peek() == ')') {
                    ++pos_;
                    trailing_comma = true;
                    break;
                }
                continue;
            }
            expect(')', "',' or ')'");
            break;
        }
        if (args.size() == 1 && !trailing_comma) {
            return std::move(args.front());
        }
        return Term::tuple(std::move(args));
    }

    std::string parse_identifier() {
        std::size_t start = pos_;
        while (peek() == '_') {
            ++pos_;
        }
        if (!is_lower(peek())) {
            throw SyntaxError(pos_, "lowercase letter");
        }
        while (is_ident_char(peek())) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void render_into(std::string &out, Term const &t) {
    switch (t.kind()) {
        case Term::Kind::Number:
            out += std::to_string(t.number_value());
            return;
        case Term::Kind::Constant:
            out += t.name();
            return;
        case Term::Kind::String:
            out += '"';
            for (char c : t.name()) {
                switch (c) {
                    case '"': out += "\\\""; break;
                    case '\\': out += "\\\\"; break;
                    case '\n': out += "\\n"; break;
                    case '\t': out += "\\t"; break;
                    default: out += c;
                }
            }
            out += '"';
            return;
        case Term::Kind::Function:
        case Term::Kind::Tuple: {
            out += t.name();
            out += '(';
            bool first = true;
            for (auto const &arg : t.args()) {
                if (!first) {
                    out += ',';
                }
                first = false;
                render_into(out, arg);
            }
            if (t.is_tuple() && t.arity() == 1) {
                out += ',';
            }
            out += ')';
            return;
        }
    }
}

} // namespace

Term::Term(Kind kind, std::int64_t num, std::string text, std::vector<Term> args)
: kind_(kind)
, num_(num)
, text_(std::move(text))
, args_(std::move(args)) {}

Term Term::number(std::int64_t value) { return Term(Kind::Number, value, {}, {}); }

Term Term::constant(std::string name) {
    if (!is_identifier(name)) {
        throw std::invalid_argument("invalid identifier: " + name);
    }
    return Term(Kind::Constant, 0, std::move(name), {});
}

Term Term::string(std::string text) { return Term(Kind::String, 0, std::move(text), {}); }

Term Term::function(std::string name, std::vector<Term> args) {
    if (args.empty()) {
        return constant(std::move(name));
    }
    if (!is_identifier(name)) {
        throw std::invalid_argument("invalid identifier: " + name);
    }
    return Term(Kind::Function, 0, std::move(name), std::move(args));
}

Term Term::tuple(std::vector<Term> args) { return Term(Kind::Tuple, 0, {}, std::move(args)); }

std::int64_t Term::number_value() const {
    if (kind_ != Kind::Number) {
        throw std::logic_error("term is not a number");
    }
    return num_;
}

std::strong_ordering operator<=>(Term const &a, Term const &b) { return compare_terms(a, b); }

bool is_identifier(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && text[i] == '_') {
        ++i;
    }
    if (i >= text.size() || !is_lower(text[i])) {
        return false;
    }
    for (; i < text.size(); ++i) {
        if (!is_ident_char(text[i])) {
            return false;
        }
    }
    return true;
}

Term parse_term(std::string_view text) { return Parser(text).parse_complete(); }

std::string render_term(Term const &term) {
    std::string out;
    render_into(out, term);
    return out;
}

std::strong_ordering compare_terms(Term const &a, Term const &b) {
    int ra = kind_rank(a.kind());
    int rb = kind_rank(b.kind());
    if (ra != rb) {
        return ra <=> rb;
    }
    switch (a.kind()) {
        case Term::Kind::Number:
            return a.number_value() <=> b.number_value();
        case Term::Kind::Constant:
        case Term::Kind::String:
            return compare_text(a.name(), b.name());
        case Term::Kind::Function:
        case Term::Kind::Tuple: {
            // tuples carry the empty name and therefore sort before functions
            if (auto c = compare_text(a.name(), b.name()); c != 0) {
                return c;
            }
            if (auto c = a.arity() <=> b.arity(); c != 0) {
                return c;
            }
            for (std::size_t i = 0; i < a.arity(); ++i) {
                if (auto c = compare_terms(a.args()[i], b.args()[i]); c != 0) {
                    return c;
                }
            }
            return std::strong_ordering::equal;
        }
    }
    return std::strong_ordering::equal;
}

bool match_signature(Term const &term, Signature const &sig) {
    if (term.is_constant()) {
        return sig.arity == 0 && term.name() == sig.name;
    }
    return term.is_function() && term.name() == sig.name && term.arity() == sig.arity;
}

Signature signature_of(Term const &atom) {
    if (atom.is_constant()) {
        return {atom.name(), 0};
    }
    if (atom.is_function()) {
        return {atom.name(), atom.arity()};
    }
    throw std::invalid_argument("not an atom: " + render_term(atom));
}

std::string to_string(Signature const &sig) { return sig.name + "/" + std::to_string(sig.arity); }

std::ostream &operator<<(std::ostream &out, Term const &term) { return out << render_term(term); }

} // namespace aspui
