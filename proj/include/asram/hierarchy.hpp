#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "asram/diag.hpp"
#include "asram/value.hpp"
#include "asram/verdict.hpp"

namespace asram {

// Prenex formulas with a quantifier-free arithmetic body over nonnegative
// integers. Terms use {+, *, monus}; comparisons {=, <, <=}; connectives
// {AND, OR, NOT}. The body sees the declared variables and `inp`.
//
// Text form:   EXISTS a . FORALL b . (b <= a + 3) AND (a*a < inp)
// with an optional bound per quantifier:   EXISTS a < 10 . ...

enum class Quantifier { Exists, ForAll };

struct QuantifierDecl {
    Quantifier q = Quantifier::Exists;
    std::string var;
    std::optional<Value> bound;  // var ranges over [0, bound)

    friend bool operator==(const QuantifierDecl&, const QuantifierDecl&) = default;
};

struct Term {
    enum class Kind { Literal, Variable, Input, Add, Mul, Monus };
    Kind kind = Kind::Literal;
    Value lit;
    std::string var;
    std::shared_ptr<const Term> lhs, rhs;
};

struct Body {
    enum class Kind { Eq, Lt, Le, And, Or, Not };
    Kind kind = Kind::Eq;
    std::shared_ptr<const Term> tl, tr;  // comparison operands
    std::shared_ptr<const Body> bl, br;  // connective operands
};

struct Formula {
    std::vector<QuantifierDecl> prefix;
    std::shared_ptr<const Body> body;
};

// ---- construction helpers ----

namespace fml {
inline std::shared_ptr<const Term> lit(Value v) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Literal;
    t->lit = std::move(v);
    return t;
}
inline std::shared_ptr<const Term> var(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Variable;
    t->var = std::move(name);
    return t;
}
inline std::shared_ptr<const Term> input() {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Input;
    return t;
}
inline std::shared_ptr<const Term> node(Term::Kind k, std::shared_ptr<const Term> a,
                                        std::shared_ptr<const Term> b) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
}
inline std::shared_ptr<const Body> cmp(Body::Kind k, std::shared_ptr<const Term> a,
                                       std::shared_ptr<const Term> b) {
    auto c = std::make_shared<Body>();
    c->kind = k;
    c->tl = std::move(a);
    c->tr = std::move(b);
    return c;
}
inline std::shared_ptr<const Body> connect(Body::Kind k, std::shared_ptr<const Body> a,
                                           std::shared_ptr<const Body> b) {
    auto c = std::make_shared<Body>();
    c->kind = k;
    c->bl = std::move(a);
    c->br = std::move(b);
    return c;
}
}  // namespace fml

// ---- parser ----

struct FormulaParseResult {
    std::optional<Formula> formula;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return formula.has_value(); }
};

namespace fmldetail {

struct Token {
    enum class Kind {
        Ident, Number, LParen, RParen, Dot, Less, LessEq, Eq, Plus, Star, Minus, End
    };
    Kind kind = Kind::End;
    std::string text;
    std::size_t line = 1, col = 1;
};

inline std::string upper(std::string_view s) {
    std::string u;
    u.reserve(s.size());
    for (char c : s) u.push_back(static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c));
    return u;
}

struct FLexer {
    std::string_view src;
    std::size_t i = 0, line = 1, col = 1;
    std::vector<Token> tokens;
    std::vector<Diagnostic>* diags;

    void push(Token::Kind k, std::string text, std::size_t l, std::size_t c) {
        tokens.push_back({k, std::move(text), l, c});
    }

    bool lex() {
        while (i < src.size()) {
            char c = src[i];
            if (c == '\n') { ++i; ++line; col = 1; continue; }
            if (c == ' ' || c == '\t' || c == '\r') { ++i; ++col; continue; }
            if (c == '#') {  // comment to end of line
                while (i < src.size() && src[i] != '\n') ++i;
                continue;
            }
            std::size_t l = line, cl = col;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t s = i;
                while (i < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                    ++i; ++col;
                }
                push(Token::Kind::Ident, std::string(src.substr(s, i - s)), l, cl);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t s = i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                    ++i; ++col;
                }
                push(Token::Kind::Number, std::string(src.substr(s, i - s)), l, cl);
                continue;
            }
            switch (c) {
                case '(': push(Token::Kind::LParen, "(", l, cl); break;
                case ')': push(Token::Kind::RParen, ")", l, cl); break;
                case '.': push(Token::Kind::Dot, ".", l, cl); break;
                case '+': push(Token::Kind::Plus, "+", l, cl); break;
                case '*': push(Token::Kind::Star, "*", l, cl); break;
                case '-': push(Token::Kind::Minus, "-", l, cl); break;
                case '=': push(Token::Kind::Eq, "=", l, cl); break;
                case '<':
                    if (i + 1 < src.size() && src[i + 1] == '=') {
                        push(Token::Kind::LessEq, "<=", l, cl);
                        ++i; ++col;
                    } else {
                        push(Token::Kind::Less, "<", l, cl);
                    }
                    break;
                default:
                    diags->push_back({l, cl, std::string("unexpected character '") + c + "'"});
                    return false;
            }
            ++i; ++col;
        }
        push(Token::Kind::End, "", line, col);
        return true;
    }
};

struct FParser {
    const std::vector<Token>& t;
    std::size_t pos = 0;
    std::vector<Diagnostic>* diags;

    const Token& peek() const { return t[pos]; }
    const Token& get() { return t[pos++]; }
    bool at(Token::Kind k) const { return t[pos].kind == k; }

    void error(const Token& tok, std::string msg) {
        diags->push_back({tok.line, tok.col, std::move(msg)});
    }

    bool is_keyword(const Token& tok, const char* kw) const {
        return tok.kind == Token::Kind::Ident && upper(tok.text) == kw;
    }

    // term := factor (('+'|'-') factor)*     '-' is monus
    // factor := primary ('*' primary)*
    // primary := number | 'inp' | ident | '(' term ')'
    std::shared_ptr<const Term> parse_term() {
        auto lhs = parse_factor();
        if (!lhs) return nullptr;
        while (at(Token::Kind::Plus) || at(Token::Kind::Minus)) {
            Term::Kind k = get().kind == Token::Kind::Plus ? Term::Kind::Add : Term::Kind::Monus;
            auto rhs = parse_factor();
            if (!rhs) return nullptr;
            lhs = fml::node(k, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    std::shared_ptr<const Term> parse_factor() {
        auto lhs = parse_primary();
        if (!lhs) return nullptr;
        while (at(Token::Kind::Star)) {
            get();
            auto rhs = parse_primary();
            if (!rhs) return nullptr;
            lhs = fml::node(Term::Kind::Mul, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    std::shared_ptr<const Term> parse_primary() {
        const Token& tok = peek();
        if (tok.kind == Token::Kind::Number) {
            get();
            auto v = Value::parse(tok.text);
            if (!v) {
                error(tok, "bad number literal");
                return nullptr;
            }
            return fml::lit(*v);
        }
        if (tok.kind == Token::Kind::Ident) {
            std::string up = upper(tok.text);
            if (up == "AND" || up == "OR" || up == "NOT" || up == "EXISTS" || up == "FORALL") {
                error(tok, "expected a term, found '" + tok.text + "'");
                return nullptr;
            }
            get();
            if (up == "INP") return fml::input();
            return fml::var(tok.text);
        }
        if (tok.kind == Token::Kind::LParen) {
            get();
            auto inner = parse_term();
            if (!inner) return nullptr;
            if (!at(Token::Kind::RParen)) {
                error(peek(), "expected ')'");
                return nullptr;
            }
            get();
            return inner;
        }
        error(tok, "expected a term");
        return nullptr;
    }

    // body := and_expr ('OR' and_expr)*
    // and_expr := not_expr ('AND' not_expr)*
    // not_expr := 'NOT' not_expr | atom
    // atom := '(' body ')' (backtracks to a comparison) | cmp
    // cmp := term ('='|'<'|'<=') term
    std::shared_ptr<const Body> parse_body() {
        auto lhs = parse_and();
        if (!lhs) return nullptr;
        while (is_keyword(peek(), "OR")) {
            get();
            auto rhs = parse_and();
            if (!rhs) return nullptr;
            lhs = fml::connect(Body::Kind::Or, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    std::shared_ptr<const Body> parse_and() {
        auto lhs = parse_not();
        if (!lhs) return nullptr;
        while (is_keyword(peek(), "AND")) {
            get();
            auto rhs = parse_not();
            if (!rhs) return nullptr;
            lhs = fml::connect(Body::Kind::And, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    std::shared_ptr<const Body> parse_not() {
        if (is_keyword(peek(), "NOT")) {
            get();
            auto inner = parse_not();
            if (!inner) return nullptr;
            auto n = std::make_shared<Body>();
            n->kind = Body::Kind::Not;
            n->bl = std::move(inner);
            return n;
        }
        return parse_atom();
    }

    std::shared_ptr<const Body> parse_atom() {
        if (at(Token::Kind::LParen)) {
            // Try a parenthesised sub-body first; fall back to a comparison
            // whose left term merely starts with '('.
            std::size_t save = pos;
            std::size_t dsave = diags->size();
            get();
            auto inner = parse_body();
            if (inner && at(Token::Kind::RParen)) {
                std::size_t after = pos + 1;
                // Only accept if the paren closes a complete atom, not a term.
                Token::Kind next = t[after].kind;
                if (next != Token::Kind::Plus && next != Token::Kind::Star &&
                    next != Token::Kind::Minus && next != Token::Kind::Eq &&
                    next != Token::Kind::Less && next != Token::Kind::LessEq) {
                    get();
                    return inner;
                }
            }
            pos = save;
            diags->resize(dsave);
        }
        return parse_cmp();
    }

    std::shared_ptr<const Body> parse_cmp() {
        auto lhs = parse_term();
        if (!lhs) return nullptr;
        const Token& op = peek();
        Body::Kind k;
        if (op.kind == Token::Kind::Eq) k = Body::Kind::Eq;
        else if (op.kind == Token::Kind::Less) k = Body::Kind::Lt;
        else if (op.kind == Token::Kind::LessEq) k = Body::Kind::Le;
        else {
            error(op, "expected '=', '<' or '<='");
            return nullptr;
        }
        get();
        auto rhs = parse_term();
        if (!rhs) return nullptr;
        return fml::cmp(k, std::move(lhs), std::move(rhs));
    }

    std::optional<Formula> parse_formula() {
        Formula f;
        while (is_keyword(peek(), "EXISTS") || is_keyword(peek(), "FORALL")) {
            QuantifierDecl d;
            d.q = upper(get().text) == "EXISTS" ? Quantifier::Exists : Quantifier::ForAll;
            const Token& v = peek();
            if (v.kind != Token::Kind::Ident || upper(v.text) == "INP" ||
                is_keyword(v, "AND") || is_keyword(v, "OR") || is_keyword(v, "NOT") ||
                is_keyword(v, "EXISTS") || is_keyword(v, "FORALL")) {
                error(v, "expected a variable name");
                return std::nullopt;
            }
            d.var = get().text;
            for (const QuantifierDecl& prev : f.prefix) {
                if (prev.var == d.var) {
                    error(v, "duplicate variable '" + d.var + "'");
                    return std::nullopt;
                }
            }
            if (at(Token::Kind::Less)) {
                get();
                const Token& b = peek();
                if (b.kind != Token::Kind::Number) {
                    error(b, "expected a bound literal");
                    return std::nullopt;
                }
                get();
                auto bv = Value::parse(b.text);
                if (!bv || bv->is_zero()) {
                    error(b, "bound must be a positive literal");
                    return std::nullopt;
                }
                d.bound = *bv;
            }
            if (!at(Token::Kind::Dot)) {
                error(peek(), "expected '.' after quantifier");
                return std::nullopt;
            }
            get();
            f.prefix.push_back(std::move(d));
        }
        auto body = parse_body();
        if (!body) return std::nullopt;
        if (!at(Token::Kind::End)) {
            error(peek(), "trailing input after formula");
            return std::nullopt;
        }
        f.body = std::move(body);
        return f;
    }
};

inline bool term_uses_known_vars(const Term& t, const std::vector<QuantifierDecl>& prefix,
                                 std::string* offender) {
    switch (t.kind) {
        case Term::Kind::Literal:
        case Term::Kind::Input:
            return true;
        case Term::Kind::Variable:
            for (const QuantifierDecl& d : prefix)
                if (d.var == t.var) return true;
            *offender = t.var;
            return false;
        default:
            return term_uses_known_vars(*t.lhs, prefix, offender) &&
                   term_uses_known_vars(*t.rhs, prefix, offender);
    }
}

inline bool body_uses_known_vars(const Body& b, const std::vector<QuantifierDecl>& prefix,
                                 std::string* offender) {
    switch (b.kind) {
        case Body::Kind::Eq:
        case Body::Kind::Lt:
        case Body::Kind::Le:
            return term_uses_known_vars(*b.tl, prefix, offender) &&
                   term_uses_known_vars(*b.tr, prefix, offender);
        case Body::Kind::Not:
            return body_uses_known_vars(*b.bl, prefix, offender);
        default:
            return body_uses_known_vars(*b.bl, prefix, offender) &&
                   body_uses_known_vars(*b.br, prefix, offender);
    }
}

}  // namespace fmldetail

inline FormulaParseResult parse_formula(std::string_view source) {
    FormulaParseResult result;
    fmldetail::FLexer lexer{source, 0, 1, 1, {}, &result.diagnostics};
    if (!lexer.lex()) return result;
    fmldetail::FParser parser{lexer.tokens, 0, &result.diagnostics};
    auto f = parser.parse_formula();
    if (!f) {
        if (result.diagnostics.empty())
            result.diagnostics.push_back({1, 1, "malformed formula"});
        return result;
    }
    std::string offender;
    if (!fmldetail::body_uses_known_vars(*f->body, f->prefix, &offender)) {
        result.diagnostics.push_back({1, 1, "unknown variable '" + offender + "'"});
        return result;
    }
    result.formula = std::move(*f);
    return result;
}

// ---- printing ----

namespace fmldetail {
inline void print_term(const Term& t, std::string& out) {
    switch (t.kind) {
        case Term::Kind::Literal: out += t.lit.to_decimal(); return;
        case Term::Kind::Variable: out += t.var; return;
        case Term::Kind::Input: out += "inp"; return;
        case Term::Kind::Add:
        case Term::Kind::Mul:
        case Term::Kind::Monus: {
            out += '(';
            print_term(*t.lhs, out);
            out += t.kind == Term::Kind::Add ? " + " : t.kind == Term::Kind::Mul ? " * " : " - ";
            print_term(*t.rhs, out);
            out += ')';
            return;
        }
    }
}

inline void print_body(const Body& b, std::string& out) {
    switch (b.kind) {
        case Body::Kind::Eq:
        case Body::Kind::Lt:
        case Body::Kind::Le:
            out += '(';
            print_term(*b.tl, out);
            out += b.kind == Body::Kind::Eq ? " = " : b.kind == Body::Kind::Lt ? " < " : " <= ";
            print_term(*b.tr, out);
            out += ')';
            return;
        case Body::Kind::Not:
            out += "NOT ";
            print_body(*b.bl, out);
            return;
        case Body::Kind::And:
        case Body::Kind::Or:
            out += '(';
            print_body(*b.bl, out);
            out += b.kind == Body::Kind::And ? " AND " : " OR ";
            print_body(*b.br, out);
            out += ')';
            return;
    }
}
}  // namespace fmldetail

inline std::string print_formula(const Formula& f) {
    std::string out;
    for (const QuantifierDecl& d : f.prefix) {
        out += d.q == Quantifier::Exists ? "EXISTS " : "FORALL ";
        out += d.var;
        if (d.bound) out += " < " + d.bound->to_decimal();
        out += " . ";
    }
    fmldetail::print_body(*f.body, out);
    return out;
}

// ---- bounding and evaluation ----

// Bounds for all prefix variables except the last, plus an evaluation cap
// for the last one. The cap is empirical: the machinery that would discharge
// an unbounded final quantifier is not part of this toolkit, so the last
// variable is scanned over [0, final_cap] and the result is evidence.
struct BoundAssignment {
    std::vector<Value> bounds;  // for prefix variables 0..k-2
    Value final_cap;            // inclusive cap for the last variable
};

// Bounds every prefix variable except the last: EXISTS a becomes
// EXISTS a < A, FORALL a becomes FORALL a < A. Structure-only transform;
// the body is shared, not copied.
inline Formula bound_quantifiers(const Formula& f, const BoundAssignment& b) {
    for (const QuantifierDecl& d : f.prefix)
        if (d.bound) throw std::invalid_argument("formula prefix is already bounded");
    const std::size_t k = f.prefix.size();
    const std::size_t expected = k == 0 ? 0 : k - 1;
    if (b.bounds.size() != expected)
        throw std::invalid_argument("bound list length does not match the prefix");
    Formula out = f;
    for (std::size_t i = 0; i + 1 < k; ++i) out.prefix[i].bound = b.bounds[i];
    return out;
}

struct EvalBudget {
    unsigned long max_body_evals = 100'000'000;
};

enum class EvalStatus { True, False, BudgetExceeded };

namespace fmldetail {

struct Env {
    const std::vector<QuantifierDecl>* prefix;
    std::vector<Value> values;  // by prefix position
    const Value* inp;

    const Value& lookup(const std::string& name) const {
        for (std::size_t i = 0; i < prefix->size(); ++i)
            if ((*prefix)[i].var == name) return values[i];
        throw std::logic_error("unbound variable '" + name + "'");
    }
};

inline Value eval_term(const Term& t, const Env& env) {
    switch (t.kind) {
        case Term::Kind::Literal: return t.lit;
        case Term::Kind::Variable: return env.lookup(t.var);
        case Term::Kind::Input: return *env.inp;
        case Term::Kind::Add: return add(eval_term(*t.lhs, env), eval_term(*t.rhs, env));
        case Term::Kind::Mul: return mul(eval_term(*t.lhs, env), eval_term(*t.rhs, env));
        case Term::Kind::Monus: return monus(eval_term(*t.lhs, env), eval_term(*t.rhs, env));
    }
    return Value();
}

inline bool eval_body(const Body& b, const Env& env) {
    switch (b.kind) {
        case Body::Kind::Eq: return eval_term(*b.tl, env) == eval_term(*b.tr, env);
        case Body::Kind::Lt: return eval_term(*b.tl, env) < eval_term(*b.tr, env);
        case Body::Kind::Le: return eval_term(*b.tl, env) <= eval_term(*b.tr, env);
        case Body::Kind::And: return eval_body(*b.bl, env) && eval_body(*b.br, env);
        case Body::Kind::Or: return eval_body(*b.bl, env) || eval_body(*b.br, env);
        case Body::Kind::Not: return !eval_body(*b.bl, env);
    }
    return false;
}

// Effective scan range of prefix variable i: formula bound (exclusive) wins,
// then the assignment bound (exclusive) for non-final variables, then the
// inclusive final cap.
inline mpz_class scan_count(const Formula& f, const BoundAssignment& b, std::size_t i) {
    const std::size_t k = f.prefix.size();
    if (f.prefix[i].bound) return f.prefix[i].bound->mpz();
    if (i + 1 < k) {
        if (i >= b.bounds.size())
            throw std::invalid_argument("missing bound for variable '" + f.prefix[i].var + "'");
        return b.bounds[i].mpz();
    }
    return b.final_cap.mpz() + 1;
}

inline bool eval_prefix(const Formula& f, const BoundAssignment& b, std::size_t i, Env& env) {
    if (i == f.prefix.size()) return eval_body(*f.body, env);
    mpz_class count = scan_count(f, b, i);
    const bool exists = f.prefix[i].q == Quantifier::Exists;
    for (mpz_class v = 0; v < count; ++v) {
        env.values[i] = Value(v);
        bool r = eval_prefix(f, b, i + 1, env);
        if (exists && r) return true;
        if (!exists && !r) return false;
    }
    return !exists;
}

}  // namespace fmldetail

// Brute-force evaluation with every variable bounded. EXISTS scans for a
// witness, FORALL checks the whole range. Refuses when the product of the
// scan ranges exceeds the budget.
inline EvalStatus eval_bounded(const Formula& f, const Value& inp, const BoundAssignment& b,
                               const EvalBudget& budget = {}) {
    mpz_class total = 1;
    for (std::size_t i = 0; i < f.prefix.size(); ++i) {
        total *= fmldetail::scan_count(f, b, i);
        if (total > budget.max_body_evals) return EvalStatus::BudgetExceeded;
    }
    fmldetail::Env env{&f.prefix, std::vector<Value>(f.prefix.size()), &inp};
    return fmldetail::eval_prefix(f, b, 0, env) ? EvalStatus::True : EvalStatus::False;
}

// ---- bound escalation ----

// Two-dimensional escalation: prefix bounds and the final cap grow together,
// the cap at least as fast as any bound. A cap that lags the bounds produces
// wrong verdicts on formulas whose final quantifier must out-range the
// bounded ones, so the standard schedule squares the bound.
struct BoundStage {
    Value prefix_bound;
    Value final_cap;
};

struct BoundSchedule {
    std::vector<BoundStage> stages;
    unsigned confirmations = 3;

    static BoundSchedule standard() {
        BoundSchedule s;
        for (unsigned long b : {4ul, 8ul, 16ul, 32ul, 64ul})
            s.stages.push_back({Value(b), Value(b * b)});
        return s;
    }
};

struct StageEvidence {
    BoundStage stage;
    EvalStatus result = EvalStatus::False;
};

struct BoundVerdict {
    VerdictKind kind = VerdictKind::Unstable;
    bool value = false;  // meaningful when kind == Stabilized
    std::vector<StageEvidence> evidence;
};

inline BoundVerdict escalate_bounds(const Formula& f, const Value& inp,
                                    const BoundSchedule& schedule,
                                    const EvalBudget& budget = {}) {
    if (schedule.stages.empty())
        throw std::invalid_argument("bound schedule must be nonempty");
    if (schedule.confirmations < 2)
        throw std::invalid_argument("confirmations must be at least 2");
    BoundVerdict verdict;
    const std::size_t k = f.prefix.size();
    for (const BoundStage& stage : schedule.stages) {
        BoundAssignment b;
        if (k > 1) b.bounds.assign(k - 1, stage.prefix_bound);
        b.final_cap = stage.final_cap;
        verdict.evidence.push_back({stage, eval_bounded(f, inp, b, budget)});
    }

    const std::size_t n = verdict.evidence.size();
    const std::size_t c = schedule.confirmations;
    if (n < c) return verdict;  // not enough stages to confirm anything
    bool budget_hit = false;
    bool agree = true;
    EvalStatus last = verdict.evidence[n - 1].result;
    for (std::size_t i = n - c; i < n; ++i) {
        EvalStatus r = verdict.evidence[i].result;
        if (r == EvalStatus::BudgetExceeded) budget_hit = true;
        if (r != last) agree = false;
    }
    if (budget_hit) {
        verdict.kind = VerdictKind::ResourceExceeded;
    } else if (agree) {
        verdict.kind = VerdictKind::Stabilized;
        verdict.value = last == EvalStatus::True;
    } else {
        verdict.kind = VerdictKind::Unstable;
    }
    return verdict;
}

}  // namespace asram
