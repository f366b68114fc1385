#include "doctest.h"

#include "asram/hierarchy.hpp"

#include <random>

#include "helpers.hpp"

using namespace asram;

namespace {
Formula parse_or_die(const std::string& text) {
    FormulaParseResult r = parse_formula(text);
    if (!r.ok()) {
        std::string msg = "formula parse failed:";
        for (const auto& d : r.diagnostics)
            msg += " [" + std::to_string(d.line) + ":" + std::to_string(d.col) + "] " + d.message;
        throw std::runtime_error(msg);
    }
    return *r.formula;
}

EvalStatus eval(const std::string& text, unsigned long inp,
                std::vector<unsigned long> bounds, unsigned long cap) {
    BoundAssignment b;
    for (unsigned long v : bounds) b.bounds.push_back(Value(v));
    b.final_cap = Value(cap);
    return eval_bounded(parse_or_die(text), Value(inp), b);
}
}  // namespace

TEST_CASE("formula parsing") {
    Formula f = parse_or_die("EXISTS a . FORALL b . (b <= a + 3) AND (a*a < inp)");
    REQUIRE(f.prefix.size() == 2);
    CHECK(f.prefix[0].q == Quantifier::Exists);
    CHECK(f.prefix[0].var == "a");
    CHECK(!f.prefix[0].bound);
    CHECK(f.prefix[1].q == Quantifier::ForAll);
    CHECK(f.body->kind == Body::Kind::And);

    Formula g = parse_or_die("EXISTS v < 10 . v * v = inp");
    REQUIRE(g.prefix.size() == 1);
    CHECK(*g.prefix[0].bound == Value(10));

    // parenthesised terms on the comparison side
    Formula h = parse_or_die("FORALL a . (a + 1) * 2 = a * 2 + 2");
    CHECK(h.prefix.size() == 1);

    // keywords in any case, comments
    parse_or_die("exists a . not (a < 0)  # nothing is below zero");
}

TEST_CASE("formula parse errors carry positions") {
    for (const char* bad : {
             "EXISTS . a = 1",
             "EXISTS a a = 1",
             "EXISTS a . a +",
             "EXISTS a . a",
             "EXISTS a . (a = 1",
             "EXISTS a < 0 . a = 1",
             "EXISTS a . EXISTS a . a = 1",
             "EXISTS a . b = 1",
             "FORALL inp . inp = 1",
             "a = 1 trailing junk",
             "EXISTS a . a ? 1",
         }) {
        FormulaParseResult r = parse_formula(bad);
        CHECK(!r.ok());
        REQUIRE(!r.diagnostics.empty());
        CHECK(r.diagnostics[0].line > 0);
        CHECK(r.diagnostics[0].col > 0);
    }
}

TEST_CASE("print and reparse") {
    for (const char* text : {
             "EXISTS a . FORALL b . (b <= a + 3) AND (a*a < inp)",
             "FORALL a . EXISTS b . b = a + 1",
             "EXISTS a < 12 . NOT (a - 3 = 0) OR a = inp",
         }) {
        Formula f = parse_or_die(text);
        Formula g = parse_or_die(print_formula(f));
        CHECK(print_formula(g) == print_formula(f));
        CHECK(g.prefix == f.prefix);
    }
}

TEST_CASE("bound_quantifiers bounds all but the last variable") {
    Formula f = parse_or_die("EXISTS a . FORALL b . b <= a");
    BoundAssignment b;
    b.bounds = {Value(10)};
    b.final_cap = Value(100);
    Formula g = bound_quantifiers(f, b);
    REQUIRE(g.prefix.size() == 2);
    CHECK(*g.prefix[0].bound == Value(10));
    CHECK(!g.prefix[1].bound);
    // structure preserved: quantifiers, variables and the shared body
    CHECK(g.prefix[0].q == f.prefix[0].q);
    CHECK(g.prefix[1].q == f.prefix[1].q);
    CHECK(g.body.get() == f.body.get());
    // the original is untouched
    CHECK(!f.prefix[0].bound);
}

TEST_CASE("bound_quantifiers edge cases") {
    Formula one = parse_or_die("EXISTS a . a = inp");
    BoundAssignment none;
    none.final_cap = Value(5);
    Formula g = bound_quantifiers(one, none);
    CHECK(!g.prefix[0].bound);  // k=1: nothing to bound

    Formula closed = parse_or_die("1 + 1 = 2");
    CHECK(bound_quantifiers(closed, none).prefix.empty());

    BoundAssignment wrong;
    wrong.bounds = {Value(3), Value(4)};
    wrong.final_cap = Value(5);
    CHECK_THROWS_AS(bound_quantifiers(one, wrong), std::invalid_argument);

    Formula bounded = parse_or_die("EXISTS a < 5 . a = inp");
    CHECK_THROWS_AS(bound_quantifiers(bounded, none), std::invalid_argument);
}

TEST_CASE("bounded evaluation") {
    CHECK(eval("EXISTS a . a * a = inp", 49, {}, 10) == EvalStatus::True);
    CHECK(eval("EXISTS a . a * a = inp", 50, {}, 10) == EvalStatus::False);
    CHECK(eval("FORALL a . EXISTS b . b = a + 1", 0, {100}, 102) == EvalStatus::True);
    CHECK(eval("FORALL a . EXISTS b . (b*b <= a) AND (NOT ((b+1)*(b+1) <= a))", 0, {50}, 8) ==
          EvalStatus::True);
    // closed body
    CHECK(eval("1 + 1 = 2", 0, {}, 1) == EvalStatus::True);
    CHECK(eval("2 < 1", 0, {}, 1) == EvalStatus::False);
    // the final cap is inclusive
    CHECK(eval("EXISTS a . a = 10", 0, {}, 10) == EvalStatus::True);
    CHECK(eval("EXISTS a . a = 11", 0, {}, 10) == EvalStatus::False);
    // formula-carried bounds are exclusive
    CHECK(eval("EXISTS a < 10 . a = 9", 0, {}, 100) == EvalStatus::True);
    CHECK(eval("EXISTS a < 10 . a = 10", 0, {}, 100) == EvalStatus::False);
}

TEST_CASE("evaluation budget") {
    EvalBudget tight;
    tight.max_body_evals = 1000;
    BoundAssignment b;
    b.bounds = {Value(100)};
    b.final_cap = Value(100);
    Formula f = parse_or_die("FORALL a . EXISTS b . b = a");
    CHECK(eval_bounded(f, Value(0), b, tight) == EvalStatus::BudgetExceeded);
    b.bounds = {Value(9)};
    b.final_cap = Value(99);  // 9 * 100 <= 1000
    CHECK(eval_bounded(f, Value(0), b, tight) == EvalStatus::True);
}

// The corpus: formulas with analytically known truth values, each verified
// here against a plain nested-loop decision completely outside the module.
namespace {
struct CorpusEntry {
    const char* text;
    unsigned long inp;
    bool truth;
};

const CorpusEntry kCorpus[] = {
    {"EXISTS a . a * a = inp", 49, true},
    {"EXISTS a . a * a = inp", 50, false},
    {"FORALL a . EXISTS b . b = a + 1", 0, true},
    {"FORALL a . EXISTS b . (b*b <= a) AND (NOT ((b+1)*(b+1) <= a))", 0, true},
    {"EXISTS a . FORALL b . b <= a", 0, false},
    {"FORALL a . a <= a + 1", 0, true},
    {"EXISTS a . EXISTS b . a*a + b*b = inp", 25, true},
    {"EXISTS a . EXISTS b . a*a + b*b = inp", 3, false},
    {"FORALL a . FORALL b . a*b = b*a", 0, true},
    {"FORALL a . (a - inp = 0) OR (inp - a = 0)", 5, true},
    {"FORALL a . EXISTS b . a + b = inp", 10, false},
    {"EXISTS a . a + a = inp", 14, true},
    {"EXISTS a . a + a = inp", 7, false},
    {"EXISTS a . FORALL b . a * b = b", 0, true},
};

// Brute-force decisions with plain integer loops, one per corpus entry.
bool brute_force(std::size_t index) {
    const unsigned long N = 200;  // comfortably past every relevant witness
    auto monus_ul = [](unsigned long a, unsigned long b) { return a > b ? a - b : 0ul; };
    switch (index) {
        case 0: case 1: {
            unsigned long inp = kCorpus[index].inp;
            for (unsigned long a = 0; a < N; ++a)
                if (a * a == inp) return true;
            return false;
        }
        case 2: return true;   // successor always exists
        case 3: {
            for (unsigned long a = 0; a < N; ++a) {
                bool found = false;
                for (unsigned long b = 0; b <= a; ++b)
                    if (b * b <= a && !((b + 1) * (b + 1) <= a)) { found = true; break; }
                if (!found) return false;
            }
            return true;
        }
        case 4: return false;  // no a tops every b
        case 5: return true;
        case 6: case 7: {
            unsigned long inp = kCorpus[index].inp;
            for (unsigned long a = 0; a < N; ++a)
                for (unsigned long b = 0; b < N; ++b)
                    if (a * a + b * b == inp) return true;
            return false;
        }
        case 8: return true;
        case 9: {
            unsigned long inp = kCorpus[index].inp;
            for (unsigned long a = 0; a < N; ++a)
                if (monus_ul(a, inp) != 0 && monus_ul(inp, a) != 0) return false;
            return true;
        }
        case 10: {
            unsigned long inp = kCorpus[index].inp;
            for (unsigned long a = 0; a < N; ++a) {
                bool found = false;
                for (unsigned long b = 0; b <= inp; ++b)
                    if (a + b == inp) { found = true; break; }
                if (!found) return false;  // any a > inp has no partner
            }
            return true;
        }
        case 11: case 12: {
            unsigned long inp = kCorpus[index].inp;
            for (unsigned long a = 0; a < N; ++a)
                if (a + a == inp) return true;
            return false;
        }
        case 13: return true;  // a = 1
    }
    return false;
}
}  // namespace

TEST_CASE("corpus truths match the independent brute force") {
    for (std::size_t i = 0; i < std::size(kCorpus); ++i) {
        CAPTURE(i);
        CHECK(kCorpus[i].truth == brute_force(i));
    }
}

TEST_CASE("escalation stabilises to the known truth on the whole corpus") {
    for (std::size_t i = 0; i < std::size(kCorpus); ++i) {
        CAPTURE(i);
        CAPTURE(kCorpus[i].text);
        Formula f = parse_or_die(kCorpus[i].text);
        BoundVerdict v = escalate_bounds(f, Value(kCorpus[i].inp), BoundSchedule::standard());
        CHECK(v.kind == VerdictKind::Stabilized);
        CHECK(v.value == kCorpus[i].truth);
    }
}

TEST_CASE("a lagging final cap lies exactly when it trails the bounds") {
    Formula f = parse_or_die("EXISTS a . FORALL b . b <= a");

    // cap below the bound at every stage: stabilises on the wrong value
    BoundSchedule lagging;
    for (unsigned long b : {4ul, 8ul, 16ul, 32ul, 64ul})
        lagging.stages.push_back({Value(b), Value(b - 1)});
    BoundVerdict wrong = escalate_bounds(f, Value(0), lagging);
    CHECK(wrong.kind == VerdictKind::Stabilized);
    CHECK(wrong.value == true);  // wrongly true

    // cap equal to the bound at every stage: the scan reaches b = A and
    // refutes every candidate
    BoundSchedule equal;
    for (unsigned long b : {4ul, 8ul, 16ul, 32ul, 64ul})
        equal.stages.push_back({Value(b), Value(b)});
    BoundVerdict right = escalate_bounds(f, Value(0), equal);
    CHECK(right.kind == VerdictKind::Stabilized);
    CHECK(right.value == false);

    // per-stage truth flips exactly at cap < bound
    for (unsigned long bound : {3ul, 5ul, 9ul, 33ul}) {
        BoundAssignment b;
        b.bounds = {Value(bound)};
        b.final_cap = Value(bound - 1);
        CHECK(eval_bounded(f, Value(0), b) == EvalStatus::True);  // wrong
        b.final_cap = Value(bound);
        CHECK(eval_bounded(f, Value(0), b) == EvalStatus::False);
    }

    // a cap that lags on some stages and catches up on others is unstable
    BoundSchedule mixed;
    mixed.stages = {{Value(4), Value(3)}, {Value(8), Value(8)},
                    {Value(16), Value(15)}, {Value(32), Value(32)},
                    {Value(64), Value(63)}};
    CHECK(escalate_bounds(f, Value(0), mixed).kind == VerdictKind::Unstable);

    // under the standard schedule the cap outpaces the bound
    BoundVerdict std_v = escalate_bounds(f, Value(0), BoundSchedule::standard());
    CHECK(std_v.kind == VerdictKind::Stabilized);
    CHECK(std_v.value == false);
}

TEST_CASE("degenerate bound schedules are rejected") {
    Formula f = parse_or_die("EXISTS a . a = 1");
    BoundSchedule empty;
    empty.stages = {};
    CHECK_THROWS_AS(escalate_bounds(f, Value(0), empty), std::invalid_argument);
    BoundSchedule weak;
    weak.stages = {{Value(4), Value(16)}};
    weak.confirmations = 1;
    CHECK_THROWS_AS(escalate_bounds(f, Value(0), weak), std::invalid_argument);
}

TEST_CASE("budget trouble in the confirmation window is a resource verdict") {
    Formula f = parse_or_die("FORALL a . EXISTS b . b = a");
    BoundSchedule s;
    s.stages = {{Value(4), Value(16)}, {Value(8), Value(64)}, {Value(1000), Value(1000000)}};
    s.confirmations = 2;
    EvalBudget tight;
    tight.max_body_evals = 100000;
    CHECK(escalate_bounds(f, Value(0), s, tight).kind == VerdictKind::ResourceExceeded);
}

// Random ∃-only / ∀-only formulas: enlarging any bound can only help an
// EXISTS and only hurt a FORALL.
namespace {
std::shared_ptr<const Term> random_term(std::mt19937_64& gen, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 3);
    switch (pick(gen)) {
        case 0: return fml::var("a");
        case 1: return fml::var("b");
        case 2: return fml::input();
        case 3: {
            std::uniform_int_distribution<int> lit(0, 12);
            return fml::lit(Value(static_cast<unsigned long>(lit(gen))));
        }
        case 4: return fml::node(Term::Kind::Add, random_term(gen, depth - 1),
                                 random_term(gen, depth - 1));
        case 5: return fml::node(Term::Kind::Mul, random_term(gen, depth - 1),
                                 random_term(gen, depth - 1));
        default: return fml::node(Term::Kind::Monus, random_term(gen, depth - 1),
                                  random_term(gen, depth - 1));
    }
}

std::shared_ptr<const Body> random_body(std::mt19937_64& gen, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
    switch (pick(gen)) {
        case 0: return fml::cmp(Body::Kind::Eq, random_term(gen, 1), random_term(gen, 1));
        case 1: return fml::cmp(Body::Kind::Lt, random_term(gen, 1), random_term(gen, 1));
        case 2: return fml::cmp(Body::Kind::Le, random_term(gen, 1), random_term(gen, 1));
        case 3: return fml::connect(Body::Kind::And, random_body(gen, depth - 1),
                                    random_body(gen, depth - 1));
        case 4: return fml::connect(Body::Kind::Or, random_body(gen, depth - 1),
                                    random_body(gen, depth - 1));
        default: {
            auto n = std::make_shared<Body>();
            n->kind = Body::Kind::Not;
            n->bl = random_body(gen, depth - 1);
            return n;
        }
    }
}
}  // namespace

TEST_CASE("arbitrary bytes never crash the formula parser") {
    std::mt19937_64 gen(4242);
    std::uniform_int_distribution<int> len(0, 120);
    std::uniform_int_distribution<int> byte(1, 255);
    std::uniform_int_distribution<int> tokenish(0, 11);
    const char* fragments[] = {"EXISTS", "FORALL", "a", ".", "(", ")", "<=",
                               "inp",    "AND",    "NOT", "*", "12"};
    for (int iter = 0; iter < 400; ++iter) {
        std::string s;
        int n = len(gen);
        for (int i = 0; i < n; ++i) {
            if (iter % 2 == 0)
                s.push_back(static_cast<char>(byte(gen)));
            else {
                s += fragments[tokenish(gen)];
                s += ' ';
            }
        }
        FormulaParseResult r = parse_formula(s);  // must not throw or crash
        if (r.ok()) {
            Formula f = *r.formula;
            CHECK(print_formula(f).size() > 0);
        }
    }
}

TEST_CASE("single-kind prefixes are monotone in every bound") {
    std::mt19937_64 gen(555);
    for (int iter = 0; iter < 120; ++iter) {
        Formula f;
        Quantifier q = iter % 2 == 0 ? Quantifier::Exists : Quantifier::ForAll;
        f.prefix.push_back({q, "a", std::nullopt});
        f.prefix.push_back({q, "b", std::nullopt});
        f.body = random_body(gen, 2);

        auto at = [&](unsigned long bound, unsigned long cap) {
            BoundAssignment b;
            b.bounds = {Value(bound)};
            b.final_cap = Value(cap);
            return eval_bounded(f, Value(6), b) == EvalStatus::True;
        };
        bool small = at(4, 6), mid = at(9, 14), large = at(21, 30);
        if (q == Quantifier::Exists) {
            CHECK(small <= mid);
            CHECK(mid <= large);
        } else {
            CHECK(small >= mid);
            CHECK(mid >= large);
        }
    }
}
