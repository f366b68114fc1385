#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asram/isa.hpp"
#include "asram/oracle.hpp"
#include "asram/value.hpp"

namespace asram {

// Reference program generators. The tower program computes 2^(2^(2^x)) in a
// number of steps linear in x; the general variant computes 2^(2^x) for any
// x with a logarithmic number of draws. Both rest on the same device: for a
// power P = A^E of a draw A, P mod (A - c) equals c^E whenever c^E is small
// enough, so one modulus substitutes the base and two moduli square the
// exponent.

// Declined requests: plans whose draws would not fit in memory at desk scale.
class cap_refusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr unsigned kTowerCapDefault = 4;
inline constexpr unsigned kGeneralTowerCapDefault = 10;

struct ExponentPlan {
    unsigned x = 0;
    std::vector<unsigned long> exponents;  // draw i is 2^exponents[i]

    OracleFamily oracle(unsigned long scale = 1) const {
        OracleFamily f;
        f.kind = OracleKind::ExponentPlan;
        f.exponents = exponents;
        f.scale = scale;
        return f;
    }
};

namespace progdetail {

inline unsigned long checked_mul(unsigned long a, unsigned long b, const char* what) {
    unsigned long r;
    if (__builtin_mul_overflow(a, b, &r)) throw cap_refusal(std::string(what) + " overflows");
    return r;
}

inline unsigned long checked_add(unsigned long a, unsigned long b, const char* what) {
    unsigned long r;
    if (__builtin_add_overflow(a, b, &r)) throw cap_refusal(std::string(what) + " overflows");
    return r;
}

// 2^e as unsigned long, refusing when it cannot be represented.
inline unsigned long pow2_ul(unsigned long e, const char* what) {
    if (e >= 64) throw cap_refusal(std::string(what) + " overflows");
    return 1ul << e;
}

inline Operand reg(unsigned long r) { return Operand::reg(Value(r)); }
inline Operand imm(unsigned long v) { return Operand::imm(Value(v)); }

inline Instruction make3(Opcode op, unsigned long dst, Operand a, Operand b) {
    Instruction ins;
    ins.op = op;
    ins.dst = Value(dst);
    ins.src1 = std::move(a);
    ins.src2 = std::move(b);
    return ins;
}

inline Instruction make_aln(unsigned long dst) {
    Instruction ins;
    ins.op = Opcode::Aln;
    ins.dst = Value(dst);
    return ins;
}

inline Instruction make_halt() { return Instruction{}; }

}  // namespace progdetail

// ---- tower: 2^(2^(2^x)) ----

struct TowerLayout {
    unsigned x = 0;
    unsigned long first_draw_reg = 1;  // draws live in r1..rx, in draw order
    unsigned long power_reg = 0;       // running power P
    unsigned long temp_reg = 0;
    unsigned long scratch_reg = 0;
    std::size_t instruction_count = 0;
};

inline TowerLayout tower_layout(unsigned x) {
    if (x < 1) throw std::invalid_argument("tower parameter must be >= 1");
    TowerLayout l;
    l.x = x;
    l.power_reg = x + 1;
    l.temp_reg = x + 2;
    l.scratch_reg = x + 3;
    l.instruction_count = 5ul * x + 2;
    return l;
}

// Straight-line program: x draws, one squaring, then a pair of moduli per
// level and a final pair substituting the literal 2.
inline Program gen_tower(unsigned x) {
    using namespace progdetail;
    TowerLayout l = tower_layout(x);
    Program p;
    p.profile = Profile::named(ProfileKind::Arith);
    p.name = "tower x=" + std::to_string(x);
    p.aln_hint = x;
    const unsigned long P = l.power_reg, T = l.temp_reg, S = l.scratch_reg;

    for (unsigned i = 1; i <= x; ++i) p.code.push_back(make_aln(i));
    p.code.push_back(make3(Opcode::Mul, P, reg(x), reg(x)));
    for (unsigned i = x - 1; i >= 1; --i) {
        p.code.push_back(make3(Opcode::Sub, S, reg(i + 1), reg(i)));
        p.code.push_back(make3(Opcode::Mod, T, reg(P), reg(S)));
        p.code.push_back(make3(Opcode::Sub, S, reg(i + 1), reg(T)));
        p.code.push_back(make3(Opcode::Mod, P, reg(P), reg(S)));
    }
    p.code.push_back(make3(Opcode::Sub, S, reg(1), imm(2)));
    p.code.push_back(make3(Opcode::Mod, T, reg(P), reg(S)));
    p.code.push_back(make3(Opcode::Sub, S, reg(1), reg(T)));
    p.code.push_back(make3(Opcode::Mod, 0, reg(P), reg(S)));
    p.code.push_back(make_halt());
    return p;
}

// Smallest exponent list making every modulus in the tower program behave:
//   e_1     = 2^(2^x) + 2
//   e_(i+1) = e_i * 2^(2^(x-i)) + 1
// The first draw must leave room for the final result 2^(2^(2^x)); each
// later draw must leave room for the largest power of the previous draw
// taken before the substitution.
inline ExponentPlan sufficient_plan(unsigned x, unsigned cap = kTowerCapDefault) {
    using namespace progdetail;
    if (x < 1) throw std::invalid_argument("tower parameter must be >= 1");
    if (x > cap)
        throw cap_refusal("tower plan for x=" + std::to_string(x) +
                          " exceeds the cap of " + std::to_string(cap) +
                          " (draws grow doubly exponentially)");
    ExponentPlan plan;
    plan.x = x;
    unsigned long e = checked_add(pow2_ul(pow2_ul(x, "plan"), "plan"), 2, "plan");
    plan.exponents.push_back(e);
    for (unsigned i = 1; i < x; ++i) {
        e = checked_add(checked_mul(e, pow2_ul(pow2_ul(x - i, "plan"), "plan"), "plan"), 1,
                        "plan");
        plan.exponents.push_back(e);
    }
    return plan;
}

// ---- general tower: 2^(2^x) for arbitrary x ----

namespace progdetail {

// Exponent milestones of the square-and-multiply walk over the bits of x,
// from the most significant bit inward. milestones[j] is the running
// exponent while the walk sits at draw level k-j (levels count down to 1).
inline std::vector<unsigned long> general_tower_milestones(unsigned x) {
    unsigned bits = 0;
    for (unsigned t = x; t > 0; t >>= 1) ++bits;
    std::vector<unsigned long> m;
    unsigned long e = 2;  // leading bit handled by the initial squaring
    m.push_back(e);
    for (unsigned j = bits - 1; j-- > 0;) {
        e = checked_mul(e, e, "general tower plan");
        if ((x >> j) & 1u) e = checked_mul(e, 2, "general tower plan");
        m.push_back(e);
    }
    return m;  // size == bits; final entry is 2^x
}

}  // namespace progdetail

// Square-and-multiply over the bits of x: one fresh draw per squaring step,
// value-level squarings for the set bits, one final modulus against the
// literal 2. Draw count is exactly the bit length of x.
inline Program gen_general_tower(unsigned x) {
    using namespace progdetail;
    if (x < 1) throw std::invalid_argument("general tower parameter must be >= 1");
    unsigned bits = 0;
    for (unsigned t = x; t > 0; t >>= 1) ++bits;
    const unsigned long k = bits;  // draws r1..rk, ascending size
    const unsigned long P = k + 1, T = k + 2, S = k + 3;

    Program p;
    p.profile = Profile::named(ProfileKind::Arith);
    p.name = "general tower x=" + std::to_string(x);
    p.aln_hint = k;

    for (unsigned long i = 1; i <= k; ++i) p.code.push_back(make_aln(i));
    p.code.push_back(make3(Opcode::Mul, P, reg(k), reg(k)));
    unsigned long level = k;
    for (unsigned j = bits - 1; j-- > 0;) {
        // squaring step: substitute the next smaller draw, twice
        p.code.push_back(make3(Opcode::Sub, S, reg(level), reg(level - 1)));
        p.code.push_back(make3(Opcode::Mod, T, reg(P), reg(S)));
        p.code.push_back(make3(Opcode::Sub, S, reg(level), reg(T)));
        p.code.push_back(make3(Opcode::Mod, P, reg(P), reg(S)));
        --level;
        if ((x >> j) & 1u) p.code.push_back(make3(Opcode::Mul, P, reg(P), reg(P)));
    }
    p.code.push_back(make3(Opcode::Sub, S, reg(1), imm(2)));
    p.code.push_back(make3(Opcode::Mod, 0, reg(P), reg(S)));
    p.code.push_back(make_halt());
    return p;
}

// Plan for the general tower, bottom-up: the smallest draw bounds the final
// result, every other draw bounds the largest power taken of its successor.
inline ExponentPlan general_tower_plan(unsigned x, unsigned cap = kGeneralTowerCapDefault) {
    using namespace progdetail;
    if (x < 1) throw std::invalid_argument("general tower parameter must be >= 1");
    if (x > cap)
        throw cap_refusal("general tower plan for x=" + std::to_string(x) +
                          " exceeds the cap of " + std::to_string(cap));
    std::vector<unsigned long> m = general_tower_milestones(x);
    const std::size_t k = m.size();
    ExponentPlan plan;
    plan.x = x;
    plan.exponents.resize(k);
    // e_1 covers the final value 2^(2^x); e_(t+1) covers A_t^(m_(t+1)^2).
    plan.exponents[0] = checked_add(m.back(), 2, "general tower plan");
    for (std::size_t t = 1; t < k; ++t) {
        // entry exponent at the transition from level t+1 to level t is the
        // milestone recorded while sitting at level t+1, i.e. m[k-1-t].
        unsigned long entry = m[k - 1 - t];
        unsigned long sq = checked_mul(entry, entry, "general tower plan");
        plan.exponents[t] =
            checked_add(checked_mul(plan.exponents[t - 1], sq, "general tower plan"), 1,
                        "general tower plan");
    }
    return plan;
}

// ---- padding ----

// (2*inp + 1) * 2^T: odd payload followed by T zero bits. Grows the bit
// length by exactly T + 1, which is what makes run-times shrink relative to
// the padded input size.
inline Value pad_input(const Value& inp, unsigned long t) {
    mpz_class payload = inp.mpz() * 2 + 1;
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), payload.get_mpz_t(), t);
    return Value(std::move(r));
}

struct Unpadded {
    Value input;
    unsigned long padding = 0;

    friend bool operator==(const Unpadded&, const Unpadded&) = default;
};

inline Unpadded unpad_input(const Value& padded) {
    if (padded.is_zero())
        throw std::invalid_argument("cannot unpad zero: no odd part");
    unsigned long t = padded.trailing_zeros();
    mpz_class odd;
    mpz_fdiv_q_2exp(odd.get_mpz_t(), padded.mpz().get_mpz_t(), t);
    return Unpadded{Value(mpz_class((odd - 1) / 2)), t};
}

}  // namespace asram
