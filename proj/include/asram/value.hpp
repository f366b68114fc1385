#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "asram/fault.hpp"

namespace asram {

// Unbounded nonnegative integer. The only scalar the machine ever holds:
// register contents, register addresses and immediates are all Values.
// There is no operator-; use monus(), which clamps at zero.
class Value {
public:
    Value() = default;
    Value(unsigned long v) : n_(v) {}
    Value(int v) : n_(v) {
        if (v < 0) throw std::invalid_argument("Value cannot be negative");
    }
    explicit Value(mpz_class z) : n_(std::move(z)) {
        if (sgn(n_) < 0) throw std::invalid_argument("Value cannot be negative");
    }

    static Value pow2(unsigned long e) {
        Value v;
        mpz_setbit(v.n_.get_mpz_t(), e);
        return v;
    }

    // Accepts decimal, 0x-prefixed hex, or 2^<e> with e in decimal.
    static std::optional<Value> parse(std::string_view text);

    const mpz_class& mpz() const { return n_; }

    bool is_zero() const { return sgn(n_) == 0; }

    // Bit length; zero has zero bits.
    std::size_t bits() const {
        return is_zero() ? 0 : mpz_sizeinbase(n_.get_mpz_t(), 2);
    }

    // e such that *this == 2^e, if the value is an exact power of two.
    std::optional<unsigned long> pow2_exponent() const {
        if (is_zero()) return std::nullopt;
        unsigned long low = mpz_scan1(n_.get_mpz_t(), 0);
        if (low + 1 == bits()) return low;
        return std::nullopt;
    }

    unsigned long trailing_zeros() const {
        if (is_zero()) return 0;
        return mpz_scan1(n_.get_mpz_t(), 0);
    }

    bool fits_ulong() const { return n_.fits_ulong_p(); }
    unsigned long to_ulong() const { return n_.get_ui(); }
    std::string to_decimal() const { return n_.get_str(); }

    friend bool operator==(const Value& a, const Value& b) {
        return mpz_cmp(a.n_.get_mpz_t(), b.n_.get_mpz_t()) == 0;
    }
    friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
        int c = mpz_cmp(a.n_.get_mpz_t(), b.n_.get_mpz_t());
        return c <=> 0;
    }

private:
    mpz_class n_;
};

inline std::optional<Value> Value::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    mpz_class z;
    if (text.size() > 2 && text.substr(0, 2) == "2^") {
        std::string e(text.substr(2));
        if (e.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
        try {
            unsigned long exp = std::stoul(e);
            return Value::pow2(exp);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    int base = 10;
    std::string digits(text);
    if (text.size() > 2 && (text.substr(0, 2) == "0x" || text.substr(0, 2) == "0X")) {
        base = 16;
        digits = std::string(text.substr(2));
        if (digits.empty()) return std::nullopt;
    }
    if (mpz_set_str(z.get_mpz_t(), digits.c_str(), base) != 0) return std::nullopt;
    if (sgn(z) < 0) return std::nullopt;
    return Value(std::move(z));
}

// ---- primitive scalar operations, one machine cost unit each ----

inline Value add(const Value& a, const Value& b) {
    return Value(mpz_class(a.mpz() + b.mpz()));
}

// max(a-b, 0)
inline Value monus(const Value& a, const Value& b) {
    if (a <= b) return Value();
    return Value(mpz_class(a.mpz() - b.mpz()));
}

namespace detail {
inline Value shift_left(const Value& a, unsigned long e) {
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), a.mpz().get_mpz_t(), e);
    return Value(std::move(r));
}
}  // namespace detail

inline Value mul(const Value& a, const Value& b) {
    if (a.is_zero() || b.is_zero()) return Value();
    // Power-of-two operands reduce to shifts; this matters when register
    // contents are hundreds of megabits.
    if (auto e = a.pow2_exponent()) return detail::shift_left(b, *e);
    if (auto e = b.pow2_exponent()) return detail::shift_left(a, *e);
    return Value(mpz_class(a.mpz() * b.mpz()));
}

// floor(a/b); faults on zero divisor
inline Value int_div(const Value& a, const Value& b) {
    if (b.is_zero()) throw machine_fault(Fault::DivByZero, "division by zero");
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), a.mpz().get_mpz_t(), b.mpz().get_mpz_t());
    return Value(std::move(r));
}

// a/b, defined only when b divides a
inline Value exact_div(const Value& a, const Value& b) {
    if (b.is_zero()) throw machine_fault(Fault::ExactDivByZero, "exact division by zero");
    if (!mpz_divisible_p(a.mpz().get_mpz_t(), b.mpz().get_mpz_t()))
        throw machine_fault(Fault::ExactDivRemainder, "exact division with remainder");
    mpz_class r;
    mpz_divexact(r.get_mpz_t(), a.mpz().get_mpz_t(), b.mpz().get_mpz_t());
    return Value(std::move(r));
}

inline Value mod(const Value& a, const Value& b) {
    if (b.is_zero()) throw machine_fault(Fault::ModByZero, "modulus by zero");
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.mpz().get_mpz_t(), b.mpz().get_mpz_t());
    return Value(std::move(r));
}

// a * 2^b
inline Value lshift(const Value& a, const Value& b) {
    if (a.is_zero()) return Value();
    if (!b.fits_ulong())
        throw machine_fault(Fault::MemLimit, "shift amount exceeds any representable size");
    return detail::shift_left(a, b.to_ulong());
}

inline Value bit_and(const Value& a, const Value& b) {
    return Value(mpz_class(a.mpz() & b.mpz()));
}

inline Value bit_or(const Value& a, const Value& b) {
    return Value(mpz_class(a.mpz() | b.mpz()));
}

inline Value bit_xor(const Value& a, const Value& b) {
    return Value(mpz_class(a.mpz() ^ b.mpz()));
}

inline Value operator+(const Value& a, const Value& b) { return add(a, b); }
inline Value operator*(const Value& a, const Value& b) { return mul(a, b); }

}  // namespace asram
