#include "doctest.h"

#include "asram/value.hpp"

#include "helpers.hpp"

using namespace asram;

TEST_CASE("monus clamps at zero") {
    CHECK(monus(Value(5), Value(3)) == Value(2));
    CHECK(monus(Value(3), Value(5)) == Value(0));
    CHECK(monus(Value(0), Value(0)) == Value(0));
}

TEST_CASE("monus is zero exactly when a <= b") {
    testutil::Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        Value a = rng.value_bits(96);
        Value b = rng.value_bits(96);
        CHECK(monus(a, b).is_zero() == (a <= b));
    }
}

TEST_CASE("integer division floors") {
    CHECK(int_div(Value(7), Value(2)) == Value(3));
    CHECK(int_div(Value(6), Value(3)) == Value(2));
    CHECK(int_div(Value(0), Value(5)) == Value(0));
}

TEST_CASE("division faults carry distinct codes") {
    CHECK_THROWS_WITH_AS(int_div(Value(1), Value(0)), "division by zero", machine_fault);
    CHECK_THROWS_AS(mod(Value(1), Value(0)), machine_fault);
    try {
        exact_div(Value(7), Value(2));
        FAIL("expected a fault");
    } catch (const machine_fault& f) {
        CHECK(f.code() == Fault::ExactDivRemainder);
    }
    try {
        exact_div(Value(7), Value(0));
        FAIL("expected a fault");
    } catch (const machine_fault& f) {
        CHECK(f.code() == Fault::ExactDivByZero);
    }
    try {
        int_div(Value(7), Value(0));
        FAIL("expected a fault");
    } catch (const machine_fault& f) {
        CHECK(f.code() == Fault::DivByZero);
    }
}

TEST_CASE("exact division") {
    CHECK(exact_div(Value(48), Value(6)) == Value(8));
    CHECK(exact_div(Value(0), Value(3)) == Value(0));
}

TEST_CASE("exact division agrees with integer division when divisible") {
    testutil::Rng rng(12);
    for (int i = 0; i < 300; ++i) {
        Value q = rng.value_bits(64);
        Value b = add(rng.value_bits(64), Value(1));
        Value a = mul(q, b);
        CHECK(exact_div(a, b) == int_div(a, b));
    }
}

TEST_CASE("mod") {
    CHECK(mod(Value(4096), Value(62)) == Value(4));
    CHECK(mod(Value(10), Value(5)) == Value(0));
    CHECK(mod(Value(3), Value(7)) == Value(3));
}

TEST_CASE("euclidean identity on random pairs") {
    testutil::Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        Value a = rng.value_bits(160);
        Value b = add(rng.value_bits(80), Value(1));
        Value q = int_div(a, b);
        Value r = mod(a, b);
        CHECK(add(mul(b, q), r) == a);
        CHECK(r < b);
    }
}

TEST_CASE("left shift") {
    CHECK(lshift(Value(3), Value(4)) == Value(48));
    CHECK(lshift(Value(1), Value(0)) == Value(1));
    CHECK(lshift(Value(0), Value(100)) == Value(0));
}

TEST_CASE("left shift equals repeated doubling for small shifts") {
    testutil::Rng rng(14);
    for (int i = 0; i < 20; ++i) {
        Value a = rng.value_bits(96);
        Value doubled = a;
        for (unsigned long b = 0; b <= 64; ++b) {
            CHECK(lshift(a, Value(b)) == doubled);
            doubled = add(doubled, doubled);
        }
    }
}

namespace {
// Bit-by-bit reference combiner, independent of the gmp logical ops.
Value reference_bool(char kind, const Value& a, const Value& b) {
    mpz_class r = 0;
    std::size_t n = std::max(a.bits(), b.bits());
    for (std::size_t i = 0; i < n; ++i) {
        int x = mpz_tstbit(a.mpz().get_mpz_t(), i);
        int y = mpz_tstbit(b.mpz().get_mpz_t(), i);
        int bit = kind == '&' ? (x & y) : kind == '|' ? (x | y) : (x ^ y);
        if (bit) mpz_setbit(r.get_mpz_t(), i);
    }
    return Value(r);
}
}  // namespace

TEST_CASE("boolean ops") {
    CHECK(bit_and(Value(12), Value(10)) == Value(8));
    CHECK(bit_or(Value(12), Value(10)) == Value(14));
    testutil::Rng rng(15);
    Value x = rng.value_bits(300);
    CHECK(bit_xor(x, x) == Value(0));
}

TEST_CASE("boolean ops agree with the bit-by-bit reference") {
    testutil::Rng rng(16);
    for (int i = 0; i < 1000; ++i) {
        Value a = rng.value_bits(4096);
        Value b = rng.value_bits(4096);
        CHECK(bit_and(a, b) == reference_bool('&', a, b));
        CHECK(bit_or(a, b) == reference_bool('|', a, b));
        CHECK(bit_xor(a, b) == reference_bool('^', a, b));
    }
}

TEST_CASE("mul power-of-two fast path stays exact") {
    testutil::Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        Value a = rng.value_bits(128);
        unsigned long e = rng.below(200);
        Value p = Value::pow2(e);
        mpz_class expect = a.mpz() << e;
        CHECK(mul(a, p) == Value(expect));
        CHECK(mul(p, a) == Value(expect));
    }
}

TEST_CASE("value parsing and rendering") {
    CHECK(*Value::parse("12345") == Value(12345));
    CHECK(*Value::parse("0xff") == Value(255));
    CHECK(*Value::parse("2^10") == Value(1024));
    CHECK(!Value::parse(""));
    CHECK(!Value::parse("12a"));
    CHECK(!Value::parse("2^"));
    CHECK(!Value::parse("-5"));
    Value big = *Value::parse("123456789012345678901234567890123456789012345678901234567890");
    CHECK(big.to_decimal() ==
          "123456789012345678901234567890123456789012345678901234567890");
}

TEST_CASE("rendering switches to power or bit-length form past the threshold") {
    CHECK(render_value(Value(65536)) == "65536");
    CHECK(render_value(Value::pow2(512)) == "2^512");  // 513 bits, past the threshold
    CHECK(render_value(Value::pow2(511)) == Value::pow2(511).to_decimal());
    Value big = add(Value::pow2(600), Value(1));
    CHECK(render_value(big) == "[601 bits]");
    CHECK(preview_value(Value(12345), 24) == "12345");
    std::string p = preview_value(Value::pow2(400), 10);
    CHECK(p.size() < 40);
    CHECK(p.find("digits") != std::string::npos);
    CHECK(preview_value(Value::pow2(100000), 10) == "2^100000");
}

TEST_CASE("bit length and power-of-two detection") {
    CHECK(Value(0).bits() == 0);
    CHECK(Value(1).bits() == 1);
    CHECK(Value(255).bits() == 8);
    CHECK(Value::pow2(73).bits() == 74);
    CHECK(*Value::pow2(73).pow2_exponent() == 73);
    CHECK(!Value(6).pow2_exponent());
    CHECK(Value(96).trailing_zeros() == 5);
}
