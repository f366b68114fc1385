#pragma once

#include <gmpxx.h>

#include <string>

#include "asram/asm.hpp"
#include "asram/value.hpp"
#include "asram/vm.hpp"

namespace testutil {

// Deterministic big-integer randomness for property tests.
class Rng {
public:
    explicit Rng(unsigned long seed) { rand_.seed(seed); }

    asram::Value value_bits(unsigned long max_bits) {
        mpz_class z = rand_.get_z_bits(max_bits);
        return asram::Value(z);
    }

    // uniform in [0, bound)
    unsigned long below(unsigned long bound) {
        mpz_class z = rand_.get_z_range(mpz_class(bound));
        return z.get_ui();
    }

private:
    gmp_randclass rand_{gmp_randinit_mt};
};

inline asram::Program parse_or_die(const std::string& text) {
    asram::ParseResult r = asram::parse_program(text);
    if (!r.ok()) {
        std::string msg = "parse failed:";
        for (const auto& d : r.diagnostics)
            msg += " [" + std::to_string(d.line) + ":" + std::to_string(d.col) + "] " + d.message;
        throw std::runtime_error(msg);
    }
    return *r.program;
}

inline asram::DrawFn fixed_draws(std::vector<asram::Value> draws) {
    return [draws = std::move(draws)](const asram::DrawHistory& h) {
        if (h.draw_count >= draws.size())
            throw asram::machine_fault(asram::Fault::OracleExhausted, "test draws exhausted");
        return draws[h.draw_count];
    };
}

}  // namespace testutil
