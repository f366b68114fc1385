#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "asram/fault.hpp"
#include "asram/value.hpp"
#include "asram/verdict.hpp"
#include "asram/vm.hpp"

namespace asram {

// Oracle families are the operational stand-in for "each draw is arbitrary,
// subject to being large enough": parameterised generators whose draws grow
// without bound as the scale parameter grows.
//
//   POW2_SCHEDULE   draws 2^e with e = s*(1 + max bits seen so far) + 1;
//                   sized from the run history, so each draw strictly
//                   dominates everything observed before it.
//   FIXED_LIST      exactly the listed values, then a fault. Test fixture,
//                   and the way to model a machine with a draw budget.
//   EXPONENT_PLAN   draws 2^(s*e_i) from an explicit exponent list;
//                   programs that take all their draws up front need a plan
//                   because history-based sizing cannot see what is coming.
//   JITTERED_POW2   POW2_SCHEDULE plus a small additive term, for refuting
//                   programs whose output depends on low-order draw bits.

enum class OracleKind { Pow2Schedule, FixedList, ExponentPlan, JitteredPow2 };

struct OracleFamily {
    OracleKind kind = OracleKind::Pow2Schedule;
    unsigned long scale = 1;                 // s; escalation raises it
    std::vector<Value> draws;                // FixedList
    std::vector<unsigned long> exponents;    // ExponentPlan, unscaled
    std::vector<unsigned long> jitter;       // JitteredPow2 additive terms
    std::size_t jitter_index = 0;            // which jitter term this instance applies
};

namespace oracledetail {

inline unsigned long checked_mul(unsigned long a, unsigned long b) {
    unsigned long r;
    if (__builtin_mul_overflow(a, b, &r))
        throw machine_fault(Fault::MemLimit, "scaled exponent overflows");
    return r;
}

inline Value pow2_guarded(unsigned long e, std::size_t ceiling) {
    if (e >= ceiling)
        throw machine_fault(Fault::MemLimit, "draw exceeds the memory ceiling");
    return Value::pow2(e);
}

}  // namespace oracledetail

// Next draw as a pure function of the family and the run history.
inline Value next_draw(const OracleFamily& f, const DrawHistory& h) {
    switch (f.kind) {
        case OracleKind::FixedList:
            if (h.draw_count >= f.draws.size())
                throw machine_fault(Fault::OracleExhausted, "fixed draw list exhausted");
            return f.draws[h.draw_count];
        case OracleKind::ExponentPlan: {
            if (h.draw_count >= f.exponents.size())
                throw machine_fault(Fault::OracleExhausted, "exponent plan exhausted");
            unsigned long e =
                oracledetail::checked_mul(f.exponents[h.draw_count], f.scale);
            return oracledetail::pow2_guarded(e, h.bit_ceiling);
        }
        case OracleKind::Pow2Schedule:
        case OracleKind::JitteredPow2: {
            // exponent strictly greater than s * (1 + largest bit-length seen)
            unsigned long e = oracledetail::checked_mul(f.scale, 1 + h.max_bits);
            if (e == static_cast<unsigned long>(-1))
                throw machine_fault(Fault::MemLimit, "draw exponent overflows");
            e += 1;
            Value v = oracledetail::pow2_guarded(e, h.bit_ceiling);
            if (f.kind == OracleKind::JitteredPow2 && !f.jitter.empty())
                v = add(v, Value(f.jitter[f.jitter_index % f.jitter.size()]));
            return v;
        }
    }
    throw std::logic_error("unreachable oracle kind");
}

inline DrawFn make_draw_fn(OracleFamily family) {
    return [family = std::move(family)](const DrawHistory& h) { return next_draw(family, h); };
}

// ---- oracle spec mini-language ----
//
//   pow2:s=3
//   fixed:@draws.txt          one decimal or 2^<e> literal per line
//   plan:@tower.plan          2^<e> (or a power-of-two decimal) per line
//   jitter:s=3,j=0|1|2|3

inline std::vector<Value> load_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open draw file '" + path + "'");
    std::vector<Value> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos || line[a] == '#') continue;
        std::size_t b = line.find_last_not_of(" \t");
        auto v = Value::parse(std::string_view(line).substr(a, b - a + 1));
        if (!v)
            throw std::invalid_argument("bad literal in '" + path + "' line " +
                                        std::to_string(lineno));
        values.push_back(*v);
    }
    return values;
}

inline OracleFamily parse_oracle_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

    OracleFamily f;
    auto parse_params = [&](bool allow_jitter) {
        std::stringstream ss(rest);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part.rfind("s=", 0) == 0) {
                try {
                    f.scale = std::stoul(part.substr(2));
                } catch (const std::exception&) {
                    throw std::invalid_argument("bad scale in oracle spec '" + spec + "'");
                }
                if (f.scale == 0) throw std::invalid_argument("oracle scale must be positive");
            } else if (allow_jitter && part.rfind("j=", 0) == 0) {
                std::stringstream js(part.substr(2));
                std::string item;
                while (std::getline(js, item, '|')) {
                    try {
                        f.jitter.push_back(std::stoul(item));
                    } catch (const std::exception&) {
                        throw std::invalid_argument("bad jitter list in oracle spec '" + spec + "'");
                    }
                }
            } else if (!part.empty()) {
                throw std::invalid_argument("unknown oracle parameter '" + part + "'");
            }
        }
    };

    if (kind == "pow2") {
        f.kind = OracleKind::Pow2Schedule;
        parse_params(false);
    } else if (kind == "jitter") {
        f.kind = OracleKind::JitteredPow2;
        parse_params(true);
        if (f.jitter.empty()) throw std::invalid_argument("jitter oracle needs j=...");
    } else if (kind == "fixed" || kind == "plan") {
        if (rest.empty() || rest[0] != '@')
            throw std::invalid_argument(kind + " oracle needs @<file>");
        std::vector<Value> values = load_value_file(rest.substr(1));
        if (kind == "fixed") {
            f.kind = OracleKind::FixedList;
            f.draws = std::move(values);
        } else {
            f.kind = OracleKind::ExponentPlan;
            for (const Value& v : values) {
                auto e = v.pow2_exponent();
                if (!e)
                    throw std::invalid_argument("plan entries must be powers of two (2^e)");
                f.exponents.push_back(*e);
            }
        }
    } else {
        throw std::invalid_argument("unknown oracle kind '" + kind + "'");
    }
    return f;
}

inline std::string oracle_spec_string(const OracleFamily& f) {
    switch (f.kind) {
        case OracleKind::Pow2Schedule: return "pow2:s=" + std::to_string(f.scale);
        case OracleKind::FixedList: return "fixed:<" + std::to_string(f.draws.size()) + " draws>";
        case OracleKind::ExponentPlan:
            return "plan:<" + std::to_string(f.exponents.size()) + " exponents>,s=" +
                   std::to_string(f.scale);
        case OracleKind::JitteredPow2: {
            std::string j;
            for (std::size_t i = 0; i < f.jitter.size(); ++i)
                j += (i ? "|" : "") + std::to_string(f.jitter[i]);
            return "jitter:s=" + std::to_string(f.scale) + ",j=" + j;
        }
    }
    return "?";
}

// ---- escalation and stabilisation ----

// Runs a program once per scale; the verdict is judged on the final
// `confirmations` runs. Agreement there is evidence that the draws became
// large enough, never proof.
struct EscalationSchedule {
    std::vector<unsigned long> scales;  // strictly increasing
    unsigned confirmations = 3;         // >= 2

    static EscalationSchedule standard() { return {{1, 2, 4, 8, 16, 32}, 3}; }
};

struct ScaleEvidence {
    unsigned long scale = 0;
    std::size_t run_ordinal = 0;
    RunOutcome outcome;
};

struct StabilizationVerdict {
    VerdictKind kind = VerdictKind::Unstable;
    Value value;                   // stabilised output when kind == Stabilized
    unsigned long steps_max = 0;   // max steps over every run: empirical lower
                                   // bound on the worst-case run-time
    std::vector<ScaleEvidence> evidence;
};

namespace oracledetail {
inline bool is_resource_outcome(const RunOutcome& o) {
    if (o.status == Status::FuelExhausted) return true;
    return o.status == Status::Fault && o.fault && is_resource_fault(*o.fault);
}
}  // namespace oracledetail

inline StabilizationVerdict stabilization_check(const Program& p, const Value& input,
                                                const EscalationSchedule& schedule,
                                                const OracleFamily& family_template,
                                                const RunLimits& limits = {}) {
    if (schedule.scales.empty())
        throw std::invalid_argument("escalation schedule must be nonempty");
    if (schedule.confirmations < 2)
        throw std::invalid_argument("confirmations must be at least 2");
    StabilizationVerdict verdict;
    for (std::size_t i = 0; i < schedule.scales.size(); ++i) {
        OracleFamily f = family_template;
        f.scale = schedule.scales[i];
        f.jitter_index = i;  // jittered families cycle their additive term per run
        RunOutcome outcome = run(p, input, make_draw_fn(std::move(f)), limits);
        verdict.steps_max = std::max(verdict.steps_max, outcome.steps);
        verdict.evidence.push_back({schedule.scales[i], i, std::move(outcome)});
    }

    const std::size_t n = verdict.evidence.size();
    const std::size_t c = schedule.confirmations;
    if (n < c) {
        verdict.kind = VerdictKind::Unstable;  // not enough runs to confirm anything
        return verdict;
    }
    bool resource = false;
    bool agree = true;
    const RunOutcome& last = verdict.evidence[n - 1].outcome;
    for (std::size_t i = n - c; i < n; ++i) {
        const RunOutcome& o = verdict.evidence[i].outcome;
        if (oracledetail::is_resource_outcome(o)) resource = true;
        if (!(o.output == last.output)) agree = false;
    }
    if (resource) {
        verdict.kind = VerdictKind::ResourceExceeded;
    } else if (agree) {
        verdict.kind = VerdictKind::Stabilized;
        verdict.value = last.output;
    } else {
        verdict.kind = VerdictKind::Unstable;
    }
    return verdict;
}

}  // namespace asram
