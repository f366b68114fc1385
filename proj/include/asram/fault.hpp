#pragma once

#include <stdexcept>
#include <string>

namespace asram {

// Why a run died. Semantic faults are part of machine behaviour: a faulting
// run yields output zero, exactly like a non-terminating one. Resource
// faults come from the host guard rails (bit ceiling, draw supply), not
// from the machine semantics.
enum class Fault {
    DivByZero,
    ModByZero,
    ExactDivByZero,
    ExactDivRemainder,
    MemLimit,         // a value outgrew the per-value bit ceiling
    OracleExhausted,  // fixed draw list or exponent plan ran out
};

inline const char* fault_name(Fault f) {
    switch (f) {
        case Fault::DivByZero:         return "DIV_BY_ZERO";
        case Fault::ModByZero:         return "MOD_BY_ZERO";
        case Fault::ExactDivByZero:    return "EXACT_DIV_BY_ZERO";
        case Fault::ExactDivRemainder: return "EXACT_DIV_REMAINDER";
        case Fault::MemLimit:          return "MEM_LIMIT";
        case Fault::OracleExhausted:   return "ORACLE_EXHAUSTED";
    }
    return "UNKNOWN";
}

inline bool is_resource_fault(Fault f) {
    return f == Fault::MemLimit || f == Fault::OracleExhausted;
}

class machine_fault : public std::runtime_error {
public:
    machine_fault(Fault code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Fault code() const noexcept { return code_; }

private:
    Fault code_;
};

}  // namespace asram
