#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asram/fault.hpp"
#include "asram/isa.hpp"
#include "asram/render.hpp"
#include "asram/value.hpp"

namespace asram {

// Unit-cost interpreter. Every instruction, including ALN and HALT, costs
// exactly one step. R[0] holds the input at start and the output at halt;
// all other registers start at zero. A run that faults or runs out of fuel
// reports output zero, which in acceptor terms means rejection.

inline constexpr unsigned long kDefaultFuel = 1'000'000;
inline constexpr std::size_t kDefaultMemBits = std::size_t(1) << 30;  // per-value bit ceiling

enum class Status { Running, Halted, Fault, FuelExhausted };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::Running: return "running";
        case Status::Halted: return "halted";
        case Status::Fault: return "fault";
        case Status::FuelExhausted: return "fuel_exhausted";
    }
    return "?";
}

struct TraceEvent {
    unsigned long step = 0;                 // 1-based
    std::size_t pc = 0;
    Opcode op = Opcode::Halt;
    std::size_t dst_bits = 0;               // bit length of the value written, 0 if none
    std::optional<std::size_t> draw_index;  // set for ALN, 0-based
    std::string preview;                    // truncated rendering of the written value

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// What an oracle is allowed to see when asked for the next draw: everything
// that happened earlier in the run, summarised.
struct DrawHistory {
    std::size_t draw_count = 0;   // draws made so far
    std::size_t max_bits = 0;     // largest bit-length observed in any register so far
    std::size_t bit_ceiling = 0;  // per-value guard; oracles must not materialise past it
};

using DrawFn = std::function<Value(const DrawHistory&)>;

struct RunLimits {
    unsigned long fuel = kDefaultFuel;
    std::size_t mem_bits = kDefaultMemBits;
    bool trace = false;
    std::size_t preview_width = 24;
};

struct MachineState {
    std::map<Value, Value> registers;  // sparse; absent means zero
    std::size_t pc = 0;
    unsigned long steps = 0;
    std::vector<Value> aln_draws;      // append-only
    Status status = Status::Running;
    std::optional<Fault> fault;
    std::size_t max_bits = 0;          // monotone; includes the input

    const Value& reg(const Value& idx) const {
        static const Value zero;
        auto it = registers.find(idx);
        return it == registers.end() ? zero : it->second;
    }
};

struct RunOutcome {
    Value output;                   // R[0] at halt; zero on fault or fuel exhaustion
    bool accepted = false;          // output != 0
    Status status = Status::Running;
    std::optional<Fault> fault;
    unsigned long steps = 0;
    std::vector<Value> aln_draws;
    std::vector<TraceEvent> trace;  // populated only when tracing was enabled
};

inline MachineState init_state(const Value& input) {
    MachineState st;
    if (!input.is_zero()) st.registers.emplace(Value(0), input);
    st.max_bits = input.bits();
    return st;
}

namespace vmdetail {

inline void write_reg(MachineState& st, const Value& idx, Value v, std::size_t ceiling) {
    if (v.bits() > ceiling)
        throw machine_fault(Fault::MemLimit, "value exceeds the memory ceiling");
    if (v.bits() > st.max_bits) st.max_bits = v.bits();
    st.registers[idx] = std::move(v);
}

inline Value fetch(const MachineState& st, const Operand& o) {
    switch (o.mode) {
        case AddrMode::Imm: return o.value;
        case AddrMode::Reg: return st.reg(o.value);
        case AddrMode::Ind: return st.reg(st.reg(o.value));
    }
    return Value();
}

// Predicted result sizes for the two opcodes able to jump from small
// operands to astronomically wide results; everything else is caught by the
// post-write check.
inline void guard_shl(const Value& a, const Value& b, std::size_t ceiling) {
    if (a.is_zero()) return;
    if (!b.fits_ulong() || a.bits() + b.to_ulong() > ceiling)
        throw machine_fault(Fault::MemLimit, "shift result exceeds the memory ceiling");
}

inline void guard_mul(const Value& a, const Value& b, std::size_t ceiling) {
    if (a.is_zero() || b.is_zero()) return;
    if (a.bits() + b.bits() > ceiling + 1)
        throw machine_fault(Fault::MemLimit, "product exceeds the memory ceiling");
}

}  // namespace vmdetail

// Executes exactly one instruction. Preconditions: status is Running and pc
// indexes into the program.
inline void step(MachineState& st, const Program& p, const DrawFn& draw,
                 const RunLimits& limits, std::vector<TraceEvent>* trace) {
    const Instruction& ins = p.code[st.pc];
    ++st.steps;

    TraceEvent ev;
    ev.step = st.steps;
    ev.pc = st.pc;
    ev.op = ins.op;

    const std::size_t ceiling = limits.mem_bits;
    auto record_write = [&](const Value& idx, Value v) {
        vmdetail::write_reg(st, idx, std::move(v), ceiling);
        if (trace) {
            const Value& w = st.reg(idx);
            ev.dst_bits = w.bits();
            ev.preview = preview_value(w, limits.preview_width);
        }
    };

    std::size_t next_pc = st.pc + 1;
    try {
        switch (ins.op) {
            case Opcode::Add:
            case Opcode::Sub:
            case Opcode::Mul:
            case Opcode::Div:
            case Opcode::Exd:
            case Opcode::Mod:
            case Opcode::Shl:
            case Opcode::And:
            case Opcode::Or:
            case Opcode::Xor: {
                Value a = vmdetail::fetch(st, *ins.src1);
                Value b = vmdetail::fetch(st, *ins.src2);
                Value r;
                switch (ins.op) {
                    case Opcode::Add: r = add(a, b); break;
                    case Opcode::Sub: r = monus(a, b); break;
                    case Opcode::Mul:
                        vmdetail::guard_mul(a, b, ceiling);
                        r = mul(a, b);
                        break;
                    case Opcode::Div: r = int_div(a, b); break;
                    case Opcode::Exd: r = exact_div(a, b); break;
                    case Opcode::Mod: r = mod(a, b); break;
                    case Opcode::Shl:
                        vmdetail::guard_shl(a, b, ceiling);
                        r = lshift(a, b);
                        break;
                    case Opcode::And: r = bit_and(a, b); break;
                    case Opcode::Or: r = bit_or(a, b); break;
                    default: r = bit_xor(a, b); break;
                }
                record_write(*ins.dst, std::move(r));
                break;
            }
            case Opcode::Set:
            case Opcode::Mov:
                record_write(*ins.dst, vmdetail::fetch(st, *ins.src1));
                break;
            case Opcode::Ldi: {
                const Value& addr = st.reg(ins.src1->value);
                record_write(*ins.dst, st.reg(addr));
                break;
            }
            case Opcode::Sti: {
                const Value& addr = st.reg(ins.src1->value);
                record_write(addr, st.reg(ins.src2->value));
                break;
            }
            case Opcode::Jmp:
                next_pc = *ins.target;
                break;
            case Opcode::Jeq:
                if (st.reg(ins.src1->value) == st.reg(ins.src2->value)) next_pc = *ins.target;
                break;
            case Opcode::Aln: {
                DrawHistory h{st.aln_draws.size(), st.max_bits, ceiling};
                Value drawn = draw(h);
                if (trace) ev.draw_index = st.aln_draws.size();
                st.aln_draws.push_back(drawn);
                record_write(*ins.dst, std::move(drawn));
                break;
            }
            case Opcode::Halt:
                st.status = Status::Halted;
                break;
        }
    } catch (const machine_fault& f) {
        st.status = Status::Fault;
        st.fault = f.code();
    }

    if (st.status == Status::Running) st.pc = next_pc;
    if (trace) trace->push_back(std::move(ev));
}

// Runs to halt, fault or fuel exhaustion. Falling off the end of the program
// halts without costing a step.
inline RunOutcome run(const Program& p, const Value& input, const DrawFn& draw,
                      const RunLimits& limits = {}) {
    MachineState st = init_state(input);
    std::vector<TraceEvent> trace;
    while (st.status == Status::Running) {
        if (st.pc >= p.code.size()) {
            st.status = Status::Halted;
            break;
        }
        if (st.steps >= limits.fuel) {
            st.status = Status::FuelExhausted;
            break;
        }
        step(st, p, draw, limits, limits.trace ? &trace : nullptr);
    }

    RunOutcome out;
    out.status = st.status;
    out.fault = st.fault;
    out.steps = st.steps;
    out.aln_draws = std::move(st.aln_draws);
    out.trace = std::move(trace);
    if (st.status == Status::Halted) out.output = st.reg(Value(0));
    out.accepted = !out.output.is_zero();
    return out;
}

inline bool run_acceptor(const Program& p, const Value& input, const DrawFn& draw,
                         const RunLimits& limits = {}) {
    return run(p, input, draw, limits).accepted;
}

// A draw source for programs that never call ALN().
inline DrawFn no_draws() {
    return [](const DrawHistory&) -> Value {
        throw machine_fault(Fault::OracleExhausted, "program drew from an empty oracle");
    };
}

}  // namespace asram
