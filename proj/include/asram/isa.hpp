#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asram/value.hpp"

namespace asram {

// SUB is monus, DIV is flooring division, EXD faults unless the division is
// exact, SHL computes a * 2^b. Every opcode costs one time unit.
enum class Opcode {
    Add, Sub, Mul, Div, Exd, Mod,
    Shl, And, Or, Xor,
    Set, Mov, Ldi, Sti,
    Jmp, Jeq,
    Aln,
    Halt,
};

inline constexpr std::size_t kOpcodeCount = 18;

inline std::string_view mnemonic(Opcode op) {
    switch (op) {
        case Opcode::Add: return "ADD";
        case Opcode::Sub: return "SUB";
        case Opcode::Mul: return "MUL";
        case Opcode::Div: return "DIV";
        case Opcode::Exd: return "EXD";
        case Opcode::Mod: return "MOD";
        case Opcode::Shl: return "SHL";
        case Opcode::And: return "AND";
        case Opcode::Or:  return "OR";
        case Opcode::Xor: return "XOR";
        case Opcode::Set: return "SET";
        case Opcode::Mov: return "MOV";
        case Opcode::Ldi: return "LDI";
        case Opcode::Sti: return "STI";
        case Opcode::Jmp: return "JMP";
        case Opcode::Jeq: return "JEQ";
        case Opcode::Aln: return "ALN";
        case Opcode::Halt: return "HALT";
    }
    return "?";
}

inline std::optional<Opcode> opcode_from_mnemonic(std::string_view text) {
    std::string up;
    up.reserve(text.size());
    for (char c : text) up.push_back(static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c));
    static const std::array<Opcode, kOpcodeCount> all = {
        Opcode::Add, Opcode::Sub, Opcode::Mul, Opcode::Div, Opcode::Exd, Opcode::Mod,
        Opcode::Shl, Opcode::And, Opcode::Or,  Opcode::Xor,
        Opcode::Set, Opcode::Mov, Opcode::Ldi, Opcode::Sti,
        Opcode::Jmp, Opcode::Jeq, Opcode::Aln, Opcode::Halt,
    };
    for (Opcode op : all)
        if (mnemonic(op) == up) return op;
    return std::nullopt;
}

enum class AddrMode { Reg, Ind, Imm };

// A source operand: register-direct r<k>, register-indirect @r<k> (reads
// R[R[k]]), or an immediate literal.
struct Operand {
    AddrMode mode = AddrMode::Reg;
    Value value;  // register index for Reg/Ind, the literal itself for Imm

    static Operand reg(Value idx) { return {AddrMode::Reg, std::move(idx)}; }
    static Operand ind(Value idx) { return {AddrMode::Ind, std::move(idx)}; }
    static Operand imm(Value v) { return {AddrMode::Imm, std::move(v)}; }

    friend bool operator==(const Operand&, const Operand&) = default;
};

struct Instruction {
    Opcode op = Opcode::Halt;
    std::optional<Value> dst;             // destination register, always direct
    std::optional<Operand> src1, src2;
    std::optional<std::size_t> target;    // resolved jump target
    std::string target_label;             // textual target, kept for printing

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

// Operand-shape contract per opcode.
enum class SlotKind { None, SrcAny, SrcReg, SrcImm };
struct OpShape {
    bool dst = false;
    SlotKind src1 = SlotKind::None;
    SlotKind src2 = SlotKind::None;
    bool target = false;
};

inline const OpShape& op_shape(Opcode op) {
    static const OpShape arith3{true, SlotKind::SrcAny, SlotKind::SrcAny, false};
    static const OpShape set_{true, SlotKind::SrcImm, SlotKind::None, false};
    static const OpShape mov_{true, SlotKind::SrcReg, SlotKind::None, false};
    static const OpShape ldi_{true, SlotKind::SrcReg, SlotKind::None, false};
    static const OpShape sti_{false, SlotKind::SrcReg, SlotKind::SrcReg, false};
    static const OpShape jmp_{false, SlotKind::None, SlotKind::None, true};
    static const OpShape jeq_{false, SlotKind::SrcReg, SlotKind::SrcReg, true};
    static const OpShape aln_{true, SlotKind::None, SlotKind::None, false};
    static const OpShape halt_{false, SlotKind::None, SlotKind::None, false};
    switch (op) {
        case Opcode::Set: return set_;
        case Opcode::Mov: return mov_;
        case Opcode::Ldi: return ldi_;
        case Opcode::Sti: return sti_;
        case Opcode::Jmp: return jmp_;
        case Opcode::Jeq: return jeq_;
        case Opcode::Aln: return aln_;
        case Opcode::Halt: return halt_;
        default: return arith3;
    }
}

// ---- instruction-set profiles ----

enum class ProfileKind { Arith, ShiftBool, DivShiftBool, Full };

// Control flow, data movement, ALN and HALT are in every profile; a profile
// only selects which computational opcodes a program may use.
class Profile {
public:
    static Profile named(ProfileKind k) { return Profile(k); }

    static std::optional<Profile> from_name(std::string_view name) {
        if (name == "ARITH") return Profile(ProfileKind::Arith);
        if (name == "SHIFT_BOOL") return Profile(ProfileKind::ShiftBool);
        if (name == "DIV_SHIFT_BOOL") return Profile(ProfileKind::DivShiftBool);
        if (name == "FULL") return Profile(ProfileKind::Full);
        return std::nullopt;
    }

    std::string_view name() const {
        switch (kind_) {
            case ProfileKind::Arith: return "ARITH";
            case ProfileKind::ShiftBool: return "SHIFT_BOOL";
            case ProfileKind::DivShiftBool: return "DIV_SHIFT_BOOL";
            case ProfileKind::Full: return "FULL";
        }
        return "?";
    }

    ProfileKind kind() const { return kind_; }

    bool allows(Opcode op) const {
        switch (op) {
            case Opcode::Set: case Opcode::Mov: case Opcode::Ldi: case Opcode::Sti:
            case Opcode::Jmp: case Opcode::Jeq: case Opcode::Aln: case Opcode::Halt:
                return true;
            default: break;
        }
        switch (kind_) {
            case ProfileKind::Full:
                return true;
            case ProfileKind::Arith:
                return op == Opcode::Add || op == Opcode::Sub || op == Opcode::Mul ||
                       op == Opcode::Div || op == Opcode::Mod;
            case ProfileKind::ShiftBool:
                return op == Opcode::Add || op == Opcode::Shl || op == Opcode::And ||
                       op == Opcode::Or || op == Opcode::Xor;
            case ProfileKind::DivShiftBool:
                return op == Opcode::Add || op == Opcode::Shl || op == Opcode::And ||
                       op == Opcode::Or || op == Opcode::Xor || op == Opcode::Exd;
        }
        return false;
    }

    friend bool operator==(const Profile&, const Profile&) = default;

private:
    explicit Profile(ProfileKind k) : kind_(k) {}
    ProfileKind kind_;
};

struct Program {
    Profile profile = Profile::named(ProfileKind::Full);
    std::string name;                          // .name metadata, may be empty
    std::optional<unsigned long> aln_hint;     // .alns metadata
    std::vector<Instruction> code;
    std::map<std::size_t, std::string> labels;  // instruction index -> label

    friend bool operator==(const Program&, const Program&) = default;
};

// ---- validation ----

inline constexpr std::size_t kProgramLevel = static_cast<std::size_t>(-1);

struct Violation {
    std::size_t index = kProgramLevel;  // instruction index, or kProgramLevel
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {
inline bool slot_accepts(SlotKind k, const Operand& o) {
    switch (k) {
        case SlotKind::None: return false;
        case SlotKind::SrcAny: return true;
        case SlotKind::SrcReg: return o.mode == AddrMode::Reg;
        case SlotKind::SrcImm: return o.mode == AddrMode::Imm;
    }
    return false;
}

inline void check_slot(SlotKind k, const std::optional<Operand>& o, const char* slot,
                       std::size_t i, std::string_view mn, std::vector<Violation>& out) {
    if (k == SlotKind::None) {
        if (o) out.push_back({i, std::string(mn) + " takes no " + slot + " operand"});
        return;
    }
    if (!o) {
        out.push_back({i, std::string(mn) + " is missing its " + slot + " operand"});
        return;
    }
    if (!slot_accepts(k, *o)) {
        const char* want = k == SlotKind::SrcReg ? "a register" : "an immediate";
        out.push_back({i, std::string(mn) + " requires " + want + " as " + slot});
    }
}
}  // namespace detail

inline ValidationReport validate_program(const Program& p, const Profile& profile) {
    ValidationReport report;
    for (std::size_t i = 0; i < p.code.size(); ++i) {
        const Instruction& ins = p.code[i];
        std::string_view mn = mnemonic(ins.op);
        if (!profile.allows(ins.op)) {
            report.violations.push_back(
                {i, std::string(mn) + " is not allowed by profile " + std::string(profile.name())});
        }
        const OpShape& shape = op_shape(ins.op);
        if (shape.dst && !ins.dst)
            report.violations.push_back({i, std::string(mn) + " is missing its destination register"});
        if (!shape.dst && ins.dst)
            report.violations.push_back({i, std::string(mn) + " takes no destination register"});
        detail::check_slot(shape.src1, ins.src1, "src1", i, mn, report.violations);
        detail::check_slot(shape.src2, ins.src2, "src2", i, mn, report.violations);
        if (shape.target) {
            if (!ins.target) {
                report.violations.push_back(
                    {i, "unresolved jump target '" + ins.target_label + "'"});
            } else if (*ins.target > p.code.size()) {
                report.violations.push_back({i, "jump target out of range"});
            }
        } else if (ins.target || !ins.target_label.empty()) {
            report.violations.push_back({i, std::string(mn) + " takes no jump target"});
        }
    }
    return report;
}

inline ValidationReport validate_program(const Program& p) {
    return validate_program(p, p.profile);
}

}  // namespace asram
