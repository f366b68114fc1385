#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asram/diag.hpp"
#include "asram/isa.hpp"

namespace asram {

// Text assembly for machine programs (.asr files).
//
//   .profile ARITH            profile directive (FULL when absent)
//   .name some description    optional metadata
//   .alns 3                   optional expected-draw-count hint
//   loop:                     label, on its own line or before an instruction
//       ADD r1, r1, 1         mnemonics case-insensitive
//       JEQ r1, r2, done
//       JMP loop
//   done: HALT                ; comments run to end of line
//
// Operands are r<k> (direct), @r<k> (indirect), decimal or 0x literals of
// any length, or label names in jump-target position.

struct ParseResult {
    std::optional<Program> program;  // set iff there are no diagnostics
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return program.has_value(); }
};

namespace asmdetail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline void skip_ws(std::string_view s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline std::string_view take_ident(std::string_view s, std::size_t& i) {
    std::size_t start = i;
    while (i < s.size() && is_ident_char(s[i])) ++i;
    return s.substr(start, i - start);
}

struct LineParser {
    std::string_view line;
    std::size_t lineno;
    std::size_t i = 0;
    std::vector<Diagnostic>* diags;

    void error(std::size_t col, std::string msg) const {
        diags->push_back({lineno, col, std::move(msg)});
    }

    void skip() { skip_ws(line, i); }
    bool done() {
        skip();
        return i >= line.size();
    }

    bool looks_like_register(std::string_view t) const {
        if (t.size() < 2 || (t[0] != 'r' && t[0] != 'R')) return false;
        for (std::size_t k = 1; k < t.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(t[k]))) return false;
        return true;
    }

    std::optional<Value> parse_register() {
        skip();
        std::size_t start = i;
        if (i >= line.size() || (line[i] != 'r' && line[i] != 'R')) {
            error(start + 1, "expected a register (r<k>)");
            return std::nullopt;
        }
        ++i;
        std::size_t digits = i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        if (digits == i) {
            error(start + 1, "expected a register index after 'r'");
            return std::nullopt;
        }
        auto v = Value::parse(line.substr(digits, i - digits));
        if (!v) {
            error(start + 1, "bad register index");
            return std::nullopt;
        }
        return v;
    }

    std::optional<Value> parse_literal() {
        skip();
        std::size_t start = i;
        while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])))) ++i;
        auto v = Value::parse(line.substr(start, i - start));
        if (!v) {
            error(start + 1, "malformed literal");
            return std::nullopt;
        }
        return v;
    }

    // One operand of any syntactic kind.
    std::optional<Operand> parse_operand(bool allow_imm, bool allow_ind) {
        skip();
        std::size_t start = i;
        if (i >= line.size()) {
            error(start + 1, "expected an operand");
            return std::nullopt;
        }
        char c = line[i];
        if (c == '@') {
            ++i;
            auto r = parse_register();
            if (!r) return std::nullopt;
            if (!allow_ind) {
                error(start + 1, "indirect operand not allowed here");
                return std::nullopt;
            }
            return Operand::ind(*r);
        }
        if ((c == 'r' || c == 'R') && i + 1 < line.size() &&
            std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
            auto r = parse_register();
            if (!r) return std::nullopt;
            return Operand::reg(*r);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            auto v = parse_literal();
            if (!v) return std::nullopt;
            if (!allow_imm) {
                error(start + 1, "immediate operand not allowed here");
                return std::nullopt;
            }
            return Operand::imm(*v);
        }
        error(start + 1, "malformed operand");
        return std::nullopt;
    }

    bool expect_comma() {
        skip();
        if (i < line.size() && line[i] == ',') {
            ++i;
            return true;
        }
        error(i + 1, "expected ','");
        return false;
    }
};

}  // namespace asmdetail

inline ParseResult parse_program(std::string_view source) {
    using namespace asmdetail;
    ParseResult result;
    Program prog;  // profile defaults to FULL when no directive appears
    std::map<std::string, std::size_t, std::less<>> label_defs;

    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        if (pos == source.size() && lineno > 0) break;
        std::size_t eol = source.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? source.substr(pos)
                                    : source.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? source.size() : eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (std::size_t sc = line.find(';'); sc != std::string_view::npos)
            line = line.substr(0, sc);

        LineParser lp{line, lineno, 0, &result.diagnostics};
        if (lp.done()) {
            if (eol == std::string_view::npos) break;
            continue;
        }

        // directive
        if (line[lp.i] == '.') {
            std::size_t dcol = lp.i + 1;
            ++lp.i;
            std::string_view d = take_ident(line, lp.i);
            lp.skip();
            std::string_view rest = line.substr(lp.i);
            while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
            if (d == "profile") {
                auto pf = Profile::from_name(rest);
                if (!pf) {
                    lp.error(dcol, "unknown profile '" + std::string(rest) + "'");
                } else {
                    prog.profile = *pf;
                }
            } else if (d == "name") {
                prog.name = std::string(rest);
            } else if (d == "alns") {
                auto v = Value::parse(rest);
                if (!v || !v->fits_ulong()) {
                    lp.error(dcol, "bad .alns count");
                } else {
                    prog.aln_hint = v->to_ulong();
                }
            } else {
                lp.error(dcol, "unknown directive '." + std::string(d) + "'");
            }
            if (eol == std::string_view::npos) break;
            continue;
        }

        // optional label
        if (is_ident_start(line[lp.i])) {
            std::size_t save = lp.i;
            std::string_view word = take_ident(line, lp.i);
            lp.skip();
            if (lp.i < line.size() && line[lp.i] == ':') {
                ++lp.i;
                if (lp.looks_like_register(word)) {
                    lp.error(save + 1, "label must not look like a register");
                } else if (label_defs.count(std::string(word))) {
                    lp.error(save + 1, "duplicate label '" + std::string(word) + "'");
                } else {
                    label_defs.emplace(std::string(word), prog.code.size());
                    prog.labels.emplace(prog.code.size(), std::string(word));
                }
            } else {
                lp.i = save;  // not a label; must be a mnemonic
            }
        }
        if (lp.done()) {
            if (eol == std::string_view::npos) break;
            continue;
        }

        // instruction
        std::size_t mcol = lp.i + 1;
        std::string_view word = take_ident(line, lp.i);
        auto op = opcode_from_mnemonic(word);
        if (!op) {
            lp.error(mcol, "unknown mnemonic '" + std::string(word) + "'");
            if (eol == std::string_view::npos) break;
            continue;
        }

        Instruction ins;
        ins.op = *op;
        const OpShape& shape = op_shape(*op);
        bool bad = false;
        int ordinal = 0;  // comma before every operand except the first
        auto sep = [&]() {
            if (ordinal++ > 0 && !lp.expect_comma()) bad = true;
        };
        if (shape.dst && !bad) {
            sep();
            auto r = lp.parse_register();
            if (!r) bad = true;
            else ins.dst = *r;
        }
        auto take_src = [&](SlotKind k, std::optional<Operand>& slot) {
            if (k == SlotKind::None || bad) return;
            sep();
            if (bad) return;
            auto o = lp.parse_operand(/*allow_imm=*/k != SlotKind::SrcReg,
                                      /*allow_ind=*/k == SlotKind::SrcAny);
            if (!o) { bad = true; return; }
            if (k == SlotKind::SrcReg && o->mode != AddrMode::Reg) {
                lp.error(lp.i, std::string(mnemonic(*op)) + " requires a register here");
                bad = true;
                return;
            }
            if (k == SlotKind::SrcImm && o->mode != AddrMode::Imm) {
                lp.error(lp.i, std::string(mnemonic(*op)) + " requires an immediate here");
                bad = true;
                return;
            }
            slot = *o;
        };
        take_src(shape.src1, ins.src1);
        take_src(shape.src2, ins.src2);
        if (shape.target && !bad) {
            sep();
            if (!bad) {
                lp.skip();
                std::size_t tcol = lp.i + 1;
                if (lp.i >= line.size() || !is_ident_start(line[lp.i])) {
                    lp.error(tcol, "expected a label");
                    bad = true;
                } else {
                    std::string_view name = take_ident(line, lp.i);
                    if (lp.looks_like_register(name)) {
                        lp.error(tcol, "jump target must be a label");
                        bad = true;
                    } else {
                        ins.target_label = std::string(name);
                    }
                }
            }
        }
        if (!bad && !lp.done())
            lp.error(lp.i + 1, "trailing characters after instruction");
        if (!bad) prog.code.push_back(std::move(ins));
        if (eol == std::string_view::npos) break;
    }


    // Resolve labels; unresolved targets are left for the validator to report.
    // Resolved references are renamed to the index's canonical (first) label
    // so printing and reparsing are stable.
    for (Instruction& ins : prog.code) {
        if (!ins.target_label.empty()) {
            auto it = label_defs.find(ins.target_label);
            if (it != label_defs.end()) {
                ins.target = it->second;
                if (auto canon = prog.labels.find(it->second); canon != prog.labels.end())
                    ins.target_label = canon->second;
            }
        }
    }

    if (result.diagnostics.empty()) result.program = std::move(prog);
    return result;
}

namespace asmdetail {
inline std::string operand_text(const Operand& o) {
    switch (o.mode) {
        case AddrMode::Reg: return "r" + o.value.to_decimal();
        case AddrMode::Ind: return "@r" + o.value.to_decimal();
        case AddrMode::Imm: return o.value.to_decimal();
    }
    return "?";
}
}  // namespace asmdetail

// Canonical text: directives first, labels on their own lines, instructions
// indented, comments dropped. parse(print(p)) reproduces p instruction for
// instruction.
inline std::string print_program(const Program& p) {
    std::string out;
    out += ".profile ";
    out += p.profile.name();
    out += '\n';
    if (!p.name.empty()) {
        out += ".name ";
        out += p.name;
        out += '\n';
    }
    if (p.aln_hint) {
        out += ".alns " + std::to_string(*p.aln_hint) + '\n';
    }

    // Give every jump target a printable label.
    std::map<std::size_t, std::string> labels = p.labels;
    for (const Instruction& ins : p.code) {
        if (ins.target && !labels.count(*ins.target)) {
            labels.emplace(*ins.target,
                           ins.target_label.empty() ? "L" + std::to_string(*ins.target)
                                                    : ins.target_label);
        }
    }

    for (std::size_t i = 0; i <= p.code.size(); ++i) {
        if (auto it = labels.find(i); it != labels.end()) {
            out += it->second;
            out += ":\n";
        }
        if (i == p.code.size()) break;
        const Instruction& ins = p.code[i];
        out += "    ";
        out += mnemonic(ins.op);
        std::vector<std::string> ops;
        if (ins.dst) ops.push_back("r" + ins.dst->to_decimal());
        if (ins.src1) ops.push_back(asmdetail::operand_text(*ins.src1));
        if (ins.src2) ops.push_back(asmdetail::operand_text(*ins.src2));
        if (op_shape(ins.op).target) {
            if (ins.target && labels.count(*ins.target)) ops.push_back(labels.at(*ins.target));
            else ops.push_back(ins.target_label);
        }
        for (std::size_t k = 0; k < ops.size(); ++k) {
            out += k == 0 ? " " : ", ";
            out += ops[k];
        }
        out += '\n';
    }
    return out;
}

}  // namespace asram
