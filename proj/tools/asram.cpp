// Command-line front end: assemble/validate, run, stabilisation checks,
// program generation and bounded formula evaluation.
//
// Exit codes
//   run:            0 halted, 2 fault, 3 fuel exhausted
//   check/formula:  0 stabilized, 4 unstable, 5 resource exceeded
//   everything:     1 usage, parse or validation error

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "asram/asram.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace asram;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        std::cerr << path << ":" << d.line << ":" << d.col << ": error: " << d.message << "\n";
}

json value_json(const Value& v) {
    if (v.bits() <= kRenderBitThreshold) return json{{"dec", v.to_decimal()}};
    if (auto e = v.pow2_exponent()) return json{{"pow2", *e}};
    return json{{"bits", v.bits()}};
}

json trace_json(const TraceEvent& ev) {
    json j{{"record", "trace"},
           {"step", ev.step},
           {"pc", ev.pc},
           {"mnemonic", std::string(mnemonic(ev.op))},
           {"dst_bits", ev.dst_bits}};
    if (ev.draw_index) j["draw_index"] = *ev.draw_index;
    if (!ev.preview.empty()) j["preview"] = ev.preview;
    return j;
}

struct LoadedProgram {
    Program program;
    std::string canonical;
};

// Parse, optionally override the profile, validate. Throws with diagnostics
// already printed.
LoadedProgram load_program(const std::string& path, const std::string& profile_override) {
    ParseResult parsed = parse_program(read_file(path));
    if (!parsed.ok()) {
        print_diagnostics(path, parsed.diagnostics);
        throw std::runtime_error("parse failed");
    }
    Program p = std::move(*parsed.program);
    if (!profile_override.empty()) {
        auto pf = Profile::from_name(profile_override);
        if (!pf) throw std::runtime_error("unknown profile '" + profile_override + "'");
        p.profile = *pf;
    }
    ValidationReport report = validate_program(p);
    if (!report.ok()) {
        for (const auto& v : report.violations) {
            if (v.index == kProgramLevel)
                std::cerr << path << ": error: " << v.message << "\n";
            else
                std::cerr << path << ": instruction " << v.index << ": error: " << v.message
                          << "\n";
        }
        throw std::runtime_error("validation failed");
    }
    return LoadedProgram{std::move(p), print_program(p)};
}

struct CommonFlags {
    std::string oracle_spec = "pow2:s=1";
    unsigned long fuel = kDefaultFuel;
    std::size_t mem_bits = kDefaultMemBits;
    std::string format = "human";
    std::string profile_override;

    RunLimits limits(bool trace = false) const {
        RunLimits l;
        l.fuel = fuel;
        l.mem_bits = mem_bits;
        l.trace = trace;
        return l;
    }
};

std::string hash_hex(const std::string& text) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

int cmd_run(const std::string& path, const std::string& input_text, const CommonFlags& flags,
            bool trace) {
    auto input = Value::parse(input_text);
    if (!input) throw std::runtime_error("bad input value '" + input_text + "'");
    LoadedProgram lp = load_program(path, flags.profile_override);
    OracleFamily oracle = parse_oracle_spec(flags.oracle_spec);
    RunOutcome o = run(lp.program, *input, make_draw_fn(oracle), flags.limits(trace));

    for (const TraceEvent& ev : o.trace) std::cout << trace_json(ev).dump() << "\n";

    if (flags.format == "records") {
        json j{{"record", "run"},
               {"program", path},
               {"program_hash", hash_hex(lp.canonical)},
               {"input", input_text},
               {"oracle", flags.oracle_spec},
               {"fuel", flags.fuel},
               {"mem_bits", flags.mem_bits},
               {"status", status_name(o.status)},
               {"output", value_json(o.output)},
               {"accepted", o.accepted},
               {"steps", o.steps}};
        if (o.fault) j["fault"] = fault_name(*o.fault);
        json draws = json::array();
        for (const Value& d : o.aln_draws) draws.push_back(value_json(d));
        j["draws"] = draws;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "status=" << status_name(o.status);
        if (o.fault) std::cout << " fault=" << fault_name(*o.fault);
        std::cout << " output=" << render_value(o.output)
                  << " accepted=" << (o.accepted ? "true" : "false") << " steps=" << o.steps
                  << " draws=" << o.aln_draws.size() << "\n";
        for (std::size_t i = 0; i < o.aln_draws.size(); ++i)
            std::cout << "draw[" << i << "]=" << render_value(o.aln_draws[i]) << "\n";
    }

    switch (o.status) {
        case Status::Halted: return 0;
        case Status::Fault: return 2;
        case Status::FuelExhausted: return 3;
        case Status::Running: break;
    }
    return 2;
}

int verdict_exit(VerdictKind k) {
    switch (k) {
        case VerdictKind::Stabilized: return 0;
        case VerdictKind::Unstable: return 4;
        case VerdictKind::ResourceExceeded: return 5;
    }
    return 5;
}

int cmd_check(const std::string& path, const std::string& input_text, const CommonFlags& flags,
              const std::vector<unsigned long>& scales, unsigned confirmations) {
    auto input = Value::parse(input_text);
    if (!input) throw std::runtime_error("bad input value '" + input_text + "'");
    LoadedProgram lp = load_program(path, flags.profile_override);
    OracleFamily oracle = parse_oracle_spec(flags.oracle_spec);

    EscalationSchedule schedule = EscalationSchedule::standard();
    if (!scales.empty()) schedule.scales = scales;
    schedule.confirmations = confirmations;
    for (std::size_t i = 1; i < schedule.scales.size(); ++i)
        if (schedule.scales[i] <= schedule.scales[i - 1])
            throw std::runtime_error("scales must be strictly increasing");
    if (schedule.confirmations < 2) throw std::runtime_error("confirmations must be >= 2");

    StabilizationVerdict v =
        stabilization_check(lp.program, *input, schedule, oracle, flags.limits());

    if (flags.format == "records") {
        json j{{"record", "check"},
               {"program", path},
               {"program_hash", hash_hex(lp.canonical)},
               {"input", input_text},
               {"oracle", flags.oracle_spec},
               {"fuel", flags.fuel},
               {"mem_bits", flags.mem_bits},
               {"verdict", verdict_name(v.kind)},
               {"steps_max", v.steps_max}};
        if (v.kind == VerdictKind::Stabilized) j["value"] = value_json(v.value);
        json ev = json::array();
        for (const auto& e : v.evidence) {
            json r{{"scale", e.scale},
                   {"status", status_name(e.outcome.status)},
                   {"output", value_json(e.outcome.output)},
                   {"steps", e.outcome.steps}};
            if (e.outcome.fault) r["fault"] = fault_name(*e.outcome.fault);
            ev.push_back(r);
        }
        j["evidence"] = ev;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "verdict=" << verdict_name(v.kind);
        if (v.kind == VerdictKind::Stabilized) std::cout << " value=" << render_value(v.value);
        std::cout << " steps_max=" << v.steps_max << "\n";
        for (const auto& e : v.evidence) {
            std::cout << "scale=" << e.scale << " status=" << status_name(e.outcome.status);
            if (e.outcome.fault) std::cout << " fault=" << fault_name(*e.outcome.fault);
            std::cout << " output=" << render_value(e.outcome.output)
                      << " steps=" << e.outcome.steps << "\n";
        }
    }
    return verdict_exit(v.kind);
}

int cmd_gen(const std::string& kind, unsigned x, const std::string& out_dir, unsigned cap) {
    Program program;
    ExponentPlan plan;
    std::string stem;
    if (kind == "tower") {
        plan = sufficient_plan(x, cap == 0 ? kTowerCapDefault : cap);
        program = gen_tower(x);
        stem = "tower_x" + std::to_string(x);
    } else if (kind == "general-tower") {
        plan = general_tower_plan(x, cap == 0 ? kGeneralTowerCapDefault : cap);
        program = gen_general_tower(x);
        stem = "general_x" + std::to_string(x);
    } else {
        throw std::runtime_error("unknown generator '" + kind + "' (tower, general-tower)");
    }

    std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    std::filesystem::create_directories(dir);
    std::filesystem::path asr = dir / (stem + ".asr");
    std::filesystem::path pf = dir / (stem + ".plan");
    {
        std::ofstream out(asr);
        out << print_program(program);
    }
    {
        std::ofstream out(pf);
        for (unsigned long e : plan.exponents) out << "2^" << e << "\n";
    }
    std::cout << "wrote " << asr.string() << " (" << program.code.size() << " instructions)\n";
    std::cout << "wrote " << pf.string() << " (" << plan.exponents.size() << " draws)\n";
    return 0;
}

int cmd_formula(const std::string& source_arg, const std::string& input_text,
                const CommonFlags& flags, const std::vector<unsigned long>& bounds,
                const std::vector<unsigned long>& caps, unsigned confirmations,
                unsigned long budget) {
    auto input = Value::parse(input_text);
    if (!input) throw std::runtime_error("bad input value '" + input_text + "'");

    std::string text = source_arg;
    std::string origin = "<literal>";
    if (std::filesystem::exists(source_arg)) {
        text = read_file(source_arg);
        origin = source_arg;
    }
    FormulaParseResult parsed = parse_formula(text);
    if (!parsed.ok()) {
        print_diagnostics(origin, parsed.diagnostics);
        throw std::runtime_error("formula parse failed");
    }

    BoundSchedule schedule = BoundSchedule::standard();
    if (!bounds.empty()) {
        schedule.stages.clear();
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            Value b(bounds[i]);
            Value cap = i < caps.size() ? Value(caps[i]) : mul(b, b);
            schedule.stages.push_back({b, cap});
        }
    }
    schedule.confirmations = confirmations;
    if (schedule.confirmations < 2) throw std::runtime_error("confirmations must be >= 2");
    EvalBudget eb;
    eb.max_body_evals = budget;

    BoundVerdict v = escalate_bounds(*parsed.formula, *input, schedule, eb);

    auto status_text = [](EvalStatus s) {
        return s == EvalStatus::True ? "true" : s == EvalStatus::False ? "false" : "budget_exceeded";
    };
    if (flags.format == "records") {
        json j{{"record", "formula"},
               {"formula", print_formula(*parsed.formula)},
               {"input", input_text},
               {"verdict", verdict_name(v.kind)}};
        if (v.kind == VerdictKind::Stabilized) j["value"] = v.value;
        json ev = json::array();
        for (const auto& e : v.evidence)
            ev.push_back(json{{"bound", e.stage.prefix_bound.to_decimal()},
                              {"cap", e.stage.final_cap.to_decimal()},
                              {"result", status_text(e.result)}});
        j["evidence"] = ev;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "verdict=" << verdict_name(v.kind);
        if (v.kind == VerdictKind::Stabilized)
            std::cout << " value=" << (v.value ? "true" : "false");
        std::cout << "\n";
        for (const auto& e : v.evidence)
            std::cout << "bound=" << e.stage.prefix_bound.to_decimal()
                      << " cap=" << e.stage.final_cap.to_decimal()
                      << " result=" << status_text(e.result) << "\n";
    }
    return verdict_exit(v.kind);
}

int cmd_asm(const std::string& path, bool print, const std::string& profile_override) {
    LoadedProgram lp = load_program(path, profile_override);
    if (print) {
        std::cout << lp.canonical;
    } else {
        std::cout << path << ": ok (" << lp.program.code.size() << " instructions, profile "
                  << lp.program.profile.name() << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asram - a unit-cost register machine with arbitrary-large-number draws"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string program_path, input_text = "0";
    bool trace = false;

    auto add_common = [&](CLI::App* sub, bool with_oracle) {
        sub->add_option("--fuel", flags.fuel, "step budget");
        sub->add_option("--mem-bits", flags.mem_bits, "per-value bit ceiling");
        sub->add_option("--format", flags.format, "human or records")
            ->check(CLI::IsMember({"human", "records"}));
        sub->add_option("--profile", flags.profile_override, "override the declared profile");
        if (with_oracle)
            sub->add_option("--oracle", flags.oracle_spec,
                            "pow2:s=K | fixed:@file | plan:@file | jitter:s=K,j=a|b|...");
    };

    // asm
    auto* asm_cmd = app.add_subcommand("asm", "parse and validate a program");
    bool asm_print = false;
    asm_cmd->add_option("program", program_path, ".asr file")->required();
    asm_cmd->add_flag("--print", asm_print, "emit canonical text");
    asm_cmd->add_option("--profile", flags.profile_override, "override the declared profile");

    // run
    auto* run_cmd = app.add_subcommand("run", "execute a program");
    run_cmd->add_option("program", program_path, ".asr file")->required();
    run_cmd->add_option("--input", input_text, "input value (decimal, 0x..., or 2^e)");
    run_cmd->add_flag("--trace", trace, "emit one trace record per executed instruction");
    add_common(run_cmd, true);

    // check
    auto* check_cmd = app.add_subcommand("check", "escalate oracle scales until outputs stabilise");
    std::vector<unsigned long> scales;
    unsigned confirmations = 3;
    check_cmd->add_option("program", program_path, ".asr file")->required();
    check_cmd->add_option("--input", input_text, "input value");
    check_cmd->add_option("--scales", scales, "escalation scales (strictly increasing)")
        ->delimiter(',');
    check_cmd->add_option("--confirm", confirmations, "required trailing agreements");
    add_common(check_cmd, true);

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "emit a reference program and its draw plan");
    std::string gen_kind;
    unsigned gen_x = 1;
    unsigned gen_cap = 0;
    std::string out_dir;
    gen_cmd->add_option("kind", gen_kind, "tower | general-tower")->required();
    gen_cmd->add_option("x", gen_x, "size parameter")->required();
    gen_cmd->add_option("--out", out_dir, "output directory (default .)");
    gen_cmd->add_option("--cap", gen_cap, "override the size cap");

    // formula
    auto* formula_cmd =
        app.add_subcommand("formula", "escalate quantifier bounds until verdicts stabilise");
    std::string formula_arg;
    std::vector<unsigned long> bounds, caps;
    unsigned long budget = EvalBudget{}.max_body_evals;
    formula_cmd->add_option("formula", formula_arg, "file or literal")->required();
    formula_cmd->add_option("--input", input_text, "input value");
    formula_cmd->add_option("--bounds", bounds, "prefix bounds per stage")->delimiter(',');
    formula_cmd->add_option("--caps", caps, "final caps per stage (default bound^2)")
        ->delimiter(',');
    formula_cmd->add_option("--confirm", confirmations, "required trailing agreements");
    formula_cmd->add_option("--budget", budget, "body-evaluation budget per stage");
    formula_cmd->add_option("--format", flags.format, "human or records")
        ->check(CLI::IsMember({"human", "records"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (asm_cmd->parsed()) return cmd_asm(program_path, asm_print, flags.profile_override);
        if (run_cmd->parsed()) return cmd_run(program_path, input_text, flags, trace);
        if (check_cmd->parsed())
            return cmd_check(program_path, input_text, flags, scales, confirmations);
        if (gen_cmd->parsed()) return cmd_gen(gen_kind, gen_x, out_dir, gen_cap);
        if (formula_cmd->parsed())
            return cmd_formula(formula_arg, input_text, flags, bounds, caps, confirmations,
                               budget);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
