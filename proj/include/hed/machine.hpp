#pragma once

// A toy step-counted machine model with an effective enumeration: a
// deterministic register machine plus a declared-cost builtin catalog.
// Builtins make astronomically budgeted runs decidable symbolically; the
// register machine provides concrete subjects with exact step counts.
//
// Enumeration: even e = 2*pair(b, j) names catalog entry b (the padding j
// gives every entry infinitely many indices); odd e decodes (e-1)/2 as a
// Godel-coded register program, with ill-formed codes mapping to the
// immediately halting program.

#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hed/hyperint.hpp"

namespace hed {

using MachineIndex = BigNat;

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

// --- Cantor pairing ---------------------------------------------------------

inline BigNat pairN(const BigNat& a, const BigNat& b) {
    return (a + b) * (a + b + 1) / 2 + b;
}

inline std::pair<BigNat, BigNat> unpairN(const BigNat& z) {
    const BigNat disc = z * 8 + 1;
    BigNat s = boost::multiprecision::sqrt(disc);
    s = (s - 1) / 2;
    while ((s + 1) * (s + 2) / 2 <= z) ++s;
    while (s * (s + 1) / 2 > z) --s;
    BigNat b = z - s * (s + 1) / 2;
    BigNat a = s - b;
    return {a, b};
}

// --- Register programs ------------------------------------------------------

enum class Op { Inc, DecJz, Halt };

struct Instruction {
    Op op;
    std::uint64_t reg = 0;
    std::uint64_t label = 0;

    bool operator==(const Instruction&) const = default;
};

/// Input in register 0; output is register 0 at HALT. Running past the last
/// instruction halts as well.
struct RegisterProgram {
    std::vector<Instruction> instructions;

    bool operator==(const RegisterProgram&) const = default;
};

inline RegisterProgram haltProgram() {
    return RegisterProgram{{Instruction{Op::Halt}}};
}

namespace detail {

inline constexpr std::uint64_t kMaxRegister = 1u << 16;

inline bool wellFormed(const RegisterProgram& p) {
    for (const auto& ins : p.instructions) {
        if (ins.op != Op::Halt && ins.reg > kMaxRegister) return false;
        if (ins.op == Op::DecJz && ins.label >= p.instructions.size()) return false;
    }
    return true;
}

// Finite sequences of naturals: 0 codes the empty list, n+1 codes
// pair(head, tail-code).
inline std::vector<BigNat> decodeList(BigNat code) {
    std::vector<BigNat> out;
    while (code > 0) {
        auto [head, tail] = unpairN(code - 1);
        out.push_back(head);
        code = tail;
    }
    return out;
}

inline BigNat encodeList(const std::vector<BigNat>& xs) {
    BigNat code = 0;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) code = pairN(*it, code) + 1;
    return code;
}

}  // namespace detail

/// Total decoding of a Godel code; anything ill-formed becomes the
/// immediately halting program.
inline RegisterProgram decodeProgram(const BigNat& code) {
    RegisterProgram p;
    for (const BigNat& i : detail::decodeList(code)) {
        const std::uint64_t tag = static_cast<std::uint64_t>(i % 3);
        const BigNat payload = i / 3;
        if (tag == 0) {
            if (payload > detail::kMaxRegister) return haltProgram();
            p.instructions.push_back({Op::Inc, payload.convert_to<std::uint64_t>(), 0});
        } else if (tag == 1) {
            auto [r, l] = unpairN(payload);
            if (r > detail::kMaxRegister || l > detail::kMaxRegister) return haltProgram();
            p.instructions.push_back(
                {Op::DecJz, r.convert_to<std::uint64_t>(), l.convert_to<std::uint64_t>()});
        } else {
            if (payload != 0) return haltProgram();
            p.instructions.push_back({Op::Halt});
        }
    }
    if (p.instructions.empty() || !detail::wellFormed(p)) return haltProgram();
    return p;
}

inline BigNat encodeProgram(const RegisterProgram& p) {
    std::vector<BigNat> codes;
    for (const auto& ins : p.instructions) {
        switch (ins.op) {
            case Op::Inc: codes.push_back(BigNat(ins.reg) * 3); break;
            case Op::DecJz: codes.push_back(pairN(ins.reg, ins.label) * 3 + 1); break;
            case Op::Halt: codes.push_back(BigNat(2)); break;
        }
    }
    return detail::encodeList(codes);
}

/// One instruction per line: `INC r`, `DECJZ r L`, `HALT`.
inline RegisterProgram parseProgram(const std::string& text) {
    RegisterProgram p;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        auto readNum = [&](const char* what) -> std::uint64_t {
            std::uint64_t v;
            if (!(ls >> v)) throw ParseError(lineNo, std::string("expected ") + what);
            return v;
        };
        if (word == "INC") {
            std::uint64_t r = readNum("register");
            p.instructions.push_back({Op::Inc, r, 0});
        } else if (word == "DECJZ") {
            std::uint64_t r = readNum("register");
            std::uint64_t l = readNum("label");
            p.instructions.push_back({Op::DecJz, r, l});
        } else if (word == "HALT") {
            p.instructions.push_back({Op::Halt});
        } else {
            throw ParseError(lineNo, "unknown instruction '" + word + "'");
        }
        std::string rest;
        if (ls >> rest) throw ParseError(lineNo, "trailing tokens");
    }
    if (p.instructions.empty()) throw ParseError(lineNo, "empty program");
    if (!detail::wellFormed(p)) throw ParseError(lineNo, "label or register out of range");
    return p;
}

inline std::string programToText(const RegisterProgram& p) {
    std::string out;
    for (const auto& ins : p.instructions) {
        switch (ins.op) {
            case Op::Inc: out += "INC " + std::to_string(ins.reg); break;
            case Op::DecJz:
                out += "DECJZ " + std::to_string(ins.reg) + " " + std::to_string(ins.label);
                break;
            case Op::Halt: out += "HALT"; break;
        }
        out += "\n";
    }
    return out;
}

// --- Builtins and derived machines ------------------------------------------

struct RunOutcome {
    enum class Kind { Halted, StillRunning, CapExceeded };
    Kind kind = Kind::StillRunning;
    HyperInt output;  // Halted only
    HyperInt steps;   // Halted: exact steps; StillRunning: budget spent;
                      // CapExceeded: lower bound on steps

    static RunOutcome halted(HyperInt out, HyperInt st) {
        return {Kind::Halted, std::move(out), std::move(st)};
    }
    static RunOutcome stillRunning(HyperInt spent) {
        return {Kind::StillRunning, HyperInt{}, std::move(spent)};
    }
    static RunOutcome capExceeded(HyperInt lower) {
        return {Kind::CapExceeded, HyperInt{}, std::move(lower)};
    }
    bool halted() const { return kind == Kind::Halted; }
};

/// Declared-cost builtin: output and cost are closed forms over exact-or-tower
/// values (a formula may decline symbolic input by returning nullopt, which
/// never happens for exact inputs).
struct BuiltinSpec {
    std::string name;
    std::function<std::optional<HyperInt>(const HyperInt&)> outputFn;
    std::function<std::optional<HyperInt>(const HyperInt&)> costFn;
    std::function<bool(const BigNat&)> haltsOn;  // concrete halting domain
    bool outputMonotone = true;
    bool costMonotone = true;
    bool honest = false;
};

class Catalog;

/// Machine defined by composition over the enumeration (cumulative hats,
/// parallel joins/meets). Runs under the same budget/cap contract; the
/// catalog it was decoded from is supplied at call time.
struct DerivedMachine {
    std::string name;
    std::function<RunOutcome(const Catalog&, const BigNat&, const HyperInt&, std::uint64_t)>
        runner;
};

struct CatalogEntry {
    std::variant<BuiltinSpec, DerivedMachine> payload;
    const std::string& name() const {
        if (const auto* b = std::get_if<BuiltinSpec>(&payload)) return b->name;
        return std::get<DerivedMachine>(payload).name;
    }
};

namespace detail {

inline HyperInt clampOne(HyperInt h) {
    return maxH(std::move(h), HyperInt::exact(1));
}

inline BuiltinSpec makeFormulaBuiltin(const std::string& name, const std::string& formula,
                                      std::uint64_t param) {
    auto always = [](const BigNat&) { return true; };
    if (formula == "ZERO") {
        return {name, [](const HyperInt&) { return HyperInt::exact(0); },
                [](const HyperInt&) { return HyperInt::exact(1); }, always, true, true, false};
    }
    if (formula == "ID") {
        return {name, [](const HyperInt& x) { return x; },
                [](const HyperInt& x) { return addSaturating(x, HyperInt::exact(1)); }, always,
                true, true, false};
    }
    if (formula == "SUCC") {
        return {name, [](const HyperInt& x) { return addSaturating(x, HyperInt::exact(1)); },
                [](const HyperInt& x) { return addSaturating(x, HyperInt::exact(1)); }, always,
                true, true, false};
    }
    if (formula == "POW2") {
        return {name, [](const HyperInt& x) { return exp2H(x); },
                [](const HyperInt& x) { return exp2H(x); }, always, true, true, true};
    }
    if (formula == "TOWER") {
        const std::uint64_t k = param;
        auto fn = [k](const HyperInt& x) { return towerH(k, x); };
        return {name, fn, fn, always, true, true, true};
    }
    if (formula == "TOWERDIAG") {
        // 2_n^n, clamped to 1 at n = 0; declines symbolic input because the
        // iteration count must be concrete.
        auto fn = [](const HyperInt& x) -> std::optional<HyperInt> {
            if (!x.isExact()) return std::nullopt;
            return clampOne(towerH(x.exactValue(), x));
        };
        return {name, fn, fn, always, true, true, true};
    }
    if (formula == "PARTIAL") {
        const std::uint64_t j = param;
        return {name, [](const HyperInt&) { return HyperInt::exact(0); },
                [](const HyperInt& x) { return addSaturating(x, HyperInt::exact(1)); },
                [j](const BigNat& n) { return n < j; }, true, true, false};
    }
    throw Error("unknown builtin formula: " + formula);
}

}  // namespace detail

class Catalog {
public:
    static Catalog standard() {
        Catalog c;
        auto add = [&](const std::string& name, const std::string& formula, std::uint64_t p = 0) {
            c.entries_.push_back({detail::makeFormulaBuiltin(name, formula, p)});
        };
        add("ZERO", "ZERO");
        add("ID", "ID");
        add("SUCC", "SUCC");
        add("POW2", "POW2");
        for (std::uint64_t k = 2; k <= 6; ++k) add("TOWER_" + std::to_string(k), "TOWER", k);
        add("TOWERDIAG", "TOWERDIAG");
        add("PARTIAL_AT_0", "PARTIAL", 0);
        add("PARTIAL_AT_2", "PARTIAL", 2);
        add("PARTIAL_AT_5", "PARTIAL", 5);
        return c;
    }

    /// Extends the standard catalog from a config file: one `name = FORMULA
    /// [param]` per line, formulas drawn from the fixed interpreted set.
    static Catalog fromConfig(const std::string& text) {
        Catalog c = standard();
        std::istringstream in(text);
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            std::istringstream ls(line);
            std::string name, eq, formula;
            if (!(ls >> name)) continue;
            if (name[0] == '#') continue;
            if (!(ls >> eq >> formula) || eq != "=")
                throw ParseError(lineNo, "expected '<name> = <FORMULA> [param]'");
            std::uint64_t param = 0;
            ls >> param;
            c.entries_.push_back({detail::makeFormulaBuiltin(name, formula, param)});
        }
        return c;
    }

    std::size_t size() const { return entries_.size(); }
    const CatalogEntry& at(std::size_t b) const { return entries_.at(b); }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].name() == name) return i;
        return std::nullopt;
    }

    MachineIndex indexOfName(const std::string& name) const {
        auto b = find(name);
        if (!b) throw Error("no catalog entry named " + name);
        return indexOfEntry(*b);
    }

    static MachineIndex indexOfEntry(std::size_t b) { return pairN(BigNat(b), 0) * 2; }

    /// Appends a derived machine; returns its canonical index. Positions
    /// beyond the current catalog decode to entry 0 until registered, so
    /// existing indices are never re-interpreted.
    MachineIndex registerDerived(DerivedMachine m) {
        entries_.push_back({std::move(m)});
        return indexOfEntry(entries_.size() - 1);
    }

private:
    std::vector<CatalogEntry> entries_;
};

// --- Decoding and execution --------------------------------------------------

struct DecodedMachine {
    enum class Kind { Catalog, Register };
    Kind kind;
    std::size_t catalogPos = 0;   // Catalog
    RegisterProgram program;      // Register
};

inline DecodedMachine decode(const Catalog& cat, const MachineIndex& e) {
    if (e % 2 == 0) {
        auto [b, j] = unpairN(e / 2);
        (void)j;  // padding: every entry has infinitely many indices
        std::size_t pos = b < cat.size() ? static_cast<std::size_t>(b) : 0;
        return {DecodedMachine::Kind::Catalog, pos, {}};
    }
    return {DecodedMachine::Kind::Register, 0, decodeProgram((e - 1) / 2)};
}

inline std::string machineLabel(const Catalog& cat, const MachineIndex& e) {
    auto d = decode(cat, e);
    if (d.kind == DecodedMachine::Kind::Catalog) return cat.at(d.catalogPos).name();
    return "program#" + e.str();
}

namespace detail {

struct SimResult {
    bool halted;
    std::uint64_t steps;
    BigNat output;
};

inline SimResult simulate(const RegisterProgram& p, const BigNat& input, std::uint64_t maxSteps) {
    if (input > (BigNat(1) << 62)) throw Error("register machine input too large");
    std::vector<BigNat> regs(1, input);
    auto reg = [&](std::uint64_t r) -> BigNat& {
        if (r >= regs.size()) regs.resize(r + 1, 0);
        return regs[r];
    };
    std::size_t pc = 0;
    std::uint64_t steps = 0;
    while (steps < maxSteps) {
        if (pc >= p.instructions.size()) return {true, steps, regs[0]};
        const Instruction& ins = p.instructions[pc];
        ++steps;
        switch (ins.op) {
            case Op::Inc:
                ++reg(ins.reg);
                ++pc;
                break;
            case Op::DecJz:
                if (reg(ins.reg) == 0) {
                    pc = ins.label;
                } else {
                    --reg(ins.reg);
                    ++pc;
                }
                break;
            case Op::Halt:
                return {true, steps, regs[0]};
        }
    }
    return {false, steps, 0};
}

}  // namespace detail

/// Step-exact bounded execution. Builtins resolve symbolically against the
/// budget; register programs execute at most min(budget, cap) instructions,
/// and exhausting the cap with budget to spare is a loud CapExceeded rather
/// than a silent verdict.
inline RunOutcome run(const Catalog& cat, const MachineIndex& e, const BigNat& n,
                      const HyperInt& budget, std::uint64_t cap = kDefaultCap) {
    const DecodedMachine d = decode(cat, e);
    if (d.kind == DecodedMachine::Kind::Catalog) {
        const CatalogEntry& entry = cat.at(d.catalogPos);
        if (const auto* b = std::get_if<BuiltinSpec>(&entry.payload)) {
            if (!b->haltsOn(n)) return RunOutcome::stillRunning(budget);
            const HyperInt x = HyperInt::exact(n);
            HyperInt cost = *b->costFn(x);
            if (compare(cost, budget) == Ordering::Greater) return RunOutcome::stillRunning(budget);
            return RunOutcome::halted(*b->outputFn(x), std::move(cost));
        }
        return std::get<DerivedMachine>(entry.payload).runner(cat, n, budget, cap);
    }
    const bool budgetBeyondCap = compare(budget, HyperInt::exact(cap)) == Ordering::Greater;
    const std::uint64_t limit =
        budgetBeyondCap ? cap : budget.exactValue().convert_to<std::uint64_t>();
    auto sim = detail::simulate(d.program, n, limit);
    if (sim.halted) return RunOutcome::halted(HyperInt::exact(sim.output), HyperInt::exact(sim.steps));
    if (budgetBeyondCap) return RunOutcome::capExceeded(HyperInt::exact(sim.steps));
    return RunOutcome::stillRunning(budget);
}

// --- Dovetailing --------------------------------------------------------------

struct DovetailTask {
    MachineIndex e;
    BigNat input;
};

struct FirstHalt {
    MachineIndex e;
    BigNat input;
    HyperInt output;
    HyperInt steps;
    std::size_t position;
};

namespace detail {

// Round-robin with one-step quanta is equivalent to picking the task with
// the smallest own step count, ties by list position: until the first halt
// every live task advances in lockstep.
struct TaskProfile {
    RunOutcome outcome;
    std::string label;
    std::uint64_t inputLabel;
};

inline std::optional<std::size_t> pickFirstHalt(const std::vector<TaskProfile>& profiles) {
    std::optional<std::size_t> winner;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (!profiles[i].outcome.halted()) continue;
        if (!winner ||
            compare(profiles[i].outcome.steps, profiles[*winner].outcome.steps) == Ordering::Less)
            winner = i;
    }
    for (const auto& p : profiles) {
        if (p.outcome.kind != RunOutcome::Kind::CapExceeded) continue;
        const bool resolved =
            winner && compare(profiles[*winner].outcome.steps, p.outcome.steps) != Ordering::Greater;
        if (!resolved) throw CapExceededError(p.label, p.inputLabel);
    }
    return winner;
}

}  // namespace detail

/// Runs the tasks in a dovetailing fashion for at most budgetPerTask steps
/// each; returns the first halting task or nullopt when none halts.
inline std::optional<FirstHalt> dovetail(const Catalog& cat, const std::vector<DovetailTask>& tasks,
                                         const HyperInt& budgetPerTask,
                                         std::uint64_t cap = kDefaultCap) {
    std::vector<detail::TaskProfile> profiles;
    profiles.reserve(tasks.size());
    for (const auto& t : tasks) {
        profiles.push_back({run(cat, t.e, t.input, budgetPerTask, cap), machineLabel(cat, t.e),
                            t.input.convert_to<std::uint64_t>()});
    }
    auto w = detail::pickFirstHalt(profiles);
    if (!w) return std::nullopt;
    return FirstHalt{tasks[*w].e, tasks[*w].input, profiles[*w].outcome.output,
                     profiles[*w].outcome.steps, *w};
}

}  // namespace hed
