#pragma once

// Degree-representative operations: join and meet of function handles by
// pointwise max/min. Degrees are never reified; every statement here is
// about representatives and pointwise values.

#include <string>
#include <utility>

#include "hed/honest.hpp"

namespace hed {

namespace detail {

enum class LatticeOp { Max, Min };

inline HonestFn combine(LatticeOp op, HonestFn f, HonestFn g, std::string name) {
    const bool honest = f.claimsHonest() && g.claimsHonest();
    auto ev = [op, f, g](const BigNat& n, const EvalLimits& lim) mutable -> RunOutcome {
        RunOutcome rf = f.eval(n, lim);
        RunOutcome rg = g.eval(n, lim);
        if (rf.kind == RunOutcome::Kind::CapExceeded) return rf;
        if (rg.kind == RunOutcome::Kind::CapExceeded) return rg;
        if (!rf.halted() || !rg.halted()) return RunOutcome::stillRunning(lim.budget);
        HyperInt value =
            op == LatticeOp::Max ? maxH(rf.output, rg.output) : minH(rf.output, rg.output);
        // A join pays for both branches; a meet is charged to the cheaper
        // branch so the cost stays within an iterate of the (smaller) value.
        HyperInt work = op == LatticeOp::Max ? addSaturating(rf.steps, rg.steps)
                                             : minH(rf.steps, rg.steps);
        return RunOutcome::halted(std::move(value), addSaturating(work, HyperInt::exact(1)));
    };
    HonestFn::Symbolic sym = nullptr;
    if (f.symbolicCapable() && g.symbolicCapable()) {
        sym = [op, f, g](const HyperInt& x) -> std::optional<HyperInt> {
            auto a = f.evalSym(x);
            auto b = g.evalSym(x);
            if (!a || !b) return std::nullopt;
            return op == LatticeOp::Max ? maxH(*a, *b) : minH(*a, *b);
        };
    }
    return HonestFn::fromEvaluator(std::move(name), std::move(ev), std::move(sym), honest);
}

}  // namespace detail

/// Pointwise max; honest whenever both inputs are.
inline HonestFn join(HonestFn f, HonestFn g) {
    std::string name = "MAX(" + f.name() + "," + g.name() + ")";
    return detail::combine(detail::LatticeOp::Max, std::move(f), std::move(g), std::move(name));
}

/// Pointwise min; dual of join.
inline HonestFn meet(HonestFn f, HonestFn g) {
    std::string name = "MIN(" + f.name() + "," + g.name() + ")";
    return detail::combine(detail::LatticeOp::Min, std::move(f), std::move(g), std::move(name));
}

/// The meet used by the no-cupping corollaries: a = min[x, b].
inline HonestFn capWitness(HonestFn x, HonestFn b) { return meet(std::move(x), std::move(b)); }

struct DegreeRep {
    HonestFn rep;
    std::string label;
};

}  // namespace hed
