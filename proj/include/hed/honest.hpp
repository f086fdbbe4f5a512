#pragma once

// Honest associates and honesty checking: the bridge from arbitrary machines
// to honest functions.
//
// The associate of machine e evaluates at n by running e on 0..n and taking
// the maximum of 2^n and the total step count; it diverges exactly when some
// constituent run does. Divergence is always relative to a supplied budget,
// never detected absolutely.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hed/machine.hpp"

namespace hed {

// Comfortably above every declared cost reachable at desk scale.
inline HyperInt generousBudget() { return HyperInt::towerOf(64, 2); }

struct EvalLimits {
    HyperInt budget = generousBudget();
    std::uint64_t cap = kDefaultCap;
};

/// Cumulative run of machine e on inputs 0..n under a shared step budget.
/// Halts iff every constituent halts and the summed steps fit the budget;
/// the output is max(2^n, total steps) and the reported steps are the total.
inline RunOutcome runAssocHat(const Catalog& cat, const MachineIndex& e, const BigNat& n,
                              const HyperInt& budget, std::uint64_t cap = kDefaultCap) {
    HyperInt total = HyperInt::exact(0);
    for (BigNat m = 0; m <= n; ++m) {
        RunOutcome r = run(cat, e, m, budget, cap);
        if (r.kind == RunOutcome::Kind::CapExceeded)
            return RunOutcome::capExceeded(addSaturating(total, r.steps));
        if (r.kind == RunOutcome::Kind::StillRunning) return RunOutcome::stillRunning(budget);
        total = addSaturating(total, r.steps);
        if (compare(total, budget) == Ordering::Greater) return RunOutcome::stillRunning(budget);
    }
    return RunOutcome::halted(maxH(exp2H(HyperInt::exact(n)), total), total);
}

/// Memoized unary function handle. Evaluation reports Halted(value, evalCost),
/// StillRunning relative to the supplied budget, or CapExceeded. Handles are
/// single-writer: use from one thread at a time.
class HonestFn {
public:
    using Evaluator = std::function<RunOutcome(const BigNat&, const EvalLimits&)>;
    using Symbolic = std::function<std::optional<HyperInt>(const HyperInt&)>;

    HonestFn() = default;

    static HonestFn fromEvaluator(std::string name, Evaluator ev, Symbolic sym = nullptr,
                                  bool claimsHonest = false) {
        HonestFn f;
        f.impl_ = std::make_shared<Impl>();
        f.impl_->name = std::move(name);
        f.impl_->evaluator = std::move(ev);
        f.impl_->symbolic = std::move(sym);
        f.impl_->claimsHonest = claimsHonest;
        return f;
    }

    /// The catalog function itself (2^x for POW2, and so on), evaluated from
    /// its closed form; divergence comes from the declared halting domain.
    static HonestFn fromBuiltin(const Catalog& cat, const std::string& name) {
        auto pos = cat.find(name);
        if (!pos) throw Error("no catalog entry named " + name);
        const auto* spec = std::get_if<BuiltinSpec>(&cat.at(*pos).payload);
        if (!spec) throw Error(name + " is not a builtin");
        BuiltinSpec copy = *spec;
        auto ev = [copy](const BigNat& n, const EvalLimits& lim) -> RunOutcome {
            if (!copy.haltsOn(n)) return RunOutcome::stillRunning(lim.budget);
            HyperInt x = HyperInt::exact(n);
            return RunOutcome::halted(*copy.outputFn(x), *copy.costFn(x));
        };
        auto sym = [copy](const HyperInt& x) { return copy.outputFn(x); };
        return fromEvaluator(name, std::move(ev), std::move(sym), copy.honest);
    }

    /// Test- and experiment-facing closed form with unit cost.
    static HonestFn closedForm(std::string name, Symbolic fn, bool claimsHonest = false) {
        auto ev = [fn](const BigNat& n, const EvalLimits&) -> RunOutcome {
            return RunOutcome::halted(*fn(HyperInt::exact(n)), HyperInt::exact(1));
        };
        return fromEvaluator(std::move(name), std::move(ev), fn, claimsHonest);
    }

    bool valid() const { return impl_ != nullptr; }
    const std::string& name() const { return impl_->name; }
    bool claimsHonest() const { return impl_->claimsHonest; }
    bool symbolicCapable() const { return impl_ && impl_->symbolic != nullptr; }

    RunOutcome eval(const BigNat& n, const EvalLimits& lim = {}) {
        auto it = impl_->memo.find(n);
        if (it != impl_->memo.end())
            return RunOutcome::halted(it->second.first, it->second.second);
        RunOutcome r = impl_->evaluator(n, lim);
        if (r.halted()) recordMemo(n, r.output, r.steps);
        return r;
    }

    /// Value at n; throws on divergence or cap trouble.
    HyperInt evalValue(const BigNat& n, const EvalLimits& lim = {}) {
        RunOutcome r = eval(n, lim);
        if (r.kind == RunOutcome::Kind::StillRunning)
            throw EvaluationDivergedError(n.convert_to<std::uint64_t>());
        if (r.kind == RunOutcome::Kind::CapExceeded)
            throw CapExceededError(name(), n.convert_to<std::uint64_t>());
        return r.output;
    }

    std::optional<HyperInt> evalSym(const HyperInt& x) const {
        if (!impl_->symbolic) return std::nullopt;
        return impl_->symbolic(x);
    }

    const std::map<BigNat, std::pair<HyperInt, HyperInt>>& memo() const { return impl_->memo; }

private:
    struct Impl {
        std::string name;
        Evaluator evaluator;
        Symbolic symbolic;
        bool claimsHonest = false;
        std::map<BigNat, std::pair<HyperInt, HyperInt>> memo;
    };

    void recordMemo(const BigNat& n, const HyperInt& value, const HyperInt& cost) {
        if (impl_->claimsHonest) {
            if (compare(value, exp2H(HyperInt::exact(n))) == Ordering::Less)
                throw Error(name() + ": honesty certificate violated (value below 2^n at n=" +
                            n.str() + ")");
            auto it = impl_->memo.lower_bound(n);
            if (it != impl_->memo.end() && compare(value, it->second.first) == Ordering::Greater)
                throw Error(name() + ": honesty certificate violated (not monotone at n=" +
                            n.str() + ")");
            if (it != impl_->memo.begin() &&
                compare(std::prev(it)->second.first, value) == Ordering::Greater)
                throw Error(name() + ": honesty certificate violated (not monotone at n=" +
                            n.str() + ")");
        }
        impl_->memo.emplace(n, std::make_pair(value, cost));
    }

    std::shared_ptr<Impl> impl_;
};

/// Value of f at an exact-or-tower point; symbolic points require a
/// closed-form handle (nullopt otherwise).
inline std::optional<HyperInt> valueAt(HonestFn& f, const HyperInt& x,
                                       const EvalLimits& lim = {}) {
    if (x.isExact()) return f.evalValue(x.exactValue(), lim);
    return f.evalSym(x);
}

/// The honest associate of machine e: value max(2^n, total steps of e on
/// 0..n), evalCost those steps plus one bookkeeping action per input.
inline HonestFn honestAssociate(const Catalog& cat, const MachineIndex& e) {
    const Catalog* cp = &cat;
    MachineIndex idx = e;
    auto ev = [cp, idx](const BigNat& n, const EvalLimits& lim) -> RunOutcome {
        RunOutcome hat = runAssocHat(*cp, idx, n, lim.budget, lim.cap);
        if (!hat.halted()) return hat;
        return RunOutcome::halted(hat.output,
                                  addSaturating(hat.steps, HyperInt::exact(n + 1)));
    };
    return HonestFn::fromEvaluator("ASSOC(" + machineLabel(cat, e) + ")", std::move(ev));
}

/// Index of the machine that on input n runs e on 0..n in succession,
/// halting iff all halt, with output 0.
inline MachineIndex cumulativeHat(Catalog& cat, const MachineIndex& e) {
    const std::string nm = "HAT(" + machineLabel(cat, e) + ")";
    if (auto pos = cat.find(nm)) return Catalog::indexOfEntry(*pos);
    MachineIndex subject = e;
    DerivedMachine m{
        nm,
        [subject](const Catalog& c, const BigNat& n, const HyperInt& budget,
                  std::uint64_t cap) -> RunOutcome {
            RunOutcome hat = runAssocHat(c, subject, n, budget, cap);
            if (!hat.halted()) return hat;
            return RunOutcome::halted(HyperInt::exact(0), hat.steps);
        }};
    return cat.registerDerived(std::move(m));
}

// --- Honesty checking ---------------------------------------------------------

struct HonestyWitness {
    std::string check;
    std::uint64_t n;
};

struct HonestyReport {
    std::string name;
    std::uint64_t nMax = 0;
    std::uint32_t degree = 0;
    std::uint64_t constant = 0;
    bool monotoneOK = false;
    bool dominates2xOK = false;
    bool runtimePolyOK = false;
    std::vector<HonestyWitness> witnesses;

    bool allOk() const { return monotoneOK && dominates2xOK && runtimePolyOK; }
};

/// Checks the three operational honesty conditions on 0..nMax: monotone,
/// dominates 2^x, and evalCost within c * value^degree. The runtime check is
/// the operational proxy for "elementary graph".
inline HonestyReport checkHonesty(HonestFn& f, std::uint64_t nMax, std::uint32_t degree,
                                  std::uint64_t constant, const EvalLimits& lim = {}) {
    HonestyReport rep;
    rep.name = f.name();
    rep.nMax = nMax;
    rep.degree = degree;
    rep.constant = constant;
    rep.monotoneOK = rep.dominates2xOK = rep.runtimePolyOK = true;

    HyperInt prev;
    for (std::uint64_t n = 0; n <= nMax; ++n) {
        RunOutcome r = f.eval(n, lim);
        if (r.kind == RunOutcome::Kind::StillRunning) throw EvaluationDivergedError(n);
        if (r.kind == RunOutcome::Kind::CapExceeded) throw CapExceededError(f.name(), n);
        const HyperInt& value = r.output;
        const HyperInt& cost = r.steps;
        if (n > 0 && compare(prev, value) == Ordering::Greater) {
            rep.monotoneOK = false;
            rep.witnesses.push_back({"monotone", n});
        }
        if (compare(value, exp2H(HyperInt::exact(n))) == Ordering::Less) {
            rep.dominates2xOK = false;
            rep.witnesses.push_back({"dominates2x", n});
        }
        if (compare(cost, mulSmall(powSmall(value, degree), constant)) == Ordering::Greater) {
            rep.runtimePolyOK = false;
            rep.witnesses.push_back({"runtimePoly", n});
        }
        prev = value;
    }
    return rep;
}

}  // namespace hed
