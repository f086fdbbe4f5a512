#pragma once

// The anti-cupping machine. On input n it runs, for each m <= n, the
// cumulative associates of every index in its avoidance set C under a
// per-task budget B(k, m), dovetailed. A halt triggers the removal sweep
// (drop e from C once a bounded computation certifies that the e-fold
// iterate of max[self, assoc_e] falls below the target representative
// somewhere); a silent round bumps k, admits the least index never seen,
// and pumps M by the new budget. M after iteration m is the machine's
// value at m.
//
// The run is strictly sequential and deterministic: the trace is the
// contract. Removal sweeps snapshot C at branch entry and apply removals
// after the full sweep; the budgets for the target side and the iterate
// side of a check are separate.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hed/growth.hpp"
#include "hed/lattice.hpp"
#include "hed/ordinal.hpp"
#include "hed/trace.hpp"

namespace hed {

enum class ScheduleKind { Paper, Scaled, Ordinal };
enum class IterateMode { FinitePower, OrdinalIterate };
enum class RemovalStepMode { TotalPerSide, PerEvaluation };

struct PsiConfig {
    const Catalog* catalog = nullptr;
    MachineIndex gamma;  // the representative the construction avoids cupping to
    ScheduleKind schedule = ScheduleKind::Scaled;
    Ordinal scheduleAlpha;  // Ordinal schedule: B(k, m) = iterate of 2^x at fundSeq(alpha, k)
    IterateMode iterateMode = IterateMode::FinitePower;
    Ordinal iterateAlpha;
    std::uint64_t cap = kDefaultCap;
    std::vector<MachineIndex> initialC = {MachineIndex(0)};
    RemovalStepMode removalStepMode = RemovalStepMode::TotalPerSide;

    static PsiConfig standard(const Catalog& cat) {
        PsiConfig c;
        c.catalog = &cat;
        c.gamma = cat.indexOfName("TOWERDIAG");
        return c;
    }

    std::string scheduleName() const {
        switch (schedule) {
            case ScheduleKind::Paper: return "paper";
            case ScheduleKind::Scaled: return "scaled";
            case ScheduleKind::Ordinal: return "ordinal:" + toText(scheduleAlpha);
        }
        return {};
    }

    OrderedJson echo() const {
        OrderedJson j;
        j["gamma"] = machineLabel(*catalog, gamma);
        j["schedule"] = scheduleName();
        j["iterateMode"] = iterateMode == IterateMode::FinitePower
                               ? "finite-power"
                               : "ordinal:" + toText(iterateAlpha);
        j["cap"] = cap;
        OrderedJson c0 = OrderedJson::array();
        for (const auto& e : initialC) c0.push_back(e.str());
        j["initialC"] = std::move(c0);
        j["removalStepMode"] =
            removalStepMode == RemovalStepMode::TotalPerSide ? "total-per-side" : "per-evaluation";
        j["removalSweep"] = "snapshot-apply-after";
        j["tieBreak"] = "list-position";
        return j;
    }
};

struct PsiState {
    std::uint64_t k = 2;
    HyperInt M = HyperInt::exact(1);
    std::vector<MachineIndex> C;
    std::set<MachineIndex> everInC;
    std::vector<HyperInt> mTable;  // M after iteration m
    std::vector<HyperInt> sTable;  // step account after iteration m
    HyperInt stepAccount = HyperInt::exact(0);
};

// --- Event builders (shared with the reference implementation) -----------------

namespace psievent {

inline OrderedJson iterStart(std::uint64_t seq, std::uint64_t m) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "IterStart";
    j["m"] = m;
    return j;
}

inline OrderedJson haltObserved(std::uint64_t seq, std::uint64_t m, const MachineIndex& e,
                                const HyperInt& value, const HyperInt& steps) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "HaltObserved";
    j["m"] = m;
    j["e"] = e.str();
    j["value"] = toText(value);
    j["steps"] = toText(steps);
    return j;
}

inline OrderedJson removalCheck(std::uint64_t seq, std::uint64_t m, const MachineIndex& e,
                                std::uint64_t l, const std::string& gammaOutcome,
                                const std::string& iterOutcome, bool removed) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "RemovalCheck";
    j["m"] = m;
    j["e"] = e.str();
    j["l"] = l;
    j["gamma"] = gammaOutcome;
    j["iter"] = iterOutcome;
    j["removed"] = removed;
    return j;
}

inline OrderedJson removal(std::uint64_t seq, std::uint64_t m, const MachineIndex& e) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "Removal";
    j["m"] = m;
    j["e"] = e.str();
    return j;
}

inline OrderedJson elseBranch(std::uint64_t seq, std::uint64_t m, std::uint64_t newK,
                              const MachineIndex& added) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "ElseBranch";
    j["m"] = m;
    j["k"] = newK;
    j["added"] = added.str();
    return j;
}

inline OrderedJson mUpdate(std::uint64_t seq, std::uint64_t m, const HyperInt& M) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "MUpdate";
    j["m"] = m;
    j["M"] = toText(M);
    return j;
}

inline OrderedJson output(std::uint64_t seq, const HyperInt& M) {
    OrderedJson j;
    j["seq"] = seq;
    j["type"] = "Output";
    j["M"] = toText(M);
    return j;
}

}  // namespace psievent

// --- Shared pieces of the construction ------------------------------------------

namespace detail {

inline HyperInt scheduleBudget(const PsiConfig& cfg, std::uint64_t k, std::uint64_t m) {
    switch (cfg.schedule) {
        case ScheduleKind::Paper:
            return towerH(k, HyperInt::exact(m));
        case ScheduleKind::Scaled: {
            BigNat b = 1;
            for (std::uint64_t i = 0; i < k; ++i) b *= (m + 2);
            return HyperInt::exact(b);
        }
        case ScheduleKind::Ordinal: {
            static thread_local std::map<std::pair<std::string, std::uint64_t>, HyperInt> cache;
            // values depend only on (alpha_k, m)
            Ordinal ak = fundSeq(cfg.scheduleAlpha, k);
            auto key = std::make_pair(toText(ak), m);
            if (auto it = cache.find(key); it != cache.end()) return it->second;
            HonestFn pow2 = HonestFn::fromBuiltin(*cfg.catalog, "POW2");
            HyperInt v = transIterate(pow2, ak, m);
            cache.emplace(key, v);
            return v;
        }
    }
    throw Error("bad schedule");
}

struct RemovalSideOutcome {
    bool halted = false;
    HyperInt value;
    BigNat spent;
    std::string note;  // trace encoding
};

// Run the target representative on l for m steps.
inline RemovalSideOutcome gammaSide(const PsiConfig& cfg, std::uint64_t l, std::uint64_t m) {
    auto d = decode(*cfg.catalog, cfg.gamma);
    if (d.kind == DecodedMachine::Kind::Catalog) {
        if (const auto* b = std::get_if<BuiltinSpec>(&cfg.catalog->at(d.catalogPos).payload)) {
            if (!b->haltsOn(l)) throw GammaDivergedError(l);
        }
    }
    RunOutcome r = run(*cfg.catalog, cfg.gamma, l, HyperInt::exact(m), cfg.cap);
    RemovalSideOutcome out;
    if (r.halted()) {
        out.halted = true;
        out.value = r.output;
        out.spent = r.steps.exactValue();
        out.note = "halted:" + toText(r.output) + "@" + toText(r.steps);
    } else {
        out.spent = m;
        out.note = "not-within-m";
    }
    return out;
}

// One application of max[self, assoc_e]: a table read costs one step, the
// associate evaluation costs its run steps within the remaining allowance.
// Values at or above m abort the check as non-removing.
template <typename PsiValueFn>
struct IterSide {
    const PsiConfig& cfg;
    const MachineIndex& e;
    std::uint64_t m;
    PsiValueFn psiValue;  // BigNat l -> HyperInt, l < m
    BigNat spent = 0;

    struct Abort {
        std::string reason;
    };

    HyperInt apply(const HyperInt& v) {
        const BigNat allowance = m;
        // self read
        spent += 1;
        if (cfg.removalStepMode == RemovalStepMode::TotalPerSide && spent > allowance)
            throw Abort{"abort-cost"};
        HyperInt self = psiValue(v.exactValue());
        // associate evaluation
        BigNat hatBudget = cfg.removalStepMode == RemovalStepMode::TotalPerSide
                               ? allowance - spent
                               : allowance;
        RunOutcome hat =
            runAssocHat(*cfg.catalog, e, v.exactValue(), HyperInt::exact(hatBudget), cfg.cap);
        if (!hat.halted()) throw Abort{"not-halted"};
        spent += hat.steps.exactValue();
        HyperInt next = maxH(self, hat.output);
        if (compare(next, HyperInt::exact(m)) != Ordering::Less) throw Abort{"abort-value"};
        return next;
    }
};

// The e-fold iterate of max[self, assoc_e] at l, bounded by m steps per
// side; any produced number >= m aborts.
template <typename PsiValueFn>
inline RemovalSideOutcome iterSideFinite(const PsiConfig& cfg, const MachineIndex& e,
                                         std::uint64_t l, std::uint64_t m, PsiValueFn psiValue) {
    IterSide<PsiValueFn> side{cfg, e, m, psiValue};
    RemovalSideOutcome out;
    HyperInt v = HyperInt::exact(l);
    try {
        for (BigNat j = 0; j < e; ++j) v = side.apply(v);
        out.halted = true;
        out.value = v;
        out.spent = side.spent;
        out.note = "value:" + toText(v) + "@E:" + side.spent.str();
    } catch (const typename IterSide<PsiValueFn>::Abort& a) {
        out.spent = side.spent;
        out.note = a.reason;
    }
    return out;
}

// Ordinal variant: iterate transfinitely at fundSeq(alpha, e), with the
// m-step allowance as recursion budget; exhaustion is non-removing.
template <typename PsiValueFn>
inline RemovalSideOutcome iterSideOrdinal(const PsiConfig& cfg, const MachineIndex& e,
                                          std::uint64_t l, std::uint64_t m, PsiValueFn psiValue) {
    RemovalSideOutcome out;
    if (e > (BigNat(1) << 32)) {
        out.note = "abort-budget";
        return out;
    }
    IterSide<PsiValueFn> side{cfg, e, m, psiValue};
    auto ev = [&side, m](const BigNat& n, const EvalLimits&) -> RunOutcome {
        if (n >= m) throw typename IterSide<PsiValueFn>::Abort{"abort-value"};
        HyperInt v = side.apply(HyperInt::exact(n));
        return RunOutcome::halted(v, HyperInt::exact(1));
    };
    auto h = HonestFn::fromEvaluator("removal-iterate", ev);
    try {
        Ordinal alphaE = fundSeq(cfg.iterateAlpha, e.convert_to<std::uint64_t>());
        HyperInt v = transIterate(h, alphaE, l, IterBudget{m, 64});
        if (compare(v, HyperInt::exact(m)) != Ordering::Less)
            throw typename IterSide<PsiValueFn>::Abort{"abort-value"};
        out.halted = true;
        out.value = v;
        out.spent = side.spent;
        out.note = "value:" + toText(v) + "@E:" + side.spent.str();
    } catch (const typename IterSide<PsiValueFn>::Abort& a) {
        out.spent = side.spent;
        out.note = a.reason;
    } catch (const BudgetExhaustedError&) {
        out.spent = side.spent;
        out.note = "abort-budget";
    } catch (const IterateOverflowError&) {
        out.spent = side.spent;
        out.note = "abort-value";
    }
    return out;
}

template <typename PsiValueFn>
inline RemovalSideOutcome iterSide(const PsiConfig& cfg, const MachineIndex& e, std::uint64_t l,
                                   std::uint64_t m, PsiValueFn psiValue) {
    if (cfg.iterateMode == IterateMode::FinitePower)
        return iterSideFinite(cfg, e, l, m, psiValue);
    return iterSideOrdinal(cfg, e, l, m, psiValue);
}

}  // namespace detail

// --- The engine -------------------------------------------------------------------

struct PsiResult {
    HyperInt M;
    Trace trace;
    PsiState finalState;
};

class PsiEngine {
public:
    explicit PsiEngine(PsiConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.catalog == nullptr) throw Error("psi config needs a catalog");
        for (const auto& e : cfg_.initialC) {
            state_.C.push_back(e);
            state_.everInC.insert(e);
        }
        validateSchedule();
    }

    const PsiConfig& config() const { return cfg_; }
    const PsiState& state() const { return state_; }
    const std::vector<OrderedJson>& events() const { return events_; }

    void advanceTo(std::uint64_t n) {
        while (state_.mTable.size() <= n) iterateOnce();
    }

    HyperInt value(std::uint64_t n) {
        advanceTo(n);
        return state_.mTable[n];
    }

    HyperInt cost(std::uint64_t n) {
        advanceTo(n);
        return state_.sTable[n];
    }

    /// Events of iterations 0..n plus the output record, exactly as a fresh
    /// run to n would emit them.
    std::vector<OrderedJson> eventsFor(std::uint64_t n) {
        advanceTo(n);
        std::size_t end = n + 1 < iterEventStart_.size() ? iterEventStart_[n + 1] : events_.size();
        std::vector<OrderedJson> out(events_.begin(), events_.begin() + end);
        out.push_back(psievent::output(end, state_.mTable[n]));
        return out;
    }

private:
    void validateSchedule() {
        for (std::uint64_t m = 0; m <= 3; ++m) {
            for (std::uint64_t k = 2; k <= 4; ++k) {
                HyperInt lo = detail::scheduleBudget(cfg_, k, m);
                HyperInt hi = detail::scheduleBudget(cfg_, k + 1, m);
                if (compare(lo, hi) != Ordering::Less)
                    throw Error("schedule is not strictly increasing in k");
            }
            if (cfg_.schedule != ScheduleKind::Scaled) {
                if (compare(detail::scheduleBudget(cfg_, 2, m), exp2H(HyperInt::exact(m))) ==
                    Ordering::Less)
                    throw Error("schedule must dominate 2^m");
            }
        }
    }

    void emit(OrderedJson j) { events_.push_back(std::move(j)); }
    std::uint64_t seq() const { return events_.size(); }

    void addStep(const HyperInt& s) { state_.stepAccount = addSaturating(state_.stepAccount, s); }

    void iterateOnce() {
        const std::uint64_t m = state_.mTable.size();
        iterEventStart_.push_back(events_.size());
        emit(psievent::iterStart(seq(), m));

        const HyperInt budget = detail::scheduleBudget(cfg_, state_.k, m);
        std::vector<detail::TaskProfile> profiles;
        profiles.reserve(state_.C.size());
        for (const auto& e : state_.C) {
            profiles.push_back({runAssocHat(*cfg_.catalog, e, m, budget, cfg_.cap),
                                machineLabel(*cfg_.catalog, e), m});
        }
        auto winner = detail::pickFirstHalt(profiles);

        // Steps spent dovetailing: every live task advances until the first
        // halt (or its budget).
        for (const auto& p : profiles) {
            if (winner) {
                const HyperInt& w = profiles[*winner].outcome.steps;
                addStep(p.outcome.halted() ? minH(p.outcome.steps, w) : minH(budget, w));
            } else {
                addStep(p.outcome.steps);
            }
        }

        if (winner) {
            const MachineIndex e0 = state_.C[*winner];
            const RunOutcome& ro = profiles[*winner].outcome;
            emit(psievent::haltObserved(seq(), m, e0, ro.output, ro.steps));
            removalSweep(m);
            state_.M = maxH(maxH(state_.M, ro.output), exp2H(HyperInt::exact(m)));
            emit(psievent::mUpdate(seq(), m, state_.M));
        } else {
            state_.k += 1;
            MachineIndex i = 0;
            while (state_.everInC.count(i)) ++i;
            state_.C.push_back(i);
            state_.everInC.insert(i);
            HyperInt pumped = detail::scheduleBudget(cfg_, state_.k, m);
            state_.M = maxH(maxH(state_.M, pumped), exp2H(HyperInt::exact(m)));
            emit(psievent::elseBranch(seq(), m, state_.k, i));
            emit(psievent::mUpdate(seq(), m, state_.M));
        }
        addStep(HyperInt::exact(1));  // per-iteration bookkeeping
        state_.mTable.push_back(state_.M);
        state_.sTable.push_back(state_.stepAccount);
    }

    void removalSweep(std::uint64_t m) {
        auto psiValue = [this, m](const BigNat& l) -> HyperInt {
            return state_.mTable.at(l.convert_to<std::size_t>());
        };
        std::vector<MachineIndex> snapshot = state_.C;
        std::set<MachineIndex> marked;
        for (const auto& e : snapshot) {
            for (std::uint64_t l = 0; l < m; ++l) {
                auto gamma = detail::gammaSide(cfg_, l, m);
                auto iter = detail::iterSide(cfg_, e, l, m, psiValue);
                addStep(HyperInt::exact(gamma.spent));
                addStep(HyperInt::exact(iter.spent));
                const bool removed = gamma.halted && iter.halted &&
                                     compare(iter.value, gamma.value) == Ordering::Less;
                emit(psievent::removalCheck(seq(), m, e, l, gamma.note, iter.note, removed));
                if (removed) marked.insert(e);
            }
        }
        for (const auto& e : snapshot) {
            if (!marked.count(e)) continue;
            emit(psievent::removal(seq(), m, e));
            std::erase(state_.C, e);
        }
    }

    PsiConfig cfg_;
    PsiState state_;
    std::vector<OrderedJson> events_;
    std::vector<std::size_t> iterEventStart_;
};

inline OrderedJson traceHeader(const PsiConfig& cfg, std::uint64_t n) {
    OrderedJson h;
    h["format"] = kTraceFormat;
    h["config"] = cfg.echo();
    h["n"] = n;
    return h;
}

/// One full run: the value of M after iteration n, the complete trace, and
/// the final state.
inline PsiResult psiRun(const PsiConfig& cfg, std::uint64_t n) {
    PsiEngine engine(cfg);
    engine.advanceTo(n);
    Trace t;
    t.header = traceHeader(cfg, n);
    t.events = engine.eventsFor(n);
    return PsiResult{engine.state().mTable[n], std::move(t), engine.state()};
}

/// Handle whose value at n is the run's M after iteration n and whose
/// evalCost is the accounted steps; iterations are shared across calls.
inline HonestFn psiAsHonestFn(const PsiConfig& cfg) {
    auto engine = std::make_shared<PsiEngine>(cfg);
    auto ev = [engine](const BigNat& n, const EvalLimits&) -> RunOutcome {
        const std::uint64_t nn = n.convert_to<std::uint64_t>();
        return RunOutcome::halted(engine->value(nn), engine->cost(nn));
    };
    return HonestFn::fromEvaluator("PSI(" + cfg.scheduleName() + ")", std::move(ev), nullptr,
                                   true);
}

/// The corollary's witness a = min[x, b], composed here because the
/// construction pairs it with its own handle.
inline HonestFn capWitnessConfig(HonestFn x, HonestFn b) {
    return capWitness(std::move(x), std::move(b));
}

}  // namespace hed
