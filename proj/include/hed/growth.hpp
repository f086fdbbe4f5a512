#pragma once

// Finite iteration and growth-rate comparison on bounded ranges.
//
// Both proxies are semi-decisions: a witness certifies domination on the
// tested range, a failure refutes nothing beyond (kMax, range).
//
// Iterates of closed-form handles are evaluated symbolically, so budgets
// like 2_k^x compare exactly however large. Machine-backed handles feed
// concrete values back as inputs; an iterate that leaves the concrete
// regime counts as dominating everything representable in the proxies and
// is a flagged overflow in the standalone operation.

#include <cstdint>
#include <optional>
#include <vector>

#include "hed/honest.hpp"

namespace hed {

// Largest value that may be fed back as a concrete machine input.
inline constexpr std::uint64_t kMaxFeedbackInput = 1u << 16;

/// k-fold application with concrete feedback; every produced value must stay
/// exact and feedable or the iterate aborts loudly.
inline HyperInt iterate(HonestFn& f, std::uint64_t k, const BigNat& x,
                        const EvalLimits& lim = {}) {
    HyperInt v = HyperInt::exact(x);
    for (std::uint64_t j = 1; j <= k; ++j) {
        if (!v.isExact() || v.exactValue() > kMaxFeedbackInput) throw IterateOverflowError(j - 1);
        v = f.evalValue(v.exactValue(), lim);
        if (!v.isExact()) throw IterateOverflowError(j);
    }
    return v;
}

namespace detail {

// Iterate for domination checks: nullopt means the value escaped every
// representable bound (treated as +infinity by callers). Symbolic handles
// never overflow except where their formula declines symbolic input.
inline std::optional<HyperInt> iterateFlex(HonestFn& f, std::uint64_t k, const BigNat& x,
                                           const EvalLimits& lim) {
    HyperInt v = HyperInt::exact(x);
    if (f.symbolicCapable()) {
        for (std::uint64_t j = 0; j < k; ++j) {
            auto next = f.evalSym(v);
            if (!next) return std::nullopt;
            v = *next;
        }
        return v;
    }
    for (std::uint64_t j = 0; j < k; ++j) {
        if (!v.isExact() || v.exactValue() > kMaxFeedbackInput) return std::nullopt;
        v = f.evalValue(v.exactValue(), lim);
    }
    return v;
}

}  // namespace detail

struct DominationResult {
    bool dominated = true;
    BigNat counterexampleX;
    HyperInt fx, gx;
};

/// Pointwise f(x) <= g(x) on [from..to], reporting the first failure.
inline DominationResult dominatedOn(HonestFn& f, HonestFn& g, std::uint64_t from, std::uint64_t to,
                                    const EvalLimits& lim = {}) {
    for (std::uint64_t x = from; x <= to; ++x) {
        HyperInt fx = f.evalValue(x, lim);
        HyperInt gx = g.evalValue(x, lim);
        if (compare(fx, gx) == Ordering::Greater) return {false, BigNat(x), fx, gx};
    }
    return {};
}

struct GrowthCounterexample {
    std::uint64_t k = 0;
    std::uint64_t m = 0;  // llEProxy only
    std::uint64_t x = 0;
    HyperInt fx;
    std::optional<HyperInt> gkx;  // nullopt: iterate escaped the regime
};

struct ComparatorVerdict {
    std::optional<std::uint64_t> witnessK;
    std::uint64_t kMax = 0;
    std::vector<GrowthCounterexample> counterexamples;

    bool witnessed() const { return witnessK.has_value(); }
};

/// Smallest k <= kMax with f <= g^k on [from..to], else every counterexample
/// found. An escaped g-iterate counts toward the witness.
inline ComparatorVerdict leqEProxy(HonestFn& f, HonestFn& g, std::uint64_t kMax,
                                   std::uint64_t from = 0, std::uint64_t to = 16,
                                   const EvalLimits& lim = {}) {
    ComparatorVerdict verdict;
    verdict.kMax = kMax;
    for (std::uint64_t k = 0; k <= kMax; ++k) {
        bool ok = true;
        for (std::uint64_t x = from; x <= to; ++x) {
            auto gk = detail::iterateFlex(g, k, x, lim);
            if (!gk) continue;
            HyperInt fx = f.evalValue(x, lim);
            if (compare(fx, *gk) == Ordering::Greater) {
                ok = false;
                verdict.counterexamples.push_back({k, 0, x, fx, gk});
            }
        }
        if (ok && !verdict.witnessK) {
            verdict.witnessK = k;
            return verdict;
        }
    }
    return verdict;
}

/// Smallest k <= kMax such that for every m <= mMax and every x in
/// [max(from, tailStart)..to], f^m(x) <= g^k(x).
inline ComparatorVerdict llEProxy(HonestFn& f, HonestFn& g, std::uint64_t kMax,
                                  std::uint64_t mMax, std::uint64_t tailStart,
                                  std::uint64_t from = 0, std::uint64_t to = 16,
                                  const EvalLimits& lim = {}) {
    ComparatorVerdict verdict;
    verdict.kMax = kMax;
    const std::uint64_t start = std::max(from, tailStart);
    for (std::uint64_t k = 0; k <= kMax; ++k) {
        bool ok = true;
        for (std::uint64_t m = 0; m <= mMax && ok; ++m) {
            for (std::uint64_t x = start; x <= to; ++x) {
                auto gk = detail::iterateFlex(g, k, x, lim);
                if (!gk) continue;
                auto fm = detail::iterateFlex(f, m, x, lim);
                if (!fm || compare(*fm, *gk) == Ordering::Greater) {
                    ok = false;
                    verdict.counterexamples.push_back({k, m, x, fm.value_or(HyperInt{}), gk});
                    break;
                }
            }
        }
        if (ok) {
            verdict.witnessK = k;
            return verdict;
        }
    }
    return verdict;
}

}  // namespace hed
