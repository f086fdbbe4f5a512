#pragma once

// Ordinals below epsilon_0 in Cantor normal form: norm, comparison,
// bounded-norm enumeration, fundamental sequences, and the transfinite
// iterate f_alpha with explicit budgets.
//
// Text grammar: `0`, decimal naturals, `w`, `w^<atom>`, `w^(<expr>)`,
// `*<coeff>`, `+` with strictly decreasing exponents required.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hed/honest.hpp"

namespace hed {

class Ordinal;
Ordering compareOrd(const Ordinal& a, const Ordinal& b);

/// Cantor normal form: a sum of terms w^exponent * coefficient with strictly
/// decreasing exponents; the empty sum is 0. epsilon_0 itself is not
/// representable (see EpsilonZeroMarker for its fundamental sequence).
class Ordinal {
public:
    struct Term;
    using TermList = std::vector<Term>;

    Ordinal() = default;

    static Ordinal zero() { return {}; }
    static Ordinal natural(std::uint64_t n);
    static Ordinal omega();
    static Ordinal omegaPow(const Ordinal& exponent, std::uint64_t coefficient = 1);
    static Ordinal fromTerms(TermList terms);  // validates CNF shape

    const TermList& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }
    bool isNatural() const;
    std::optional<std::uint64_t> asNatural() const;

    std::uint64_t norm() const;

    bool operator==(const Ordinal& o) const { return compareOrd(*this, o) == Ordering::Equal; }
    bool operator!=(const Ordinal& o) const { return !(*this == o); }

private:
    TermList terms_;
};

struct Ordinal::Term {
    Ordinal exponent;
    std::uint64_t coefficient = 1;
};

inline Ordinal Ordinal::natural(std::uint64_t n) {
    Ordinal o;
    if (n > 0) o.terms_.push_back(Term{Ordinal{}, n});
    return o;
}

inline Ordinal Ordinal::omega() { return omegaPow(natural(1)); }

inline Ordinal Ordinal::omegaPow(const Ordinal& exponent, std::uint64_t coefficient) {
    Ordinal o;
    if (coefficient == 0) throw Error("coefficient must be positive");
    o.terms_.push_back(Term{exponent, coefficient});
    return o;
}

inline Ordinal Ordinal::fromTerms(TermList terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coefficient == 0) throw Error("coefficient must be positive");
        if (i + 1 < terms.size() &&
            compareOrd(terms[i].exponent, terms[i + 1].exponent) != Ordering::Greater)
            throw Error("exponents must strictly decrease");
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return o;
}

inline bool Ordinal::isNatural() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.isZero());
}

inline std::optional<std::uint64_t> Ordinal::asNatural() const {
    if (terms_.empty()) return 0;
    if (terms_.size() == 1 && terms_[0].exponent.isZero()) return terms_[0].coefficient;
    return std::nullopt;
}

/// N(0) = 0, N(b + c) = N(b) + N(c), N(w^b) = 1 + N(b).
inline std::uint64_t Ordinal::norm() const {
    std::uint64_t n = 0;
    for (const auto& t : terms_) n += t.coefficient * (1 + t.exponent.norm());
    return n;
}

inline Ordering compareOrd(const Ordinal& a, const Ordinal& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
        Ordering e = compareOrd(ta[i].exponent, tb[i].exponent);
        if (e != Ordering::Equal) return e;
        if (ta[i].coefficient != tb[i].coefficient)
            return ta[i].coefficient < tb[i].coefficient ? Ordering::Less : Ordering::Greater;
    }
    if (ta.size() != tb.size()) return ta.size() < tb.size() ? Ordering::Less : Ordering::Greater;
    return Ordering::Equal;
}

// --- Text form -----------------------------------------------------------------

inline std::string toText(const Ordinal& a);

namespace detail {

inline std::string exponentText(const Ordinal& e) {
    // naturals and plain w stay bare; anything else is parenthesized
    if (e.isNatural()) return toText(e);
    if (e == Ordinal::omega()) return "w";
    return "(" + toText(e) + ")";
}

}  // namespace detail

inline std::string toText(const Ordinal& a) {
    if (a.isZero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : a.terms()) {
        if (!first) out += " + ";
        first = false;
        if (t.exponent.isZero()) {
            out += std::to_string(t.coefficient);
            continue;
        }
        if (t.exponent == Ordinal::natural(1)) {
            out += "w";
        } else {
            out += "w^" + detail::exponentText(t.exponent);
        }
        if (t.coefficient > 1) out += "*" + std::to_string(t.coefficient);
    }
    return out;
}

namespace detail {

class OrdinalParser {
public:
    explicit OrdinalParser(std::string_view s) : s_(s) {}

    Ordinal parse() {
        Ordinal o = parseExpr();
        skipWs();
        if (pos_ != s_.size()) throw ParseError(pos_, "unexpected trailing input");
        return o;
    }

private:
    void skipWs() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    bool peekIs(char c) {
        skipWs();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    std::uint64_t parseNat() {
        skipWs();
        if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9')
            throw ParseError(pos_, "expected a decimal natural");
        std::uint64_t v = 0;
        while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
            v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
            ++pos_;
        }
        return v;
    }

    Ordinal parseExpr() {
        Ordinal::TermList terms;
        appendTerm(terms, true);
        while (peekIs('+')) {
            ++pos_;
            appendTerm(terms, false);
        }
        if (terms.size() == 1 && terms[0].coefficient == 0) terms.clear();
        return Ordinal::fromTerms(std::move(terms));
    }

    void appendTerm(Ordinal::TermList& terms, bool isFirst) {
        skipWs();
        const std::size_t at = pos_;
        if (pos_ >= s_.size()) throw ParseError(pos_, "expected a term");
        if (s_[pos_] == 'w') {
            ++pos_;
            Ordinal exponent = Ordinal::natural(1);
            if (peekIs('^')) {
                ++pos_;
                exponent = parseExponentAtom();
            }
            std::uint64_t coeff = 1;
            if (peekIs('*')) {
                ++pos_;
                coeff = parseNat();
                if (coeff == 0) throw ParseError(at, "coefficient must be positive");
            }
            terms.push_back(Ordinal::Term{exponent, coeff});
        } else {
            std::uint64_t n = parseNat();
            if (n == 0 && (!isFirst || peekIs('+')))
                throw ParseError(at, "a zero term is only allowed alone");
            terms.push_back(Ordinal::Term{Ordinal::zero(), n});
        }
        if (terms.size() > 1) {
            const auto& prev = terms[terms.size() - 2];
            const auto& cur = terms.back();
            if (compareOrd(prev.exponent, cur.exponent) != Ordering::Greater)
                throw ParseError(at, "terms must be in strictly decreasing exponent order");
        }
    }

    Ordinal parseExponentAtom() {
        skipWs();
        if (pos_ >= s_.size()) throw ParseError(pos_, "expected an exponent");
        if (s_[pos_] == '(') {
            ++pos_;
            Ordinal e = parseExpr();
            if (!peekIs(')')) throw ParseError(pos_, "expected ')'");
            ++pos_;
            return e;
        }
        if (s_[pos_] == 'w') {
            ++pos_;
            return Ordinal::omega();
        }
        return Ordinal::natural(parseNat());
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Ordinal parseOrdinal(std::string_view s) { return detail::OrdinalParser(s).parse(); }

// --- Bounded-norm enumeration ----------------------------------------------------

namespace detail {

struct EnumCtx {
    bool unboundedNorm = false;
    BigNat normBound;       // ignored when unboundedNorm
    std::size_t remaining;  // count budget; hitting zero aborts
};

inline bool normAllows(const EnumCtx& ctx, const BigNat& used, std::uint64_t extra) {
    if (ctx.unboundedNorm) return true;
    return used + extra <= ctx.normBound;
}

bool enumBelowInto(const Ordinal& a, const BigNat& used, EnumCtx& ctx,
                   std::vector<Ordinal>& out);

// All b with every exponent < eBound (that is, b < w^eBound) within budget.
inline bool enumLtOmegaPowInto(const Ordinal& eBound, const BigNat& used, EnumCtx& ctx,
                               std::vector<Ordinal>& out) {
    if (ctx.remaining == 0) return false;
    --ctx.remaining;
    out.push_back(Ordinal::zero());
    if (eBound.isZero()) return true;
    std::vector<Ordinal> exps;
    if (!enumBelowInto(eBound, used + 1, ctx, exps)) return false;
    for (const Ordinal& f : exps) {
        const std::uint64_t unit = 1 + f.norm();
        for (std::uint64_t c = 1; normAllows(ctx, used, c * unit); ++c) {
            std::vector<Ordinal> tails;
            if (!enumLtOmegaPowInto(f, used + c * unit, ctx, tails)) return false;
            for (const Ordinal& tail : tails) {
                if (ctx.remaining == 0) return false;
                --ctx.remaining;
                Ordinal::TermList ts;
                ts.push_back(Ordinal::Term{f, c});
                for (const auto& t : tail.terms()) ts.push_back(t);
                out.push_back(Ordinal::fromTerms(std::move(ts)));
            }
            if (ctx.unboundedNorm) return false;  // c would run forever
        }
    }
    return true;
}

inline bool enumBelowInto(const Ordinal& a, const BigNat& used, EnumCtx& ctx,
                          std::vector<Ordinal>& out) {
    if (a.isZero()) return true;
    const auto& head = a.terms().front();
    const std::uint64_t unit = 1 + head.exponent.norm();

    // (b) everything below w^e0
    if (!enumLtOmegaPowInto(head.exponent, used, ctx, out)) return false;

    // (c) same leading exponent, smaller coefficient
    for (std::uint64_t d = 1; d < head.coefficient; ++d) {
        if (!normAllows(ctx, used, d * unit)) break;
        std::vector<Ordinal> tails;
        if (!enumLtOmegaPowInto(head.exponent, used + d * unit, ctx, tails)) return false;
        for (const Ordinal& tail : tails) {
            if (ctx.remaining == 0) return false;
            --ctx.remaining;
            Ordinal::TermList ts;
            ts.push_back(Ordinal::Term{head.exponent, d});
            for (const auto& t : tail.terms()) ts.push_back(t);
            out.push_back(Ordinal::fromTerms(std::move(ts)));
        }
    }

    // (d) full leading term, strictly smaller rest
    if (!normAllows(ctx, used, head.coefficient * unit)) return true;
    Ordinal rest = Ordinal::fromTerms(
        Ordinal::TermList(a.terms().begin() + 1, a.terms().end()));
    std::vector<Ordinal> rests;
    if (!enumBelowInto(rest, used + head.coefficient * unit, ctx, rests)) return false;
    for (const Ordinal& r : rests) {
        if (ctx.remaining == 0) return false;
        --ctx.remaining;
        Ordinal::TermList ts;
        ts.push_back(Ordinal::Term{head.exponent, head.coefficient});
        for (const auto& t : r.terms()) ts.push_back(t);
        out.push_back(Ordinal::fromTerms(std::move(ts)));
    }
    return true;
}

inline std::optional<std::vector<Ordinal>> enumBelowCapped(const Ordinal& a, bool unbounded,
                                                           const BigNat& bound,
                                                           std::size_t maxCount) {
    EnumCtx ctx{unbounded, bound, maxCount};
    std::vector<Ordinal> out;
    if (!enumBelowInto(a, 0, ctx, out)) return std::nullopt;
    std::sort(out.begin(), out.end(),
              [](const Ordinal& x, const Ordinal& y) { return compareOrd(x, y) == Ordering::Less; });
    return out;
}

}  // namespace detail

/// Exactly {b < a : N(b) <= bound}, ascending. The set is finite because a
/// norm budget admits only finitely many CNF terms.
inline std::vector<Ordinal> enumBelowWithNorm(const Ordinal& a, std::uint64_t bound) {
    auto r = detail::enumBelowCapped(a, false, BigNat(bound), 5'000'000);
    if (!r) throw Error("enumeration too large");
    return *r;
}

// --- SLim and fundamental sequences -----------------------------------------------

struct EpsilonZeroMarker {};

/// a = w^b for some b > 0.
inline bool inSLim(const Ordinal& a) {
    return a.terms().size() == 1 && a.terms()[0].coefficient == 1 &&
           !a.terms()[0].exponent.isZero();
}

inline bool inSLim(EpsilonZeroMarker) { return true; }

namespace detail {

inline bool isSuccessorOrdinal(const Ordinal& a) {
    return !a.isZero() && a.terms().back().exponent.isZero();
}

// a - 1 for successor a.
inline Ordinal predecessor(const Ordinal& a) {
    Ordinal::TermList ts = a.terms();
    if (ts.back().coefficient > 1) {
        --ts.back().coefficient;
    } else {
        ts.pop_back();
    }
    return Ordinal::fromTerms(std::move(ts));
}

Ordinal fundSeqOmegaPow(const Ordinal& exponent, std::uint64_t k);

// Standard sequence for an arbitrary limit ordinal: recurse through the last
// CNF term.
inline Ordinal limitFundSeq(const Ordinal& a, std::uint64_t k) {
    const auto& last = a.terms().back();
    Ordinal::TermList prefix = a.terms();
    prefix.pop_back();
    if (last.coefficient > 1)
        prefix.push_back(Ordinal::Term{last.exponent, last.coefficient - 1});
    Ordinal step = fundSeqOmegaPow(last.exponent, k);
    for (const auto& t : step.terms()) prefix.push_back(t);
    return Ordinal::fromTerms(std::move(prefix));
}

// Sequence for w^exponent with exponent > 0.
inline Ordinal fundSeqOmegaPow(const Ordinal& exponent, std::uint64_t k) {
    if (isSuccessorOrdinal(exponent)) {
        // (w^(g+1))_k = w^g * (k+1)
        Ordinal g = predecessor(exponent);
        if (g.isZero()) return Ordinal::natural(k + 1);
        return Ordinal::omegaPow(g, k + 1);
    }
    return Ordinal::omegaPow(limitFundSeq(exponent, k));
}

}  // namespace detail

/// Standard Cantor assignment, strictly increasing with limit a.
inline Ordinal fundSeq(const Ordinal& a, std::uint64_t k) {
    if (!inSLim(a)) throw NotSLimError();
    return detail::fundSeqOmegaPow(a.terms()[0].exponent, k);
}

/// (epsilon_0)_k = w-tower of height k, starting at 1.
inline Ordinal fundSeq(EpsilonZeroMarker, std::uint64_t k) {
    Ordinal t = Ordinal::natural(1);
    for (std::uint64_t i = 0; i < k; ++i) t = Ordinal::omegaPow(t);
    return t;
}

// --- Transfinite iterates -----------------------------------------------------------

/// The f_alpha recursion is superexponentially expensive; both limits abort
/// loudly instead of truncating.
struct IterBudget {
    std::uint64_t maxRecursionNodes = 200'000;
    std::uint64_t maxValueBits = 1u << 20;
};

namespace detail {

struct TransCtx {
    HonestFn* f;
    IterBudget budget;
    EvalLimits limits;
    std::uint64_t nodes = 0;
    std::map<std::pair<std::string, std::string>, HyperInt> memo;
};

inline HyperInt applyBase(TransCtx& ctx, const HyperInt& x) {
    if (x.isExact()) {
        const BigNat shifted = x.exactValue() + 1;
        if (boost::multiprecision::msb(shifted) + 1 > ctx.budget.maxValueBits)
            throw BudgetExhaustedError(ctx.budget.maxValueBits, "value bits");
        return ctx.f->evalValue(x.exactValue(), ctx.limits);
    }
    auto sym = ctx.f->evalSym(x);
    if (!sym) throw IterateOverflowError(0);
    return *sym;
}

inline HyperInt transIterateRec(TransCtx& ctx, const Ordinal& alpha, const HyperInt& x) {
    if (alpha.isZero()) return applyBase(ctx, x);
    const auto key = std::make_pair(toText(alpha), toText(x));
    if (auto it = ctx.memo.find(key); it != ctx.memo.end()) return it->second;
    if (++ctx.nodes > ctx.budget.maxRecursionNodes)
        throw BudgetExhaustedError(ctx.budget.maxRecursionNodes);

    const bool unbounded = !x.isExact();
    BigNat bound = 0;
    if (!unbounded) bound = BigNat(alpha.norm()) + x.exactValue();
    const std::size_t cap = static_cast<std::size_t>(
        ctx.budget.maxRecursionNodes > ctx.nodes ? ctx.budget.maxRecursionNodes - ctx.nodes + 1
                                                 : 1);
    auto candidates = detail::enumBelowCapped(alpha, unbounded, bound, cap);
    if (!candidates) throw BudgetExhaustedError(ctx.budget.maxRecursionNodes, "candidate set");

    std::optional<HyperInt> best;
    for (const Ordinal& beta : *candidates) {
        HyperInt inner = transIterateRec(ctx, beta, x);
        HyperInt outer = transIterateRec(ctx, beta, inner);
        if (!best || compare(outer, *best) == Ordering::Greater) best = outer;
    }
    ctx.memo.emplace(key, *best);
    return *best;
}

}  // namespace detail

/// f_0 = f; f_alpha(n) = max{f_beta(f_beta(n)) : beta < alpha, N(beta) <=
/// N(alpha) + n}, evaluated with memoization on (beta, n).
inline HyperInt transIterate(HonestFn& f, const Ordinal& alpha, const BigNat& n,
                             const IterBudget& budget = {}, const EvalLimits& limits = {}) {
    detail::TransCtx ctx{&f, budget, limits};
    return detail::transIterateRec(ctx, alpha, HyperInt::exact(n));
}

}  // namespace hed
