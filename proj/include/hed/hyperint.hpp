#pragma once

// Exact-or-tower integers.
//
// A HyperInt is either an exact arbitrary-precision natural or a symbolic
// tower 2_k^x (the k-th iterate of base-2 exponentiation applied to x).
// Canonical form: a tower whose full evaluation lies below 2^64 is stored
// exact, and a tower whose top would still exponentiate below that bound is
// re-expressed one level down. Comparison is a total order that agrees with
// the denoted integer values on every pair, including exact values that have
// grown past 2^64 through addition.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "hed/errors.hpp"

namespace hed {

using BigNat = boost::multiprecision::cpp_int;

enum class Ordering { Less, Equal, Greater };

inline Ordering flipOrdering(Ordering o) {
    if (o == Ordering::Less) return Ordering::Greater;
    if (o == Ordering::Greater) return Ordering::Less;
    return Ordering::Equal;
}

inline Ordering compareBig(const BigNat& a, const BigNat& b) {
    if (a < b) return Ordering::Less;
    if (a > b) return Ordering::Greater;
    return Ordering::Equal;
}

class HyperInt {
public:
    HyperInt() : top_(0), height_(0) {}

    static HyperInt exact(BigNat v) {
        HyperInt h;
        h.top_ = std::move(v);
        h.height_ = 0;
        return h;
    }

    static HyperInt exact(std::uint64_t v) { return exact(BigNat(v)); }

    // Canonicalizes: Tower(k, x) with 2^x below the bound collapses a level,
    // and a tower that bottoms out becomes exact.
    static HyperInt towerOf(BigNat height, BigNat top) {
        HyperInt h;
        h.top_ = std::move(top);
        h.height_ = std::move(height);
        h.normalize();
        return h;
    }

    bool isExact() const { return height_ == 0; }
    bool isTower() const { return height_ != 0; }

    const BigNat& exactValue() const {
        if (!isExact()) throw NotExactError();
        return top_;
    }

    const BigNat& top() const { return top_; }
    const BigNat& height() const { return height_; }

    // Set when a saturating operation absorbed a small factor or summand
    // into a tower; never part of value identity or serialization.
    bool saturated() const { return saturated_; }
    HyperInt withSaturated() const {
        HyperInt h = *this;
        h.saturated_ = true;
        return h;
    }

private:
    // 2^x stays below 2^64 exactly when x <= 63.
    static constexpr std::uint64_t kMaxCollapsibleTop = 63;

    void normalize() {
        while (height_ > 0 && top_ <= kMaxCollapsibleTop) {
            top_ = BigNat(1) << static_cast<unsigned>(top_);
            --height_;
        }
    }

    BigNat top_;     // exact value when height_ == 0, else the tower top
    BigNat height_;  // 0 = exact
    bool saturated_ = false;
};

namespace detail {

// Bit length of a positive natural (index of msb plus one).
inline BigNat bitLength(const BigNat& v) {
    return BigNat(boost::multiprecision::msb(v)) + 1;
}

inline bool isPowerOfTwo(const BigNat& v) {
    return v > 0 && (v & (v - 1)) == 0;
}

// e (exact, any size) versus canonical tower 2_h^t.
inline Ordering compareExactVsTower(const BigNat& e, const BigNat& h, const BigNat& t) {
    if (e == 0) return Ordering::Less;
    if (h > 1) {
        // Exponent is itself a canonical tower, hence >= 2^64; no exact value
        // held in memory reaches that many bits.
        return Ordering::Less;
    }
    // h == 1: compare e against 2^t with t >= 64.
    const BigNat len = bitLength(e);
    if (len <= t) return Ordering::Less;
    if (len == t + 1 && isPowerOfTwo(e)) return Ordering::Equal;
    return Ordering::Greater;
}

}  // namespace detail

// Total order agreeing with the denoted integers. Towers of equal height
// compare by top; unequal heights strip the shorter tower's exponentials
// from both sides, which preserves order and equality.
inline Ordering compare(const HyperInt& a, const HyperInt& b) {
    if (a.isExact() && b.isExact()) return compareBig(a.exactValue(), b.exactValue());
    if (a.isExact()) return detail::compareExactVsTower(a.exactValue(), b.height(), b.top());
    if (b.isExact()) return flipOrdering(detail::compareExactVsTower(b.exactValue(), a.height(), a.top()));
    if (a.height() == b.height()) return compareBig(a.top(), b.top());
    if (a.height() > b.height()) {
        return flipOrdering(detail::compareExactVsTower(b.top(), a.height() - b.height(), a.top()));
    }
    return detail::compareExactVsTower(a.top(), b.height() - a.height(), b.top());
}

inline bool operator==(const HyperInt& a, const HyperInt& b) {
    return compare(a, b) == Ordering::Equal;
}

inline bool operator!=(const HyperInt& a, const HyperInt& b) { return !(a == b); }

inline HyperInt exp2H(const HyperInt& a) {
    if (a.isTower()) {
        HyperInt r = HyperInt::towerOf(a.height() + 1, a.top());
        return a.saturated() ? r.withSaturated() : r;
    }
    return HyperInt::towerOf(1, a.exactValue());
}

// k-fold exp2; tower(0, m) = m. Once the value goes symbolic the remaining
// applications only add height.
inline HyperInt towerH(const BigNat& k, const HyperInt& m) {
    HyperInt v = m;
    BigNat remaining = k;
    while (remaining > 0 && v.isExact()) {
        v = exp2H(v);
        --remaining;
    }
    if (remaining > 0) v = HyperInt::towerOf(v.height() + remaining, v.top());
    return m.saturated() ? v.withSaturated() : v;
}

inline HyperInt towerH(std::uint64_t k, const HyperInt& m) { return towerH(BigNat(k), m); }

inline HyperInt maxH(const HyperInt& a, const HyperInt& b) {
    return compare(a, b) == Ordering::Less ? b : a;
}

inline HyperInt minH(const HyperInt& a, const HyperInt& b) {
    return compare(a, b) == Ordering::Greater ? b : a;
}

inline HyperInt addExact(const HyperInt& a, const HyperInt& b) {
    if (!a.isExact() || !b.isExact()) throw NotExactError();
    return HyperInt::exact(a.exactValue() + b.exactValue());
}

// Saturating sum for step accounting: exact when both operands are,
// otherwise the larger operand absorbs the smaller (flagged).
inline HyperInt addSaturating(const HyperInt& a, const HyperInt& b) {
    if (a.isExact() && b.isExact()) {
        HyperInt r = HyperInt::exact(a.exactValue() + b.exactValue());
        return (a.saturated() || b.saturated()) ? r.withSaturated() : r;
    }
    return maxH(a, b).withSaturated();
}

// A tower absorbs multiplication by a small factor (flagged); the factor is
// never large enough to move a tower past any value it is compared with.
inline HyperInt mulSmall(const HyperInt& a, std::uint64_t c) {
    if (c == 0) return HyperInt::exact(BigNat(0));
    if (a.isExact()) {
        HyperInt r = HyperInt::exact(a.exactValue() * c);
        return a.saturated() ? r.withSaturated() : r;
    }
    return a.withSaturated();
}

// Small powers, saturating on towers (under-approximation: sound for upper
// bound checks of the form cost <= c * f(n)^d).
inline HyperInt powSmall(const HyperInt& a, std::uint32_t d) {
    if (d == 0) return HyperInt::exact(BigNat(1));
    if (a.isExact()) {
        BigNat r = 1;
        for (std::uint32_t i = 0; i < d; ++i) r *= a.exactValue();
        HyperInt h = HyperInt::exact(r);
        return a.saturated() ? h.withSaturated() : h;
    }
    return a.withSaturated();
}

/// `E:<decimal>` for exact, `T:<k>:<decimal>` for a tower.
inline std::string toText(const HyperInt& h) {
    if (h.isExact()) return "E:" + h.exactValue().str();
    return "T:" + h.height().str() + ":" + h.top().str();
}

namespace detail {

inline BigNat parseDecimal(std::string_view s, std::size_t base) {
    if (s.empty()) throw ParseError(base, "expected decimal digits");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ParseError(base + i, "expected decimal digit");
    }
    return BigNat(std::string(s));
}

}  // namespace detail

inline HyperInt parseHyperInt(std::string_view s) {
    if (s.size() >= 2 && s[0] == 'E' && s[1] == ':') {
        return HyperInt::exact(detail::parseDecimal(s.substr(2), 2));
    }
    if (s.size() >= 2 && s[0] == 'T' && s[1] == ':') {
        const std::size_t sep = s.find(':', 2);
        if (sep == std::string_view::npos) throw ParseError(s.size(), "expected ':' in tower literal");
        BigNat k = detail::parseDecimal(s.substr(2, sep - 2), 2);
        BigNat x = detail::parseDecimal(s.substr(sep + 1), sep + 1);
        if (k == 0) throw ParseError(2, "tower height must be positive");
        return HyperInt::towerOf(std::move(k), std::move(x));
    }
    throw ParseError(0, "expected E:<n> or T:<k>:<n>");
}

}  // namespace hed
