#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hed/lattice.hpp"

using namespace hed;

namespace {

Catalog& cat() {
    static Catalog c = Catalog::standard();
    return c;
}

HonestFn fn(const std::string& name) { return HonestFn::fromBuiltin(cat(), name); }

const std::vector<std::string> kHonestNames = {"POW2",    "TOWER_2", "TOWER_3", "TOWER_4",
                                               "TOWER_5", "TOWER_6", "TOWERDIAG"};

}  // namespace

TEST_CASE("join is pointwise max") {
    auto a = join(fn("POW2"), fn("POW2"));
    auto pow2 = fn("POW2");
    for (std::uint64_t x = 0; x <= 10; ++x) CHECK(a.evalValue(x) == pow2.evalValue(x));

    auto b = join(fn("POW2"), fn("TOWER_2"));
    CHECK(b.evalValue(3) == HyperInt::exact(256));

    auto c = join(fn("TOWER_2"), fn("POW2"));
    for (std::uint64_t x = 0; x <= 10; ++x) CHECK(b.evalValue(x) == c.evalValue(x));
}

TEST_CASE("meet is pointwise min") {
    auto a = meet(fn("POW2"), fn("TOWER_2"));
    CHECK(a.evalValue(3) == HyperInt::exact(8));

    auto pow2 = fn("POW2");
    auto self = meet(fn("POW2"), fn("POW2"));
    for (std::uint64_t x = 0; x <= 10; ++x) CHECK(self.evalValue(x) == pow2.evalValue(x));

    // min of two functions that dominate 2^x still dominates it
    auto m = meet(fn("TOWER_3"), fn("TOWER_2"));
    for (std::uint64_t x = 0; x <= 10; ++x)
        CHECK(compare(m.evalValue(x), exp2H(HyperInt::exact(x))) != Ordering::Less);
}

TEST_CASE("cap witness sits below both arms") {
    auto a = capWitness(fn("TOWER_2"), fn("TOWERDIAG"));
    auto x = fn("TOWER_2");
    auto b = fn("TOWERDIAG");
    for (std::uint64_t n = 0; n <= 12; ++n) {
        auto v = a.evalValue(n);
        CHECK(compare(v, x.evalValue(n)) != Ordering::Greater);
        CHECK(compare(v, b.evalValue(n)) != Ordering::Greater);
    }
}

TEST_CASE("pointwise distributivity of max over min on catalog triples") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::uint64_t> dx(0, 30);
    std::vector<HonestFn> fns;
    for (const auto& n : kHonestNames) fns.push_back(fn(n));
    for (auto& f : fns) {
        for (auto& g : fns) {
            for (auto& h : fns) {
                for (int i = 0; i < 3; ++i) {
                    std::uint64_t x = dx(rng);
                    HyperInt fv = f.evalValue(x), gv = g.evalValue(x), hv = h.evalValue(x);
                    CHECK(maxH(fv, minH(gv, hv)) == minH(maxH(fv, gv), maxH(fv, hv)));
                }
            }
        }
    }
}

TEST_CASE("join and meet preserve the honesty checks on catalog pairs") {
    for (const auto& fname : kHonestNames) {
        for (const auto& gname : kHonestNames) {
            auto j = join(fn(fname), fn(gname));
            auto m = meet(fn(fname), fn(gname));
            CHECK(j.claimsHonest());
            CHECK(m.claimsHonest());
            auto jrep = checkHonesty(j, 12, 2, 4);
            auto mrep = checkHonesty(m, 12, 2, 4);
            CHECK(jrep.allOk());
            CHECK(mrep.allOk());
        }
    }
}

TEST_CASE("join and meet propagate divergence") {
    auto j = join(fn("PARTIAL_AT_2"), fn("POW2"));
    CHECK(j.eval(5).kind == RunOutcome::Kind::StillRunning);
    auto m = meet(fn("POW2"), fn("PARTIAL_AT_2"));
    CHECK(m.eval(5).kind == RunOutcome::Kind::StillRunning);
    CHECK(m.eval(1).halted());
}

TEST_CASE("lattice handles stay symbolic when both sides are") {
    auto j = join(fn("POW2"), fn("TOWER_2"));
    REQUIRE(j.symbolicCapable());
    auto v = j.evalSym(HyperInt::towerOf(3, 70));
    REQUIRE(v.has_value());
    CHECK(*v == HyperInt::towerOf(5, 70));  // max(2_4^x, 2_5^x) at x = 2_3^70

    auto withDiag = meet(fn("POW2"), fn("TOWERDIAG"));
    REQUIRE(withDiag.symbolicCapable());
    CHECK_FALSE(withDiag.evalSym(HyperInt::towerOf(3, 70)).has_value());
}
