#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hed/machine.hpp"

using namespace hed;

namespace {

const Catalog& cat() {
    static Catalog c = Catalog::standard();
    return c;
}

MachineIndex idx(const std::string& name) { return cat().indexOfName(name); }

// Loops forever: DECJZ on an always-zero register jumps back to itself.
RegisterProgram loopForever() {
    return parseProgram("DECJZ 1 0\n");
}

MachineIndex programIndex(const RegisterProgram& p) { return encodeProgram(p) * 2 + 1; }

}  // namespace

TEST_CASE("cantor pairing round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> d(0, 1u << 20);
    for (int i = 0; i < 2000; ++i) {
        BigNat a = d(rng), b = d(rng);
        auto [x, y] = unpairN(pairN(a, b));
        REQUIRE(x == a);
        REQUIRE(y == b);
    }
    CHECK(pairN(0, 0) == 0);
}

TEST_CASE("decode conventions") {
    auto d0 = decode(cat(), pairN(0, 0) * 2);
    REQUIRE(d0.kind == DecodedMachine::Kind::Catalog);
    CHECK(cat().at(d0.catalogPos).name() == "ZERO");

    auto d7 = decode(cat(), pairN(0, 7) * 2);
    REQUIRE(d7.kind == DecodedMachine::Kind::Catalog);
    CHECK(cat().at(d7.catalogPos).name() == "ZERO");

    auto d1 = decode(cat(), 1);
    REQUIRE(d1.kind == DecodedMachine::Kind::Register);
    CHECK(d1.program == haltProgram());
}

TEST_CASE("every builtin keeps its identity under index padding") {
    for (std::size_t b = 0; b < cat().size(); ++b) {
        for (std::uint64_t j = 0; j <= 100; ++j) {
            auto d = decode(cat(), pairN(BigNat(b), j) * 2);
            REQUIRE(d.kind == DecodedMachine::Kind::Catalog);
            REQUIRE(cat().at(d.catalogPos).name() == cat().at(b).name());
        }
    }
}

TEST_CASE("program coding round-trips and rejects garbage gracefully") {
    std::vector<RegisterProgram> samples = {
        haltProgram(),
        loopForever(),
        parseProgram("INC 1\nDECJZ 0 1\nHALT\n"),
        parseProgram("DECJZ 0 2\nINC 0\nHALT\n"),
    };
    for (const auto& p : samples) {
        CHECK(decodeProgram(encodeProgram(p)) == p);
        CHECK(parseProgram(programToText(p)) == p);
    }
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> d(0, 1u << 30);
    for (int i = 0; i < 500; ++i) {
        auto p = decodeProgram(d(rng));  // total: never throws
        CHECK(!p.instructions.empty());
    }
    CHECK_THROWS_AS(parseProgram("FOO 1\n"), ParseError);
    CHECK_THROWS_AS(parseProgram("DECJZ 0 9\nHALT\n"), ParseError);
}

TEST_CASE("run resolves builtins against the budget symbolically") {
    auto r = run(cat(), idx("POW2"), 4, HyperInt::exact(100));
    REQUIRE(r.halted());
    CHECK(r.output == HyperInt::exact(16));
    CHECK(r.steps == HyperInt::exact(16));

    auto s = run(cat(), idx("POW2"), 4, HyperInt::exact(10));
    CHECK(s.kind == RunOutcome::Kind::StillRunning);
    CHECK(s.steps == HyperInt::exact(10));

    // Astronomical budgets are fine symbolically.
    auto t = run(cat(), idx("TOWERDIAG"), 30, HyperInt::towerOf(40, 2));
    REQUIRE(t.halted());
    CHECK(t.output == towerH(30, HyperInt::exact(30)));

    auto p = run(cat(), idx("PARTIAL_AT_2"), 2, HyperInt::towerOf(40, 2));
    CHECK(p.kind == RunOutcome::Kind::StillRunning);
}

TEST_CASE("run executes register programs step-exactly") {
    auto h = run(cat(), 1, 0, HyperInt::exact(1));
    REQUIRE(h.halted());
    CHECK(h.output == HyperInt::exact(0));
    CHECK(h.steps == HyperInt::exact(1));

    // DECJZ decrements r0 once, INC bumps r1, HALT: 3 steps, r0 left at 2.
    auto prog = parseProgram("DECJZ 0 2\nINC 1\nHALT\n");
    auto r = run(cat(), programIndex(prog), 3, HyperInt::exact(1000));
    REQUIRE(r.halted());
    CHECK(r.output == HyperInt::exact(2));
    CHECK(r.steps == HyperInt::exact(3));

    auto loop = programIndex(loopForever());
    auto c = run(cat(), loop, 5, HyperInt::towerOf(1, 64), 5000);
    CHECK(c.kind == RunOutcome::Kind::CapExceeded);
    CHECK(c.steps == HyperInt::exact(5000));

    auto still = run(cat(), loop, 5, HyperInt::exact(999), 5000);
    CHECK(still.kind == RunOutcome::Kind::StillRunning);
}

TEST_CASE("budget monotonicity and determinism") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::uint64_t> db(1, 400);
    std::uniform_int_distribution<std::uint64_t> dn(0, 6);
    std::vector<MachineIndex> subjects = {idx("ZERO"), idx("ID"), idx("POW2"), idx("TOWER_2"),
                                          programIndex(parseProgram("INC 0\nINC 0\nHALT\n")), 1};
    for (int i = 0; i < 400; ++i) {
        auto e = subjects[i % subjects.size()];
        BigNat n = dn(rng);
        std::uint64_t b = db(rng);
        auto r1 = run(cat(), e, n, HyperInt::exact(b));
        auto r2 = run(cat(), e, n, HyperInt::exact(b));
        REQUIRE(r1.kind == r2.kind);  // determinism, bit for bit
        if (r1.halted()) {
            REQUIRE(r1.output == r2.output);
            REQUIRE(r1.steps == r2.steps);
            auto r3 = run(cat(), e, n, HyperInt::exact(b + db(rng)));
            REQUIRE(r3.halted());
            CHECK(r3.output == r1.output);
            CHECK(r3.steps == r1.steps);
        }
    }
}

TEST_CASE("dovetail picks the earliest halting task") {
    auto one = dovetail(cat(), {{idx("ZERO"), 3}}, HyperInt::exact(5));
    REQUIRE(one.has_value());
    CHECK(one->e == idx("ZERO"));
    CHECK(one->output == HyperInt::exact(0));
    CHECK(one->steps == HyperInt::exact(1));

    auto two = dovetail(cat(), {{idx("POW2"), 10}, {idx("ZERO"), 10}}, HyperInt::exact(8));
    REQUIRE(two.has_value());
    CHECK(two->e == idx("ZERO"));
    CHECK(two->position == 1);

    auto none = dovetail(cat(), {{idx("POW2"), 10}}, HyperInt::exact(8));
    CHECK_FALSE(none.has_value());

    CHECK_FALSE(dovetail(cat(), {}, HyperInt::exact(8)).has_value());
}

TEST_CASE("dovetail tie-break is list position") {
    auto r = dovetail(cat(), {{idx("ID"), 4}, {idx("ZERO"), 0}, {idx("ZERO"), 1}},
                      HyperInt::exact(50));
    REQUIRE(r.has_value());
    CHECK(r->position == 1);  // ZERO at cost 1 twice; first listed wins
}

TEST_CASE("dovetail agrees with run on singleton tasks") {
    std::vector<MachineIndex> subjects = {idx("ZERO"), idx("SUCC"), idx("POW2"),
                                          idx("PARTIAL_AT_2"), 1};
    for (const auto& e : subjects) {
        for (std::uint64_t n = 0; n <= 5; ++n) {
            for (std::uint64_t b : {1ull, 7ull, 100ull}) {
                auto direct = run(cat(), e, n, HyperInt::exact(b));
                auto dv = dovetail(cat(), {{e, n}}, HyperInt::exact(b));
                if (direct.halted()) {
                    REQUIRE(dv.has_value());
                    CHECK(dv->output == direct.output);
                    CHECK(dv->steps == direct.steps);
                } else {
                    CHECK_FALSE(dv.has_value());
                }
            }
        }
    }
}

TEST_CASE("dovetail propagates cap trouble only when unresolved") {
    auto loop = programIndex(loopForever());
    // A fast winner resolves the round before the cap is reached.
    auto ok = dovetail(cat(), {{loop, 0}, {idx("ZERO"), 0}}, HyperInt::towerOf(1, 64), 100);
    REQUIRE(ok.has_value());
    CHECK(ok->e == idx("ZERO"));
    // Alone, the capped task is unresolved.
    CHECK_THROWS_AS(dovetail(cat(), {{loop, 0}}, HyperInt::towerOf(1, 64), 100), CapExceededError);
}

TEST_CASE("builtin monotone flags hold on samples") {
    for (std::size_t b = 0; b < cat().size(); ++b) {
        const auto* spec = std::get_if<BuiltinSpec>(&cat().at(b).payload);
        REQUIRE(spec != nullptr);
        HyperInt prevOut, prevCost;
        bool first = true;
        for (std::uint64_t n = 0; n <= 12; ++n) {
            if (!spec->haltsOn(n)) break;
            auto out = *spec->outputFn(HyperInt::exact(n));
            auto cost = *spec->costFn(HyperInt::exact(n));
            REQUIRE(compare(cost, HyperInt::exact(1)) != Ordering::Less);
            if (!first) {
                if (spec->outputMonotone) REQUIRE(compare(prevOut, out) != Ordering::Greater);
                if (spec->costMonotone) REQUIRE(compare(prevCost, cost) != Ordering::Greater);
            }
            prevOut = out;
            prevCost = cost;
            first = false;
        }
    }
}

TEST_CASE("catalog config files extend the standard set") {
    auto c = Catalog::fromConfig("MYTOWER = TOWER 3\nSLOWID = ID\n");
    CHECK(c.find("MYTOWER").has_value());
    auto r = run(c, c.indexOfName("MYTOWER"), 2, HyperInt::exact(100000));
    REQUIRE(r.halted());
    CHECK(r.output == HyperInt::exact(65536));
    CHECK_THROWS_AS(Catalog::fromConfig("BAD FORMAT\n"), ParseError);
}
