#include <doctest.h>

#include "lockbreak/locking.hpp"
#include "lockbreak/simulator.hpp"
#include "support.hpp"

using namespace lockbreak;
using lockbreak::testing::fixture;
using lockbreak::testing::ReferenceEvaluator;

namespace {

// Exhaustive comparison of the locked netlist (key bits driven directly on
// the key inputs) against the original, using the reference evaluator.
std::size_t differing_inputs(const Netlist& original, const LockedNetlist& locked, const Key& key) {
    const ReferenceEvaluator orig(original), lk(locked.netlist);
    const std::size_t n = original.inputs().size();
    std::size_t differing = 0;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        const auto x = BitVector::from_uint(v, n);
        differing += orig(x) != lk(concat(x, key.bits())) ? 1 : 0;
    }
    return differing;
}

}  // namespace

TEST_CASE("lock_random preconditions") {
    const auto c17 = read_bench_file(fixture("c17.bench"));
    CHECK_THROWS_AS(lock_random(c17, 0, 1), LockingError);
    CHECK_THROWS_AS(lock_random(c17, 7, 1), LockingError);
}

TEST_CASE("single XOR/XNOR key gate semantics") {
    const auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nw = AND(a, b)\ny = NOT(w)\n");
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto lock = lock_random(n, 1, seed);
        REQUIRE(lock.sites == std::vector<std::string>{"w"});
        const auto& gates = lock.locked.netlist.gates();
        const Gate& kg = gates[key_gate_indices(lock.locked)[0]];
        CHECK(kg.output == "w");
        if (kg.kind == GateKind::Xor) {
            CHECK(lock.key == Key::from_string("0"));
        } else {
            CHECK(kg.kind == GateKind::Xnor);
            CHECK(lock.key == Key::from_string("1"));
        }
        // Correct bit is identity on w, wrong bit inverts it.
        const Simulator sim(lock.locked.netlist);
        for (std::uint64_t v = 0; v < 4; ++v) {
            const auto x = BitVector::from_uint(v, 2);
            const bool w = x[0] && x[1];
            BitVector good = concat(x, lock.key.bits());
            BitVector bad = good;
            bad.flip(2);
            CHECK(sim.evaluate(good)[0] == !w);
            CHECK(sim.evaluate(bad)[0] == w);
        }
    }
}

TEST_CASE("c17 with a 4-bit key") {
    const auto c17 = read_bench_file(fixture("c17.bench"));
    const auto lock = lock_random(c17, 4, 7);
    const auto& locked = lock.locked;

    CHECK(locked.key_input_count == 4);
    CHECK(locked.functional_input_count() == 5);
    CHECK(locked.correct_key == lock.key);
    CHECK(locked.netlist.gates().size() == 10);
    for (std::size_t k = 0; k < 4; ++k) CHECK(locked.netlist.inputs()[5 + k] == key_input_name(k));

    SUBCASE("correct key is exhaustively transparent") {
        CHECK(differing_inputs(c17, locked, lock.key) == 0);
        const auto keyed = apply_key(locked, lock.key);
        const auto v = equiv_check(c17, keyed, 0, 0);
        CHECK(v.kind == EquivVerdict::Kind::ExhaustiveEqual);
        CHECK(v.samples == 32);
    }
    SUBCASE("every single-bit flip corrupts some output") {
        for (std::size_t i = 0; i < 4; ++i) {
            Key wrong = lock.key;
            wrong.flip(i);
            CHECK(differing_inputs(c17, locked, wrong) > 0);
            const auto v = equiv_check(c17, apply_key(locked, wrong), 0, 0);
            REQUIRE(v.kind == EquivVerdict::Kind::Counterexample);
            REQUIRE(v.counterexample);
            CHECK(evaluate(c17, *v.counterexample) !=
                  evaluate(apply_key(locked, wrong), *v.counterexample));
        }
    }
    SUBCASE("brute force over all 16 keys finds wrong keys") {
        std::size_t wrong_keys = 0;
        for (std::uint64_t k = 0; k < 16; ++k) {
            const auto key = Key::from_uint(k, 4);
            const bool differs = differing_inputs(c17, locked, key) > 0;
            if (key == lock.key) CHECK_FALSE(differs);
            wrong_keys += differs ? 1 : 0;
            // apply_key agrees with driving the key inputs directly.
            CHECK(equiv_check(c17, apply_key(locked, key), 0, 0).equal() == !differs);
        }
        CHECK(wrong_keys >= 1);
    }
}

TEST_CASE("apply_key folds key gates to BUF/NOT") {
    const auto n = parse_bench(
        "INPUT(a)\nINPUT(keyinput0)\nINPUT(keyinput1)\nOUTPUT(y)\nOUTPUT(z)\n"
        "y = XNOR(a, keyinput0)\nz = XOR(keyinput1, a)\n");
    const auto locked = as_locked(n);
    const auto keyed = apply_key(locked, Key::from_string("10"));
    CHECK(keyed.inputs() == std::vector<std::string>{"a"});
    CHECK(keyed.gates()[0] == Gate{"y", GateKind::Buf, {"a"}});
    CHECK(keyed.gates()[1] == Gate{"z", GateKind::Buf, {"a"}});
    const auto inverted = apply_key(locked, Key::from_string("01"));
    CHECK(inverted.gates()[0].kind == GateKind::Not);
    CHECK(inverted.gates()[1].kind == GateKind::Not);

    CHECK_THROWS_AS(apply_key(locked, Key::from_string("1")), LockingError);
}

TEST_CASE("as_locked validates key input naming and order") {
    CHECK_THROWS_AS(as_locked(parse_bench("INPUT(keyinput0)\nINPUT(a)\nOUTPUT(y)\ny = XOR(a, keyinput0)\n")),
                    LockingError);
    CHECK_THROWS_AS(as_locked(parse_bench("INPUT(a)\nINPUT(keyinput1)\nOUTPUT(y)\ny = XOR(a, keyinput1)\n")),
                    LockingError);
    const auto plain = as_locked(read_bench_file(fixture("c17.bench")));
    CHECK(plain.key_input_count == 0);
}

TEST_CASE("apply_key refuses key inputs on non-XOR gates") {
    const auto n = parse_bench("INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\ny = AND(a, keyinput0)\n");
    CHECK_THROWS_AS(apply_key(as_locked(n), Key::from_string("1")), LockingError);
}

TEST_CASE("equiv_check") {
    const auto c17 = read_bench_file(fixture("c17.bench"));
    CHECK(equiv_check(c17, c17, 0, 0).kind == EquivVerdict::Kind::ExhaustiveEqual);

    const auto c1355 = read_bench_file(fixture("c1355.bench"));
    const auto v = equiv_check(c1355, c1355, 1000, 3);
    CHECK(v.kind == EquivVerdict::Kind::SampledEqual);
    CHECK(v.samples == 1000);

    const auto other = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
    CHECK_THROWS_AS(equiv_check(c17, other, 0, 0), LockingError);
}

TEST_CASE("locking is deterministic per seed") {
    const auto n = read_bench_file(fixture("c432.bench"));
    const auto a = lock_random(n, 32, 11);
    const auto b = lock_random(n, 32, 11);
    CHECK(serialize_bench(a.locked.netlist) == serialize_bench(b.locked.netlist));
    CHECK(a.key == b.key);
    const auto c = lock_random(n, 32, 12);
    CHECK(serialize_bench(a.locked.netlist) != serialize_bench(c.locked.netlist));
}

TEST_CASE("correct-key identity and per-bit corruption across seeds and widths") {
    std::vector<Netlist> nets{read_bench_file(fixture("c17.bench"))};
    for (std::uint64_t s = 0; s < 4; ++s) {
        RandomNetlistOptions opt;
        opt.inputs = 6 + s * 3;
        opt.outputs = 3;
        opt.gates = 40 + 10 * s;
        nets.push_back(random_netlist(opt, 100 + s));
    }
    for (const auto& n : nets) {
        for (std::size_t width = 1; width <= 4; ++width) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto lock = lock_random(n, width, seed);
                REQUIRE(equiv_check(n, apply_key(lock.locked, lock.key), 0, 0).kind ==
                        EquivVerdict::Kind::ExhaustiveEqual);
                for (std::size_t i = 0; i < width; ++i) {
                    Key wrong = lock.key;
                    wrong.flip(i);
                    REQUIRE(equiv_check(n, apply_key(lock.locked, wrong), 0, 0).kind ==
                            EquivVerdict::Kind::Counterexample);
                }
            }
        }
    }
}

TEST_CASE("large keys on large netlists lock in sampled mode") {
    const auto n = read_bench_file(fixture("c7552.bench"));
    const auto lock = lock_random(n, 256, 1);
    CHECK(lock.locked.key_input_count == 256);
    CHECK(equiv_check(n, apply_key(lock.locked, lock.key), 4096, 2).kind ==
          EquivVerdict::Kind::SampledEqual);
}

TEST_CASE("key text format") {
    CHECK(parse_key_text("0101\n") == Key::from_string("0101"));
    CHECK(parse_key_text("0101\r\n") == Key::from_string("0101"));
    CHECK(parse_key_text("1") == Key::from_string("1"));
    CHECK_THROWS(parse_key_text(""));
    CHECK_THROWS(parse_key_text("01 1"));
    CHECK(key_text(Key::from_string("110")) == "110\n");
    // Bit i binds to keyinput{i}: left-to-right.
    CHECK(Key::from_string("100")[0]);
    CHECK_FALSE(Key::from_string("100")[2]);
}
