#include <doctest.h>

#include <random>

#include "lockbreak/netlist.hpp"
#include "support.hpp"

using namespace lockbreak;
using lockbreak::testing::fixture;

namespace {

NetlistError parse_error(std::string_view text) {
    try {
        parse_bench(text);
    } catch (const NetlistError& e) {
        return e;
    }
    FAIL("expected a NetlistError");
    return NetlistError(NetlistError::Kind::Syntax, "", "");
}

}  // namespace

TEST_CASE("minimal NAND netlist parses") {
    const auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)");
    CHECK(n.inputs() == std::vector<std::string>{"a", "b"});
    CHECK(n.outputs() == std::vector<std::string>{"y"});
    REQUIRE(n.gates().size() == 1);
    CHECK(n.gates()[0].kind == GateKind::Nand);
    CHECK(n.gates()[0].fanin == std::vector<std::string>{"a", "b"});
}

TEST_CASE("ISCAS-85 benchmark interfaces") {
    const auto c1355 = read_bench_file(fixture("c1355.bench"));
    CHECK(c1355.inputs().size() == 41);
    CHECK(c1355.outputs().size() == 32);
    CHECK(c1355.name() == "c1355");

    const auto c7552 = read_bench_file(fixture("c7552.bench"));
    CHECK(c7552.inputs().size() == 207);
    CHECK(c7552.outputs().size() == 108);

    const auto c17 = read_bench_file(fixture("c17.bench"));
    CHECK(c17.inputs().size() == 5);
    CHECK(c17.gates().size() == 6);
}

TEST_CASE("lexical conveniences: comments, CRLF, case-insensitive kinds, spacing") {
    const auto n = parse_bench(
        "# header comment\r\nINPUT( a )\r\n  input(b)  # trailing\r\nOUTPUT(y)\r\n"
        "t=nand(a,b)\r\ny = Not ( t )\r\n");
    CHECK(n.inputs().size() == 2);
    REQUIRE(n.gates().size() == 2);
    CHECK(n.gates()[0].kind == GateKind::Nand);
    CHECK(n.gates()[1].kind == GateKind::Not);
}

TEST_CASE("a primary output may tap a gate output or a primary input") {
    const auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(a)\nOUTPUT(t)\nOUTPUT(y)\n"
                               "t = AND(a, b)\ny = NOT(t)\n");
    CHECK(n.outputs().size() == 3);
}

TEST_CASE("wide AND/OR accepted, wide XOR rejected") {
    CHECK_NOTHROW(parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = OR(a, b, c)\n"));
    const auto e = parse_error("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = XOR(a, b, c)\n");
    CHECK(e.kind() == NetlistError::Kind::Arity);
    CHECK(e.signal() == "y");
    CHECK(e.line() == 5);
}

TEST_CASE("parse errors are located and name the offending signal") {
    SUBCASE("undeclared signal") {
        const auto e = parse_error("y = NAND(a, b)");
        CHECK(e.kind() == NetlistError::Kind::UndeclaredSignal);
        CHECK(e.signal() == "a");
        CHECK(e.line() == 1);
        CHECK(e.column() == 10);
    }
    SUBCASE("syntax") {
        const auto e = parse_error("INPUT(a)\nOUTPUT(y)\ny = NOT(a\n");
        CHECK(e.kind() == NetlistError::Kind::Syntax);
        CHECK(e.line() == 3);
        CHECK(e.column() == 10);
    }
    SUBCASE("bad character") {
        const auto e = parse_error("INPUT(a.b)\n");
        CHECK(e.kind() == NetlistError::Kind::Syntax);
        CHECK(e.column() == 8);
    }
    SUBCASE("unknown gate kind") {
        const auto e = parse_error("INPUT(a)\nOUTPUT(q)\nq = DFF(a)\n");
        CHECK(e.kind() == NetlistError::Kind::Syntax);
        CHECK(e.signal() == "q");
    }
    SUBCASE("duplicate driver") {
        const auto e = parse_error("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\ny = BUF(a)\n");
        CHECK(e.kind() == NetlistError::Kind::DuplicateDriver);
        CHECK(e.signal() == "y");
        CHECK(e.line() == 4);
    }
    SUBCASE("gate drives an input") {
        const auto e = parse_error("INPUT(a)\nINPUT(b)\nOUTPUT(b)\nb = NOT(a)\n");
        CHECK(e.kind() == NetlistError::Kind::DuplicateDriver);
    }
    SUBCASE("cycle") {
        const auto e = parse_error("INPUT(a)\nOUTPUT(y)\np = AND(a, q)\nq = NOT(p)\ny = BUF(q)\n");
        CHECK(e.kind() == NetlistError::Kind::Cycle);
        const std::string what = e.what();
        CHECK(what.find('p') != std::string::npos);
        CHECK(what.find('q') != std::string::npos);
    }
    SUBCASE("arity of NOT") {
        const auto e = parse_error("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NOT(a, b)\n");
        CHECK(e.kind() == NetlistError::Kind::Arity);
    }
    SUBCASE("empty fan-in") {
        const auto e = parse_error("INPUT(a)\nOUTPUT(y)\ny = AND()\n");
        CHECK(e.kind() == NetlistError::Kind::Arity);
    }
    SUBCASE("undriven output") {
        const auto e = parse_error("INPUT(a)\nOUTPUT(z)\n");
        CHECK(e.kind() == NetlistError::Kind::UndrivenOutput);
        CHECK(e.signal() == "z");
    }
}

TEST_CASE("serialize/parse roundtrip") {
    SUBCASE("minimal") {
        const auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)");
        CHECK(parse_bench(serialize_bench(n)) == n);
    }
    SUBCASE("c1908 keeps its interface") {
        const auto n = read_bench_file(fixture("c1908.bench"));
        const auto back = parse_bench(serialize_bench(n));
        CHECK(back == n);
        CHECK(back.inputs().size() == 33);
        CHECK(back.outputs().size() == 25);
    }
    SUBCASE("random 100-gate DAG") {
        RandomNetlistOptions opt;
        opt.gates = 100;
        opt.shuffle_declarations = true;
        const auto n = random_netlist(opt, 42);
        const auto back = parse_bench(serialize_bench(n));
        // Field-by-field structural comparison.
        CHECK(back.inputs() == n.inputs());
        CHECK(back.outputs() == n.outputs());
        REQUIRE(back.gates().size() == n.gates().size());
        for (std::size_t g = 0; g < n.gates().size(); ++g) {
            CHECK(back.gates()[g].output == n.gates()[g].output);
            CHECK(back.gates()[g].kind == n.gates()[g].kind);
            CHECK(back.gates()[g].fanin == n.gates()[g].fanin);
        }
    }
}

TEST_CASE("roundtrip property over random netlists") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        RandomNetlistOptions opt;
        opt.inputs = 1 + seed % 12;
        opt.outputs = 1 + seed % 5;
        opt.gates = opt.outputs + seed % 60;
        opt.max_fanin = 2 + seed % 4;
        opt.shuffle_declarations = seed % 2 == 0;
        const auto n = random_netlist(opt, seed);
        REQUIRE(parse_bench(serialize_bench(n)) == n);
    }
}

TEST_CASE("topo_order") {
    SUBCASE("single gate") {
        const auto n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)");
        CHECK(topo_order(n).gates == std::vector<std::size_t>{0});
    }
    SUBCASE("dependency forces reversal") {
        const auto n = parse_bench("INPUT(a)\nOUTPUT(g2)\ng2 = NOT(g1)\ng1 = NOT(a)\n");
        CHECK(topo_order(n).gates == std::vector<std::size_t>{1, 0});
    }
    SUBCASE("ties broken by declaration index") {
        const auto n = parse_bench("INPUT(a)\nOUTPUT(z)\nz = AND(p, q)\nq = NOT(a)\np = BUF(a)\n");
        CHECK(topo_order(n).gates == std::vector<std::size_t>{1, 2, 0});
    }
    SUBCASE("random 100-gate DAG") {
        RandomNetlistOptions opt;
        opt.gates = 100;
        opt.shuffle_declarations = true;
        const auto n = random_netlist(opt, 7);
        CHECK(lockbreak::testing::order_respects_dependencies(n, topo_order(n).gates));
    }
}

TEST_CASE("topo_order property: 1000 random DAGs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        RandomNetlistOptions opt;
        opt.inputs = 1 + rng() % 10;
        opt.outputs = 1 + rng() % 4;
        opt.gates = opt.outputs + rng() % 80;
        opt.shuffle_declarations = true;
        const auto n = random_netlist(opt, rng());
        const auto order = topo_order(n);
        REQUIRE(lockbreak::testing::order_respects_dependencies(n, order.gates));
        REQUIRE(is_valid_topo_order(n, order));
        REQUIRE(topo_order(n) == order);
    }
}

TEST_CASE("the library precedence checker rejects bad orders") {
    const auto n = parse_bench("INPUT(a)\nOUTPUT(g2)\ng2 = NOT(g1)\ng1 = NOT(a)\n");
    CHECK_FALSE(is_valid_topo_order(n, TopoOrder{{0, 1}}));
    CHECK_FALSE(is_valid_topo_order(n, TopoOrder{{1, 1}}));
    CHECK_FALSE(is_valid_topo_order(n, TopoOrder{{1}}));
    CHECK(is_valid_topo_order(n, TopoOrder{{1, 0}}));
}
