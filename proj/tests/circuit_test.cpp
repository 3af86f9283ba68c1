#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_util.hpp"
#include "twsim/circuit.hpp"
#include "twsim/oracle.hpp"

using namespace twsim;

namespace {

Matrix ket_bra(int b) {
    Matrix m(2, 2);
    m(b, b) = 1.0;
    return m;
}

Circuit bell_circuit() {
    return parse_circuit(std::string("qubits 2\nh 0\ncnot 0 1\n"));
}

MeasurementScenario basis_scenario(const std::vector<int>& bits) {
    MeasurementScenario tau;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] >= 0) tau.set(static_cast<int>(i), ket_bra(bits[i]));
    return tau;
}

}  // namespace

TEST_CASE("circuit parsing") {
    SECTION("empty circuit") {
        Circuit c = parse_circuit(std::string("qubits 1\n"));
        CHECK(c.n == 1);
        CHECK(c.output_count() == 1);
        CHECK(c.gates.empty());
    }
    SECTION("bell circuit") {
        Circuit c = bell_circuit();
        REQUIRE(c.gates.size() == 2);
        CHECK(c.gates[0].name == "h");
        CHECK(c.gates[1].name == "cnot");
        CHECK(c.gates[1].qubits == std::vector<int>{0, 1});
    }
    SECTION("errors name the offending line") {
        CHECK_THROWS_WITH(parse_circuit(std::string("qubits 2\nfoo 0\n")),
                          Catch::Matchers::ContainsSubstring("line 2"));
        CHECK_THROWS_WITH(parse_circuit(std::string("qubits 2\nh 0\nh 7\n")),
                          Catch::Matchers::ContainsSubstring("line 3"));
        CHECK_THROWS_AS(parse_circuit(std::string("qubits 2\nh 7\n")), input_error);
        CHECK_THROWS_AS(parse_circuit(std::string("h 0\n")), input_error);
        CHECK_THROWS_AS(parse_circuit(std::string("qubits 2\ncnot 0\n")), input_error);
        CHECK_THROWS_AS(parse_circuit(std::string("qubits 1\nu 0 [ 1 0 0 ]\n")), input_error);
        CHECK_THROWS_AS(parse_circuit(std::string("qubits 1\nu 0 [ 1 0 0 0 0 0 1 x ]\n")), input_error);
    }
    SECTION("traced-out lines cannot be used afterwards") {
        CHECK_THROWS_AS(parse_circuit(std::string("qubits 2\ntraceout 0\nh 0\n")), input_error);
    }
    SECTION("round trip through serialize") {
        std::string text = "qubits 3\nh 0\nu 1 2 [";
        test::Rng rng(3);
        Matrix u = test::random_unitary(rng, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                text += " " + format_double(u(r, c).real()) + " " + format_double(u(r, c).imag());
        text += " ]\ntraceout 0\n";
        Circuit c = parse_circuit(text);
        Circuit back = parse_circuit(serialize_circuit(c));
        CHECK(serialize_circuit(back) == serialize_circuit(c));
        CHECK(back.output_count() == 2);
    }
}

TEST_CASE("circuit graph shape") {
    SECTION("identity circuit on one qubit: 2 vertices, 1 edge") {
        Circuit c = parse_circuit(std::string("qubits 1\n"));
        MultiGraph g = circuit_graph(c);
        CHECK(g.vertex_count() == 2);
        CHECK(g.edge_count() == 1);
    }
    SECTION("bell circuit: T + n + m vertices, one edge per wire segment") {
        MultiGraph g = circuit_graph(bell_circuit());
        CHECK(g.vertex_count() == 6);  // 2 gates + 2 inputs + 2 outputs
        CHECK(g.edge_count() == 5);    // 3 segments on qubit 0, 2 on qubit 1
    }
    SECTION("a 1-qubit gate chain is a path") {
        Circuit c = parse_circuit(std::string("qubits 1\nh 0\nx 0\nz 0\n"));
        MultiGraph g = circuit_graph(c);
        CHECK(g.vertex_count() == 5);
        CHECK(g.edge_count() == 4);
        CHECK(g.max_degree() == 2);
    }
}

TEST_CASE("build_network shapes") {
    SECTION("identity circuit: two rank-1 tensors sharing a wire") {
        Circuit c = parse_circuit(std::string("qubits 1\n"));
        TensorNetwork net = build_network(c, "0", basis_scenario({0}));
        REQUIRE(net.tensors.size() == 2);
        CHECK(net.tensors[0].rank() == 1);
        CHECK(net.tensors[1].rank() == 1);
        CHECK(net.internal_wires().size() == 1);
        CHECK(net.open_wires().empty());
    }
    SECTION("bell network is closed with 6 tensors") {
        TensorNetwork net = build_network(bell_circuit(), "00", basis_scenario({0, 0}));
        CHECK(net.tensors.size() == 6);
        CHECK(net.open_wires().empty());
    }
    SECTION("unmeasured outputs get the identity element (1,0,0,1)") {
        TensorNetwork net = build_network(bell_circuit(), "00", basis_scenario({0, -1}));
        CHECK(net.tensors.back().entries() == std::vector<Complex>{1, 0, 0, 1});
    }
    SECTION("input length must match") {
        CHECK_THROWS_AS(build_network(bell_circuit(), "0", {}), input_error);
        CHECK_THROWS_AS(build_network(bell_circuit(), "02", {}), input_error);
    }
}

TEST_CASE("simulate_probability on the named cases") {
    SECTION("identity circuit") {
        Circuit c = parse_circuit(std::string("qubits 1\n"));
        auto res = simulate_probability(c, "0", basis_scenario({0}));
        CHECK(res.probability == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("bell circuit probabilities") {
        Circuit c = bell_circuit();
        CHECK(simulate_probability(c, "00", basis_scenario({0, 0})).probability ==
              Catch::Approx(0.5).margin(1e-12));
        CHECK(simulate_probability(c, "00", basis_scenario({0, 1})).probability ==
              Catch::Approx(0.0).margin(1e-12));
        CHECK(simulate_probability(c, "00", basis_scenario({1, 1})).probability ==
              Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("achieved rank stays within the predicted cost") {
        test::Rng rng(31);
        for (int trial = 0; trial < 15; ++trial) {
            Circuit c = test::random_circuit(rng, test::rand_int(rng, 2, 5), test::rand_int(rng, 1, 12));
            auto res = simulate_probability(c, std::string(c.n, '0'),
                                            test::random_basis_scenario(rng, c.output_count()));
            CHECK(res.achieved_max_rank <= res.plan.predicted_cc);
        }
    }
    SECTION("raw value has negligible imaginary part") {
        test::Rng rng(37);
        for (int trial = 0; trial < 10; ++trial) {
            Circuit c = test::random_circuit(rng, 3, 8);
            auto res = simulate_probability(c, "000", test::random_basis_scenario(rng, c.output_count()));
            CHECK(std::abs(res.raw_value.imag()) < 1e-9);
        }
    }
}

TEST_CASE("simulation matches the dense oracle") {
    test::Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        int n = test::rand_int(rng, 1, 5);
        Circuit c = test::random_circuit(rng, n, test::rand_int(rng, 0, 12), true);
        std::string x;
        for (int i = 0; i < n; ++i) x.push_back(test::rand_int(rng, 0, 1) ? '1' : '0');
        MeasurementScenario tau = test::random_basis_scenario(rng, c.output_count());
        auto res = simulate_probability(c, x, tau, trial % 2 ? OrderingStrategy::min_fill
                                                              : OrderingStrategy::min_degree,
                                        trial);
        double reference = oracle_probability(c, x, tau);
        CHECK(std::abs(res.probability - reference) <= 1e-9);
    }
}

TEST_CASE("completeness: computational-basis scenarios sum to 1") {
    test::Rng rng(43);
    for (int trial = 0; trial < 6; ++trial) {
        int n = test::rand_int(rng, 1, 4);
        Circuit c = test::random_circuit(rng, n, test::rand_int(rng, 1, 8));
        int m = c.output_count();
        double total = 0.0;
        for (int mask = 0; mask < (1 << m); ++mask) {
            std::vector<int> bits;
            for (int q = 0; q < m; ++q) bits.push_back((mask >> q) & 1);
            total += simulate_probability(c, std::string(n, '0'), basis_scenario(bits)).raw_value.real();
        }
        CHECK(total == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("inline unitary and mid-circuit traceout against the oracle") {
    test::Rng rng(47);
    Matrix u = test::random_unitary(rng, 4);
    Circuit c;
    c.n = 3;
    Gate g1;
    g1.kind = GateKind::unitary;
    g1.matrix = u;
    g1.qubits = {0, 2};
    c.gates.push_back(g1);
    Gate g2;
    g2.kind = GateKind::traceout;
    g2.qubits = {2};
    c.gates.push_back(g2);
    Gate g3;
    g3.kind = GateKind::named;
    g3.name = "h";
    g3.matrix = gate_matrix("h");
    g3.qubits = {1};
    c.gates.push_back(g3);
    CHECK(c.output_count() == 2);
    MeasurementScenario tau = basis_scenario({1, 0});
    auto res = simulate_probability(c, "100", tau);
    CHECK(std::abs(res.probability - oracle_probability(c, "100", tau)) <= 1e-9);
}

TEST_CASE("tree-like circuits simulate far beyond the dense oracle's reach") {
    // 30-qubit GHZ preparation: the circuit graph is a caterpillar, so the
    // planned contraction stays narrow while a 2^30 density matrix would not
    // even allocate
    const int n = 30;
    Circuit c;
    c.n = n;
    Gate h;
    h.kind = GateKind::named;
    h.name = "h";
    h.matrix = gate_matrix("h");
    h.qubits = {0};
    c.gates.push_back(h);
    for (int q = 0; q + 1 < n; ++q) {
        Gate cx;
        cx.kind = GateKind::named;
        cx.name = "cnot";
        cx.matrix = gate_matrix("cnot");
        cx.qubits = {q, q + 1};
        c.gates.push_back(cx);
    }
    MeasurementScenario all_zero, mixed;
    for (int q = 0; q < n; ++q) all_zero.set(q, ket_bra(0));
    for (int q = 0; q < n; ++q) mixed.set(q, ket_bra(q == 17 ? 1 : 0));
    auto res = simulate_probability(c, std::string(n, '0'), all_zero);
    CHECK(res.probability == Catch::Approx(0.5).margin(1e-9));
    CHECK(res.achieved_max_rank <= 4);
    CHECK(simulate_probability(c, std::string(n, '0'), mixed).probability == Catch::Approx(0.0).margin(1e-9));
    CHECK(simulate_probability(c, std::string(n, '0'), {}).probability == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("inline superoperator gates run through both pipelines") {
    test::Rng rng(67);
    Matrix u = test::random_unitary(rng, 2);
    // the same map once as a unitary gate and once as a raw superop tensor
    Circuit direct, via_superop;
    direct.n = via_superop.n = 2;
    Gate hu;
    hu.kind = GateKind::named;
    hu.name = "h";
    hu.matrix = gate_matrix("h");
    hu.qubits = {0};
    direct.gates.push_back(hu);
    via_superop.gates.push_back(hu);
    Gate gu;
    gu.kind = GateKind::unitary;
    gu.matrix = u;
    gu.qubits = {1};
    direct.gates.push_back(gu);
    Gate gs;
    gs.kind = GateKind::superop;
    gs.superop = superop_tensor(u, {0}, {1}).entries();
    gs.qubits = {1};
    via_superop.gates.push_back(gs);

    test::Rng srng(68);
    MeasurementScenario tau;
    tau.set(0, test::random_povm_element(srng));
    tau.set(1, test::random_povm_element(srng));
    double a = simulate_probability(direct, "00", tau).probability;
    double b = simulate_probability(via_superop, "00", tau).probability;
    CHECK(a == Catch::Approx(b).margin(1e-12));
    CHECK(oracle_probability(via_superop, "00", tau) == Catch::Approx(a).margin(1e-9));
}

TEST_CASE("scenario parsing validates PSD elements") {
    std::istringstream ok("m 0 [ 0.5 0 0.5 0 0.5 0 0.5 0 ]\n");
    MeasurementScenario tau = parse_scenario(ok, 2);
    CHECK(tau.is_set(0));
    std::istringstream not_psd("m 0 [ 1 0 1 0 0 0 1 0 ]\n");
    CHECK_THROWS_AS(parse_scenario(not_psd, 2), input_error);
    std::istringstream out_of_range("m 5 [ 1 0 0 0 0 0 0 0 ]\n");
    CHECK_THROWS_AS(parse_scenario(out_of_range, 2), input_error);
    MeasurementScenario direct;
    CHECK_THROWS_AS(direct.set(0, Matrix{{1, 1}, {0, 1}}), input_error);
}

TEST_CASE("local interaction path decomposition") {
    SECTION("only 1-qubit gates: all bags empty") {
        Circuit c = parse_circuit(std::string("qubits 3\nh 0\nx 1\nz 2\nh 1\n"));
        auto res = local_interaction_path_decomposition(c);
        CHECK(res.decomposition.bags.size() == 2);
        for (const auto& bag : res.decomposition.bags) CHECK(bag.empty());
        CHECK(res.decomposition.width() <= 0);
        CHECK(res.reduced_graph.vertex_count() == 0);
        CHECK(validate_decomposition(res.decomposition, res.reduced_graph).empty());
    }
    SECTION("one 2-qubit gate on qubits (0,1) of a 3-qubit circuit") {
        Circuit c = parse_circuit(std::string("qubits 3\ncz 0 1\n"));
        auto res = local_interaction_path_decomposition(c);
        REQUIRE(res.decomposition.bags.size() == 2);
        CHECK(res.decomposition.bags[0] == std::vector<Vertex>{0});
        CHECK(res.decomposition.bags[1].empty());
        CHECK(res.decomposition.width() == 0);
        CHECK(validate_decomposition(res.decomposition, res.reduced_graph).empty());
    }
    SECTION("nearest-neighbor ladders stay within width 2D-1") {
        test::Rng rng(53);
        for (int trial = 0; trial < 10; ++trial) {
            int n = test::rand_int(rng, 2, 8), depth = test::rand_int(rng, 1, 4);
            Circuit c = test::random_layered_circuit(rng, n, depth, 1);
            auto res = local_interaction_path_decomposition(c);
            CHECK(res.decomposition.width() <= 2 * depth - 1);
            CHECK(res.decomposition.width() == res.straddle_count - 1);
            CHECK(validate_decomposition(res.decomposition, res.reduced_graph).empty());
            // path shape: every bag has at most 2 tree neighbors
            std::vector<int> deg(res.decomposition.bags.size(), 0);
            for (auto [a, b] : res.decomposition.tree_edges) {
                ++deg[a];
                ++deg[b];
            }
            for (int d : deg) CHECK(d <= 2);
        }
    }
    SECTION("unequal arity is rejected") {
        Circuit c = parse_circuit(std::string("qubits 2\ntraceout 0\n"));
        CHECK_THROWS_AS(local_interaction_path_decomposition(c), input_error);
    }
}

TEST_CASE("extended path decomposition covers the full circuit graph") {
    test::Rng rng(59);
    for (int trial = 0; trial < 15; ++trial) {
        int n = test::rand_int(rng, 1, 7), depth = test::rand_int(rng, 1, 4);
        Circuit c = test::random_layered_circuit(rng, n, depth, 1);
        auto local = local_interaction_path_decomposition(c);
        TreeDecomposition full = extend_path_decomposition_to_circuit_graph(c);
        MultiGraph g = circuit_graph(c);
        CHECK(validate_decomposition(full, g).empty());
        CHECK(full.width() <= std::max(local.decomposition.width(), 2));
    }
}

TEST_CASE("simulation through the extended path decomposition matches the oracle") {
    test::Rng rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        int n = test::rand_int(rng, 2, 5), depth = test::rand_int(rng, 1, 3);
        Circuit c = test::random_layered_circuit(rng, n, depth, 1);
        MultiGraph g = circuit_graph(c);
        TreeDecomposition full = extend_path_decomposition_to_circuit_graph(c);
        TreeDecomposition lifted = decomposition_for_line_graph(full, g);
        ContractionOrdering pi = decomposition_to_contraction_ordering(lifted, g);
        MeasurementScenario tau = test::random_basis_scenario(rng, c.output_count());
        TensorNetwork net = build_network(c, std::string(n, '0'), tau);
        Tensor out = contract_network(net, pi);
        CHECK(std::abs(out.value().real() - oracle_probability(c, std::string(n, '0'), tau)) <= 1e-9);
    }
}
