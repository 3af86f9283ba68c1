#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "test_util.hpp"
#include "twsim/oneway.hpp"

using namespace twsim;

namespace {

SimpleGraph path_graph_simple(int n) {
    SimpleGraph g;
    for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    if (n == 1) g.add_vertex(0);
    return g;
}

SimpleGraph star_simple(int leaves) {
    SimpleGraph g;
    for (int v = 1; v <= leaves; ++v) g.add_edge(0, v);
    return g;
}

Matrix ket_bra(int b) {
    Matrix m(2, 2);
    m(b, b) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("split pair reconstructs the controlled-phase tensor exactly") {
    auto [router, carrier] = split_cz_tensors(0, 1, 2, 3, 10, 11);
    Tensor rebuilt = contract_pair(router, carrier);
    Tensor direct = superop_tensor(gate_matrix("cz"), {0, 2}, {1, 3});
    Tensor aligned = rebuilt.permuted(direct.wires());
    CHECK(aligned.entries() == direct.entries());
}

TEST_CASE("graph state circuit shape") {
    SimpleGraph empty;
    for (int v = 0; v < 3; ++v) empty.add_vertex(v);
    CHECK(graph_state_circuit(empty).gates.size() == 3);

    SimpleGraph k2;
    k2.add_edge(0, 1);
    Circuit c = graph_state_circuit(k2);
    REQUIRE(c.gates.size() == 3);
    CHECK(c.gates[2].name == "cz");

    SimpleGraph c3;
    c3.add_edge(0, 1);
    c3.add_edge(1, 2);
    c3.add_edge(0, 2);
    CHECK(graph_state_circuit(c3).gates.size() == 6);
}

TEST_CASE("graphstate probabilities on the named cases") {
    SECTION("single vertex in the computational basis") {
        SimpleGraph g;
        g.add_vertex(0);
        CHECK(graphstate_probability(g, {{0, ket_bra(0)}}) == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("K2 at |11>") {
        SimpleGraph g;
        g.add_edge(0, 1);
        VertexScenario tau{{0, ket_bra(1)}, {1, ket_bra(1)}};
        CHECK(graphstate_probability(g, tau) == Catch::Approx(0.25).margin(1e-12));
    }
    SECTION("identity scenario is complete") {
        test::Rng rng(3);
        SimpleGraph g = test::random_connected_simple(rng, 5, 7);
        CHECK(graphstate_probability(g, {}) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("split network matches the amplitude-formula oracle") {
    test::Rng rng(5);
    for (int n = 1; n <= 4; ++n) {
        for (const auto& g : test::all_simple_graphs(n)) {
            GraphStateEngine engine(g);
            DenseState dense = DenseState::from_statevector(oracle_graph_state(g), g.vertices());
            VertexScenario tau;
            std::map<int, Matrix> per_line;
            for (Vertex v : g.vertices()) {
                if (test::rand_int(rng, 0, 2) == 0) continue;
                Matrix e = test::random_povm_element(rng);
                tau[v] = e;
                per_line[v] = e;
            }
            CHECK(std::abs(engine.probability(tau) - dense.scenario_probability(per_line)) <= 1e-9);
        }
    }
}

TEST_CASE("split network also matches the plain circuit pipeline") {
    test::Rng rng(7);
    SimpleGraph g = test::random_connected_simple(rng, 5, 6);
    auto qubit = graph_state_qubit_map(g);
    VertexScenario tau;
    MeasurementScenario mtau;
    for (Vertex v : g.vertices()) {
        Matrix e = test::random_povm_element(rng);
        tau[v] = e;
        mtau.set(qubit.at(v), e);
    }
    double split = graphstate_probability(g, tau);
    double plain = simulate_probability(graph_state_circuit(g), std::string(g.vertex_count(), '0'), mtau).probability;
    CHECK(split == Catch::Approx(plain).margin(1e-9));
}

TEST_CASE("split network cost respects the degree/cost bound on small graphs") {
    // cc(G') <= max{3, 2 max_degree(G), 2 cc(G)}
    std::vector<SimpleGraph> cases{path_graph_simple(3), path_graph_simple(4), star_simple(3)};
    SimpleGraph triangle;
    triangle.add_edge(0, 1);
    triangle.add_edge(1, 2);
    triangle.add_edge(0, 2);
    cases.push_back(triangle);
    for (const auto& g : cases) {
        GraphStateEngine engine(g);
        int cc_g = exact_cc(g.to_multigraph());
        int bound = std::max({3, 2 * g.max_degree(), 2 * cc_g});
        CHECK(engine.plan().predicted_cc <= bound);
    }
}

TEST_CASE("randomized one-way simulation") {
    SECTION("x-basis measurement on a single vertex always yields +") {
        SimpleGraph g;
        g.add_vertex(0);
        OneWayProgram p = test::fixed_program({test::x_basis_step(0)});
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto run = simulate_oneway_randomized(g, p, seed);
            REQUIRE(run.outcomes.size() == 1);
            CHECK(run.outcomes[0] == 0);
        }
    }
    SECTION("computational measurement on a single vertex is a fair coin") {
        SimpleGraph g;
        g.add_vertex(0);
        OneWayProgram p = test::fixed_program({test::z_basis_step(0)});
        int zeros = 0;
        const int runs = 10000;
        for (std::uint64_t seed = 0; seed < runs; ++seed)
            zeros += simulate_oneway_randomized(g, p, seed).outcomes[0] == 0 ? 1 : 0;
        // 3 sigma around n/2 with sigma = sqrt(n)/2
        CHECK(std::abs(zeros - runs / 2) < 3 * std::sqrt(runs) / 2);
    }
    SECTION("measuring a qubit twice is rejected") {
        SimpleGraph g;
        g.add_edge(0, 1);
        OneWayProgram p = test::fixed_program({test::z_basis_step(0), test::z_basis_step(0)});
        CHECK_THROWS_AS(simulate_oneway_randomized(g, p, 1), input_error);
    }
}

TEST_CASE("branch probabilities are conserved at every node") {
    SimpleGraph g = path_graph_simple(3);
    OneWayProgram p = test::fixed_program({test::x_basis_step(1), test::z_basis_step(0), test::z_basis_step(2)});
    auto dist = enumerate_oneway_distribution(g, p);
    double total = 0.0;
    for (const auto& [k, v] : dist) total += v;
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("independently contracted POVM branches sum to the parent probability") {
    // the simulators derive p_1 as p_prev - p_0; check that contracting the
    // complementary element directly agrees
    test::Rng rng(19);
    for (int trial = 0; trial < 8; ++trial) {
        int n = test::rand_int(rng, 2, 5);
        SimpleGraph g = test::random_connected_simple(rng, n, test::rand_int(rng, n - 1, 2 * n - 2));
        GraphStateEngine engine(g);
        auto vs = g.vertices();
        std::shuffle(vs.begin(), vs.end(), rng);
        VertexScenario tau;
        double p_prev = 1.0;
        for (std::size_t t = 0; t < std::min<std::size_t>(vs.size(), 3); ++t) {
            Matrix p0 = test::random_povm_element(rng);
            Matrix p1 = Matrix::identity(2) - p0;
            VertexScenario tau0 = tau, tau1 = tau;
            tau0[vs[t]] = p0;
            tau1[vs[t]] = p1;
            double q0 = engine.probability(tau0);
            double q1 = engine.probability(tau1);
            CHECK(q0 + q1 == Catch::Approx(p_prev).margin(1e-9));
            tau = q0 >= q1 ? tau0 : tau1;
            p_prev = std::max(q0, q1);
        }
    }
}

TEST_CASE("adaptive program distribution equals the dense-oracle distribution") {
    SimpleGraph g = path_graph_simple(3);
    OneWayProgram p;
    p.declared_measurements = 2;
    p.next = [](const Transcript& t) -> std::optional<ProgramStep> {
        if (t.empty()) return test::x_basis_step(1);
        if (t.size() == 1) return t[0].outcome == 0 ? test::z_basis_step(0) : test::x_basis_step(2);
        return std::nullopt;
    };
    auto lhs = enumerate_oneway_distribution(g, p);
    auto rhs = test::dense_program_distribution(g, p);
    CHECK(test::distribution_distance(lhs, rhs) <= 1e-9);
}

TEST_CASE("oblivious simulation") {
    SECTION("trivial one-measurement program on a single vertex") {
        SimpleGraph g;
        g.add_vertex(0);
        OneWayProgram p = test::fixed_program({test::x_basis_step(0)});
        p.oblivious = true;
        CHECK(simulate_oneway_oblivious(g, p) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("final-outcome probability matches the enumerated marginal") {
        SimpleGraph g = path_graph_simple(3);
        // x-basis pre-measurements are oblivious on a path; final z on the end
        OneWayProgram p = test::fixed_program({test::x_basis_step(0), test::z_basis_step(2)});
        p.oblivious = true;
        double p0 = simulate_oneway_oblivious(g, p);
        auto dist = enumerate_oneway_distribution(g, p);
        double marginal = 0.0;
        for (const auto& [k, v] : dist)
            if (k.back() == '0') marginal += v;
        // conditional on any prefix equals the marginal for oblivious programs
        CHECK(p0 == Catch::Approx(2.0 * (dist.count("00") ? dist.at("00") : 0.0)).margin(1e-9));
        CHECK(p0 == Catch::Approx(marginal).margin(1e-9));
    }
    SECTION("a non-oblivious program raises a diagnostic") {
        SimpleGraph g = path_graph_simple(2);
        // first measurement in a skewed basis: branches are not equiprobable
        Matrix skew0{{0.9, 0.0}, {0.0, 0.2}};
        Matrix skew1{{0.1, 0.0}, {0.0, 0.8}};
        OneWayProgram p = test::fixed_program({{0, skew0, skew1}, test::z_basis_step(1)});
        p.oblivious = true;
        CHECK_THROWS_AS(simulate_oneway_oblivious(g, p), input_error);
    }
}

TEST_CASE("measurement gadget: four equiprobable branches, all correctable") {
    // G' has u = 0 adjacent to {1, 2}; G splits u into v=0 (keeps 1),
    // v'=3 (takes 2), with w=4 between them.
    SimpleGraph g_target;
    g_target.add_edge(0, 1);
    g_target.add_edge(0, 2);
    g_target.add_edge(1, 2);

    SimpleGraph g_split;
    g_split.add_edge(0, 1);
    g_split.add_edge(3, 2);
    g_split.add_edge(1, 2);
    g_split.add_edge(0, 4);
    g_split.add_edge(4, 3);

    // qubit order in g_split: 0,1,2,3,4 -> positions 0..4
    const int pos_v = 0, pos_vprime = 3, pos_w = 4;
    const std::vector<int> a_side{1};  // neighbors of v in G minus w

    Matrix plus{{0.5, 0.5}, {0.5, 0.5}};
    Matrix minus{{0.5, -0.5}, {-0.5, 0.5}};

    // target state: |G'> on qubits (0,1,2) left in place, measured qubits in
    // their post-measurement eigenstates
    auto target_state = [&](int b1, int b2) {
        auto gprime_amps = oracle_graph_state(g_target);
        StateVector t;
        t.n = 5;
        t.amps.assign(1 << 5, 0.0);
        const double s = 1.0 / std::sqrt(2.0);
        for (int base = 0; base < 8; ++base) {
            // base bits: qubit0, qubit1, qubit2 (MSB first)
            for (int bw = 0; bw < 2; ++bw)
                for (int bv = 0; bv < 2; ++bv) {
                    int idx = (base << 2) | (bv << 1) | bw;  // qubits 3 (v') and 4 (w)
                    double sign = (b1 && bw ? -1.0 : 1.0) * (b2 && bv ? -1.0 : 1.0);
                    t.amps[idx] = gprime_amps[base] * s * s * sign;
                }
        }
        return t;
    };

    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b2 = 0; b2 < 2; ++b2) {
            StateVector psi;
            psi.n = 5;
            psi.amps = oracle_graph_state(g_split);
            double p1 = psi.collapse(pos_w, b1 ? minus : plus);
            if (b1) {
                psi.apply_unitary(gate_matrix("x"), {pos_v});
                for (int a : a_side) psi.apply_unitary(gate_matrix("z"), {a});
            }
            double p2 = psi.collapse(pos_vprime, b2 ? minus : plus);
            CHECK(p1 * p2 == Catch::Approx(0.25).margin(1e-9));
            if (b2) psi.apply_unitary(gate_matrix("z"), {pos_v});
            StateVector target = target_state(b1, b2);
            CHECK(psi.overlap_magnitude(target) == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("expansion to degree 3") {
    SECTION("graphs already within degree 3 pass through") {
        SimpleGraph g = path_graph_simple(4);
        auto res = expand_to_degree3(g);
        CHECK(res.expanded.edges() == g.edges());
        CHECK(res.forest.empty());
        CHECK(res.gadgets.empty());
    }
    SECTION("star with 4 leaves") {
        SimpleGraph g = star_simple(4);
        auto res = expand_to_degree3(g);
        CHECK(res.expanded.max_degree() <= 3);
        SimpleGraph back = contract_forest(res.expanded, res.forest);
        CHECK(back.edges() == g.edges());
        CHECK(back.vertices() == g.vertices());
        CHECK(res.gadgets.size() == 1);
        CHECK(res.verified_bound);
    }
    SECTION("random graphs: degree bound, recovery, treewidth bound") {
        test::Rng rng(13);
        for (int trial = 0; trial < 25; ++trial) {
            int n = test::rand_int(rng, 4, 8);
            SimpleGraph g = test::random_connected_simple(rng, n, test::rand_int(rng, n - 1, n + 4));
            auto res = expand_to_degree3(g);
            CHECK(res.expanded.max_degree() <= 3);
            SimpleGraph back = contract_forest(res.expanded, res.forest);
            CHECK(back.edges() == g.edges());
            if (res.verified_exact) CHECK(res.tw_expanded <= res.tw_original + 1);
        }
    }
}

TEST_CASE("prefix program: branch uniformity and composite distribution") {
    SECTION("star with 4 leaves, final z measurement on a leaf") {
        SimpleGraph g = star_simple(4);
        OneWayProgram tail = test::fixed_program({test::z_basis_step(1)});
        auto expansion = expand_to_degree3(g);
        OneWayProgram composite = compose_with_prefix(expansion, tail);
        auto dist = enumerate_oneway_distribution(expansion.expanded, composite);

        // prefix branches are uniform; tail distribution is the direct one
        auto direct = test::dense_program_distribution(g, tail);
        std::map<std::string, double> marginal;
        const std::size_t prefix_len = expansion.gadgets.size() * 2;
        for (const auto& [k, v] : dist) {
            REQUIRE(k.size() == prefix_len + 1);
            marginal[k.substr(prefix_len)] += v;
        }
        CHECK(test::distribution_distance(marginal, direct) <= 1e-9);

        // each prefix branch carries probability 4^-gadgets times the tail
        for (const auto& [k, v] : dist) {
            std::string tail_bits = k.substr(prefix_len);
            double expected = direct.at(tail_bits) / std::pow(4.0, static_cast<double>(expansion.gadgets.size()));
            CHECK(v == Catch::Approx(expected).margin(1e-9));
        }
    }
    SECTION("simulate_oneway_full runs the composite end to end") {
        SimpleGraph g = star_simple(4);
        OneWayProgram tail = test::fixed_program({test::z_basis_step(2)});
        auto res = simulate_oneway_full(g, tail, 42);
        CHECK(res.run.outcomes.size() == res.prefix_length + 1);
    }
    SECTION("oblivious full pipeline reproduces the direct marginal") {
        SimpleGraph g = star_simple(4);
        OneWayProgram tail = test::fixed_program({test::z_basis_step(2)});
        tail.oblivious = true;
        double p0 = simulate_oneway_full_oblivious(g, tail);
        auto direct = test::dense_program_distribution(g, tail);
        CHECK(p0 == Catch::Approx(direct.at("0")).margin(1e-9));
    }
}

TEST_CASE("program file parsing") {
    SECTION("unconditional steps") {
        std::istringstream in(
            "step\n"
            "measure 1 [ 0.5 0 0.5 0 0.5 0 0.5 0 ] [ 0.5 0 -0.5 0 -0.5 0 0.5 0 ]\n"
            "step\n"
            "measure 2 [ 1 0 0 0 0 0 0 0 ] [ 0 0 0 0 0 0 1 0 ]\n");
        OneWayProgram p = parse_program(in);
        CHECK(p.declared_measurements == 2);
        Transcript t;
        auto s1 = p.next(t);
        REQUIRE(s1);
        CHECK(s1->qubit == 1);
        t.push_back({1, s1->element0, s1->element1, 0, 1.0, 1.0});
        auto s2 = p.next(t);
        REQUIRE(s2);
        CHECK(s2->qubit == 2);
    }
    SECTION("guards pick alternatives by earlier outcomes") {
        std::istringstream in(
            "step\n"
            "measure 1 [ 1 0 0 0 0 0 0 0 ] [ 0 0 0 0 0 0 1 0 ]\n"
            "step\n"
            "if 1=0 measure 2 [ 1 0 0 0 0 0 0 0 ] [ 0 0 0 0 0 0 1 0 ]\n"
            "if 1=1 measure 3 [ 1 0 0 0 0 0 0 0 ] [ 0 0 0 0 0 0 1 0 ]\n");
        OneWayProgram p = parse_program(in);
        Transcript t;
        auto s1 = p.next(t);
        REQUIRE(s1);
        t.push_back({1, s1->element0, s1->element1, 1, 0.5, 0.5});
        auto s2 = p.next(t);
        REQUIRE(s2);
        CHECK(s2->qubit == 3);
    }
    SECTION("errors") {
        std::istringstream no_step("measure 1 [ 1 0 0 0 0 0 0 0 ] [ 0 0 0 0 0 0 1 0 ]\n");
        CHECK_THROWS_AS(parse_program(no_step), input_error);
        std::istringstream bad_guard("step\nif x=0 measure 1 [ 1 0 0 0 0 0 0 0 ] [ 0 0 0 0 0 0 1 0 ]\n");
        CHECK_THROWS_AS(parse_program(bad_guard), input_error);
        std::istringstream not_psd("step\nmeasure 1 [ 1 0 1 0 0 0 1 0 ] [ 1 0 0 0 0 0 1 0 ]\n");
        CHECK_THROWS_AS(parse_program(not_psd), input_error);
    }
}

TEST_CASE("vertex scenario parsing") {
    SimpleGraph g;
    g.add_edge(1, 2);
    std::istringstream in("m 1 [ 1 0 0 0 0 0 0 0 ]\n");
    VertexScenario tau = parse_vertex_scenario(in, g);
    REQUIRE(tau.count(1));
    CHECK(tau.at(1)(0, 0) == Complex(1.0));
    std::istringstream bad("m 9 [ 1 0 0 0 0 0 0 0 ]\n");
    CHECK_THROWS_AS(parse_vertex_scenario(bad, g), input_error);
}
