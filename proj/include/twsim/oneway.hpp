#pragma once

// Graph states and one-way (measurement-based) computation. Scenario
// probabilities go through the split-tensor network, where each
// controlled-phase tensor becomes an identity router and a carrier joined by
// two transition wires, keeping the network degree at 4. The transcript
// simulators and the degree-3 expansion with its oblivious measurement
// prefix sit on top.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "twsim/circuit.hpp"
#include "twsim/errors.hpp"
#include "twsim/matrix.hpp"
#include "twsim/multigraph.hpp"
#include "twsim/oracle.hpp"
#include "twsim/planner.hpp"
#include "twsim/tensor.hpp"
#include "twsim/treewidth.hpp"

namespace twsim {

// measured qubits carry their realized element; missing means identity
using VertexScenario = std::map<Vertex, Matrix>;

inline std::map<Vertex, int> graph_state_qubit_map(const SimpleGraph& g) {
    std::map<Vertex, int> out;
    int i = 0;
    for (Vertex v : g.vertices()) out[v] = i++;
    return out;
}

// n Hadamards, then one controlled phase per edge in sorted order. Qubit i
// is the i-th vertex in sorted order.
inline Circuit graph_state_circuit(const SimpleGraph& g) {
    auto qubit = graph_state_qubit_map(g);
    Circuit c;
    c.n = static_cast<int>(g.vertex_count());
    for (int i = 0; i < c.n; ++i) {
        Gate h;
        h.kind = GateKind::named;
        h.name = "h";
        h.matrix = gate_matrix("h");
        h.qubits = {i};
        c.gates.push_back(h);
    }
    for (const auto& [u, v] : g.edges()) {
        Gate cz;
        cz.kind = GateKind::named;
        cz.name = "cz";
        cz.matrix = gate_matrix("cz");
        cz.qubits = {qubit.at(u), qubit.at(v)};
        c.gates.push_back(cz);
    }
    return c;
}

// The split pair for one controlled-phase tensor, sharing the two transition
// wires t+ and t-. Contracting them over t+/t- reproduces the original
// tensor exactly.
inline std::pair<Tensor, Tensor> split_cz_tensors(WireId u_in, WireId u_out, WireId v_in, WireId v_out,
                                                  WireId t_plus, WireId t_minus) {
    Tensor router = superop_tensor(Matrix::identity(4), {u_in, t_minus}, {t_plus, u_out});
    Tensor carrier = superop_tensor(gate_matrix("cz"), {t_plus, v_in}, {t_minus, v_out});
    return {std::move(router), std::move(carrier)};
}

// Builds the split network for |G> once and reuses its contraction plan
// across scenarios: only the rank-1 measurement tensors change.
class GraphStateEngine {
public:
    explicit GraphStateEngine(SimpleGraph g, OrderingStrategy strategy = OrderingStrategy::min_fill,
                              std::uint64_t seed = 0, int rank_budget = kDefaultRankBudget)
        : graph_(std::move(g)), rank_budget_(rank_budget) {
        int next_wire = 0;
        std::map<Vertex, WireId> current;
        for (Vertex v : graph_.vertices()) {
            WireId in = next_wire++;
            WireId after_h = next_wire++;
            Matrix rho(2, 2);
            rho(0, 0) = 1.0;
            net_.add(density_tensor(rho, {in}));
            net_.add(superop_tensor(gate_matrix("h"), {in}, {after_h}));
            current[v] = after_h;
        }
        for (const auto& [u, v] : graph_.edges()) {
            WireId u_out = next_wire++;
            WireId v_out = next_wire++;
            WireId t_plus = next_wire++;
            WireId t_minus = next_wire++;
            auto [router, carrier] = split_cz_tensors(current[u], u_out, current[v], v_out, t_plus, t_minus);
            net_.add(std::move(router));
            net_.add(std::move(carrier));
            current[u] = u_out;
            current[v] = v_out;
        }
        for (Vertex v : graph_.vertices()) {
            measurement_slot_[v] = net_.tensors.size();
            measurement_wire_[v] = current[v];
            net_.add(measurement_tensor(Matrix::identity(2), current[v]));
        }
        plan_ = plan_contraction(network_graph(net_), strategy, seed);
    }

    const SimpleGraph& graph() const { return graph_; }
    const ContractionPlan& plan() const { return plan_; }

    double probability(const VertexScenario& tau, ContractionStats* stats = nullptr) const {
        for (const auto& [v, m] : tau)
            if (!graph_.has_vertex(v))
                throw input_error("scenario names unknown vertex " + std::to_string(v));
        TensorNetwork net = net_;
        for (const auto& [v, m] : tau)
            net.tensors[measurement_slot_.at(v)] = measurement_tensor(m, measurement_wire_.at(v));
        Tensor out = contract_network(net, plan_.ordering, rank_budget_, stats);
        return out.value().real();
    }

private:
    SimpleGraph graph_;
    TensorNetwork net_;
    ContractionPlan plan_;
    std::map<Vertex, std::size_t> measurement_slot_;
    std::map<Vertex, WireId> measurement_wire_;
    int rank_budget_;
};

inline double graphstate_probability(const SimpleGraph& g, const VertexScenario& tau,
                                     OrderingStrategy strategy = OrderingStrategy::min_fill, std::uint64_t seed = 0,
                                     int rank_budget = kDefaultRankBudget) {
    return GraphStateEngine(g, strategy, seed, rank_budget).probability(tau);
}

// ---------------------------------------------------------------------------
// one-way programs

struct ProgramStep {
    Vertex qubit;
    Matrix element0, element1;  // POVM pair {P0, P1}
};

struct TranscriptEntry {
    Vertex qubit;
    Matrix element0, element1;
    int outcome = 0;
    double branch_probability = 1.0;   // conditional on the prefix
    double running_probability = 1.0;  // joint probability of the whole prefix
};

using Transcript = std::vector<TranscriptEntry>;

struct OneWayProgram {
    int declared_measurements = 0;
    bool oblivious = false;  // caller-declared; spot-checked by the simulators
    std::function<std::optional<ProgramStep>(const Transcript&)> next;
};

inline constexpr double kBranchProbabilityFloor = 1e-12;

struct OneWayRun {
    std::vector<int> outcomes;
    Transcript transcript;
};

namespace detail {

inline VertexScenario scenario_of(const Transcript& transcript) {
    VertexScenario tau;
    for (const auto& e : transcript) tau[e.qubit] = e.outcome == 0 ? e.element0 : e.element1;
    return tau;
}

inline void check_step(const SimpleGraph& g, const Transcript& transcript, const ProgramStep& step) {
    if (!g.has_vertex(step.qubit)) throw input_error("program measures unknown qubit " + std::to_string(step.qubit));
    for (const auto& e : transcript)
        if (e.qubit == step.qubit)
            throw input_error("program measures qubit " + std::to_string(step.qubit) + " twice");
    if (!is_psd_2x2(step.element0) || !is_psd_2x2(step.element1))
        throw input_error("measurement elements must be 2x2 Hermitian PSD");
}

}  // namespace detail

// Transcript simulation: maintain (tau, p); per step compute p_t^0 once, flip a
// coin with probability p_t^0 / p_{t-1}, update tau and p.
inline OneWayRun simulate_oneway_randomized(const SimpleGraph& g, const OneWayProgram& program, std::uint64_t seed,
                                            OrderingStrategy strategy = OrderingStrategy::min_fill,
                                            int rank_budget = kDefaultRankBudget) {
    GraphStateEngine engine(g, strategy, 0, rank_budget);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OneWayRun run;
    double p_prev = 1.0;
    while (auto step = program.next(run.transcript)) {
        detail::check_step(g, run.transcript, *step);
        VertexScenario tau = detail::scenario_of(run.transcript);
        tau[step->qubit] = step->element0;
        double p0 = engine.probability(tau);
        double ratio = std::clamp(p0 / p_prev, 0.0, 1.0);
        int outcome = unit(rng) < ratio ? 0 : 1;
        double p_next = outcome == 0 ? p0 : p_prev - p0;
        if (p_next < kBranchProbabilityFloor)
            throw input_error("transcript probability fell below 1e-12 at step " +
                              std::to_string(run.transcript.size() + 1));
        run.transcript.push_back({step->qubit, step->element0, step->element1, outcome, p_next / p_prev, p_next});
        run.outcomes.push_back(outcome);
        p_prev = p_next;
    }
    return run;
}

// Exact joint distribution over outcome sequences, enumerated over the same
// branching process the randomized simulator follows. Branches below the
// probability floor are dropped.
inline std::map<std::string, double> enumerate_oneway_distribution(const SimpleGraph& g, const OneWayProgram& program,
                                                                   OrderingStrategy strategy = OrderingStrategy::min_fill,
                                                                   int rank_budget = kDefaultRankBudget) {
    GraphStateEngine engine(g, strategy, 0, rank_budget);
    std::map<std::string, double> dist;
    std::function<void(Transcript&, std::string&, double)> walk = [&](Transcript& transcript, std::string& outcomes,
                                                                      double p_prev) {
        auto step = program.next(transcript);
        if (!step) {
            dist[outcomes] += p_prev;
            return;
        }
        detail::check_step(g, transcript, *step);
        VertexScenario tau = detail::scenario_of(transcript);
        tau[step->qubit] = step->element0;
        double p0 = engine.probability(tau);
        const double branches[2] = {p0, p_prev - p0};
        for (int outcome = 0; outcome < 2; ++outcome) {
            double p_next = branches[outcome];
            if (p_next < kBranchProbabilityFloor) continue;
            transcript.push_back({step->qubit, step->element0, step->element1, outcome, p_next / p_prev, p_next});
            outcomes.push_back(outcome == 0 ? '0' : '1');
            walk(transcript, outcomes, p_next);
            outcomes.pop_back();
            transcript.pop_back();
        }
    };
    Transcript transcript;
    std::string outcomes;
    walk(transcript, outcomes, 1.0);
    return dist;
}

// Deterministic simulation of an oblivious program: all pre-final branches
// are equiprobable, so only the all-zero chain is evaluated and the answer is
// p_T / p_{T-1}. Equal branch probabilities are spot-checked on the first
// two levels.
inline double simulate_oneway_oblivious(const SimpleGraph& g, const OneWayProgram& program,
                                        OrderingStrategy strategy = OrderingStrategy::min_fill,
                                        int rank_budget = kDefaultRankBudget) {
    GraphStateEngine engine(g, strategy, 0, rank_budget);

    // forced all-zero chain
    Transcript transcript;
    double p_prev = 1.0, p_before_last = 1.0;
    while (auto step = program.next(transcript)) {
        detail::check_step(g, transcript, *step);
        VertexScenario tau = detail::scenario_of(transcript);
        tau[step->qubit] = step->element0;
        double p0 = engine.probability(tau);
        p_before_last = p_prev;
        transcript.push_back({step->qubit, step->element0, step->element1, 0, p0 / p_prev, p0});
        p_prev = p0;
    }
    if (transcript.empty()) throw input_error("program makes no measurements");
    const int T = static_cast<int>(transcript.size());
    if (p_before_last < kBranchProbabilityFloor) throw input_error("p_{T-1} is (near) zero");

    // spot-check obliviousness: prefixes of length 1 and 2 must be uniform
    const int check_depth = std::min(2, T - 1);
    std::function<void(Transcript&, double, int)> check = [&](Transcript& prefix, double p, int depth) {
        if (depth == 0) return;
        auto step = program.next(prefix);
        if (!step) return;
        VertexScenario tau = detail::scenario_of(prefix);
        tau[step->qubit] = step->element0;
        double p0 = engine.probability(tau);
        const double branches[2] = {p0, p - p0};
        double expected = std::pow(0.5, static_cast<double>(prefix.size()) + 1);
        for (int outcome = 0; outcome < 2; ++outcome) {
            if (std::abs(branches[outcome] - expected) > 1e-8)
                throw input_error("program is not oblivious: branch probability " +
                                  std::to_string(branches[outcome]) + " != " + std::to_string(expected));
            prefix.push_back({step->qubit, step->element0, step->element1, outcome, branches[outcome] / p,
                              branches[outcome]});
            check(prefix, branches[outcome], depth - 1);
            prefix.pop_back();
        }
    };
    Transcript prefix;
    check(prefix, 1.0, check_depth);

    return p_prev / p_before_last;
}

// ---------------------------------------------------------------------------
// degree-3 expansion

struct ExpansionGadget {
    Vertex w;                    // inserted middle vertex, measured first
    Vertex vprime;               // second copy, measured second
    Vertex survivor;             // copy that keeps representing the original vertex
    std::vector<Vertex> a_side;  // survivor's neighbors (minus w) at gadget time
};

struct ExpansionResult {
    SimpleGraph expanded;  // G1 with max degree <= 3
    std::vector<std::pair<Vertex, Vertex>> forest;  // contracting these recovers G
    std::vector<ExpansionGadget> gadgets;           // two measurements each
    OneWayProgram prefix;                           // oblivious; turns |G1> into |G>
    bool verified_exact = false;   // treewidth bound confirmed by the exact solver
    bool verified_bound = false;   // ... or by the heuristic sandwich
    int tw_original = -1, tw_expanded = -1;  // filled when the exact check ran; -1 when G was returned unchanged
};

inline SimpleGraph contract_forest(const SimpleGraph& g1, const std::vector<std::pair<Vertex, Vertex>>& forest) {
    MultiGraph g = g1.to_multigraph();
    std::map<Vertex, Vertex> rep;
    for (Vertex v : g1.vertices()) rep[v] = v;
    auto find = [&](Vertex v) {
        while (rep.at(v) != v) v = rep.at(v);
        return v;
    };
    for (const auto& [u0, v0] : forest) {
        Vertex u = find(u0), v = find(v0);
        bool found = false;
        for (const auto& [id, e] : g.edges()) {
            if (e.same_endpoints(Edge{u, v})) {
                auto res = g.contract_edge(id);
                g = std::move(res.graph);
                rep[std::max(u, v)] = res.merged;
                found = true;
                break;
            }
        }
        if (!found) throw input_error("forest edge not present in expansion");
    }
    return underlying_simple_graph(g);
}

namespace detail {

inline Matrix pauli_xz(int x, int z) {
    Matrix m = Matrix::identity(2);
    if (z) m = gate_matrix("z") * m;
    if (x) m = gate_matrix("x") * m;
    return m;
}

inline Matrix conjugate_element(const Matrix& element, int x, int z) {
    if (!x && !z) return element;
    Matrix c = pauli_xz(x, z);
    return c.adjoint() * element * c;
}

// Pauli corrections accumulated over completed prefix steps; (x, z) parities
// per qubit.
inline std::map<Vertex, std::pair<int, int>> pending_corrections(const std::vector<ExpansionGadget>& gadgets,
                                                                 const Transcript& transcript) {
    std::map<Vertex, std::pair<int, int>> fold;
    for (std::size_t t = 0; t < transcript.size() && t < gadgets.size() * 2; ++t) {
        if (transcript[t].outcome == 0) continue;
        const ExpansionGadget& gadget = gadgets[t / 2];
        if (t % 2 == 0) {
            fold[gadget.survivor].first ^= 1;  // sigma_x on the survivor
            for (Vertex a : gadget.a_side) fold[a].second ^= 1;
        } else {
            fold[gadget.survivor].second ^= 1;  // sigma_z on the survivor
        }
    }
    return fold;
}

}  // namespace detail

// Caterpillar split of every vertex of degree > 3, neighbor order taken from
// a depth-first traversal of a min-fill tree decomposition, with a vertex
// inserted on every spine edge so the measurement gadget applies. The
// treewidth bound tw(G1) <= tw(G) + 1 is checked empirically: exactly when
// the graphs are small enough, by a heuristic upper bound against a degree
// lower bound otherwise.
inline ExpansionResult expand_to_degree3(const SimpleGraph& g, bool verify = true, int exact_budget = 18) {
    ExpansionResult out;
    if (g.max_degree() <= 3) {
        out.expanded = g;
        out.verified_exact = true;
        out.verified_bound = true;
        out.prefix.next = [](const Transcript&) -> std::optional<ProgramStep> { return std::nullopt; };
        out.prefix.oblivious = true;
        return out;
    }

    // neighbor order: first appearance along a DFS of a heuristic decomposition
    std::map<Vertex, int> first_seen;
    {
        auto td = ordering_to_decomposition(g, heuristic_order(g, OrderingStrategy::min_fill, 0));
        std::vector<std::vector<int>> adj(td.bags.size());
        for (const auto& [a, b] : td.tree_edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        for (auto& nb : adj) std::sort(nb.begin(), nb.end());
        std::vector<bool> seen_bag(td.bags.size(), false);
        std::vector<int> stack{0};
        int counter = 0;
        while (!stack.empty()) {
            int b = stack.back();
            stack.pop_back();
            if (b >= static_cast<int>(td.bags.size()) || seen_bag[b]) continue;
            seen_bag[b] = true;
            for (Vertex v : td.bags[b])
                if (!first_seen.count(v)) first_seen[v] = counter++;
            for (auto it = adj[b].rbegin(); it != adj[b].rend(); ++it)
                if (!seen_bag[*it]) stack.push_back(*it);
        }
    }

    Vertex next_id = 0;
    for (Vertex v : g.vertices()) next_id = std::max(next_id, v + 1);

    // copy_of[v][u]: the copy of v that owns the original edge {v, u}
    std::map<Vertex, std::map<Vertex, Vertex>> copy_of;
    std::map<Vertex, std::vector<Vertex>> chain;  // split vertex -> its copies in spine order
    for (Vertex v : g.vertices()) {
        auto nbrs = g.neighbors(v);
        if (static_cast<int>(nbrs.size()) <= 3) {
            for (Vertex u : nbrs) copy_of[v][u] = v;
            continue;
        }
        std::sort(nbrs.begin(), nbrs.end(), [&](Vertex a, Vertex b) {
            int fa = first_seen.count(a) ? first_seen[a] : 1 << 30;
            int fb = first_seen.count(b) ? first_seen[b] : 1 << 30;
            return std::tie(fa, a) < std::tie(fb, b);
        });
        const int d = static_cast<int>(nbrs.size());
        const int k = d - 2;  // copies; ends host two neighbors, middles one
        std::vector<Vertex> copies{v};
        for (int i = 1; i < k; ++i) copies.push_back(next_id++);
        chain[v] = copies;
        int next_nbr = 0;
        for (int i = 0; i < k; ++i) {
            int take = (i == 0 || i == k - 1) ? 2 : 1;
            for (int t = 0; t < take; ++t) copy_of[v][nbrs[next_nbr++]] = copies[i];
        }
    }

    for (Vertex v : g.vertices()) out.expanded.add_vertex(v);
    for (const auto& [v, copies] : chain)
        for (std::size_t i = 1; i < copies.size(); ++i) out.expanded.add_vertex(copies[i]);
    for (const auto& [u, v] : g.edges()) out.expanded.add_edge(copy_of[u].at(v), copy_of[v].at(u));

    // insert a middle vertex on every spine edge
    std::map<Vertex, std::vector<Vertex>> middles;
    for (const auto& [v, copies] : chain) {
        for (std::size_t i = 0; i + 1 < copies.size(); ++i) {
            Vertex m = next_id++;
            out.expanded.add_vertex(m);
            out.expanded.add_edge(copies[i], m);
            out.expanded.add_edge(m, copies[i + 1]);
            out.forest.emplace_back(copies[i], m);
            out.forest.emplace_back(m, copies[i + 1]);
            middles[v].push_back(m);
        }
    }

    // gadget sequence over the evolving graph: merge each spine link in turn
    {
        SimpleGraph current = out.expanded;
        auto merge_into = [&](Vertex survivor, Vertex gone) {
            SimpleGraph next;
            for (Vertex x : current.vertices())
                if (x != gone) next.add_vertex(x);
            for (const auto& [a, b] : current.edges()) {
                Vertex na = a == gone ? survivor : a;
                Vertex nb = b == gone ? survivor : b;
                if (na != nb) next.add_edge(na, nb);
            }
            current = std::move(next);
        };
        for (const auto& [v, copies] : chain) {
            for (std::size_t i = 0; i + 1 < copies.size(); ++i) {
                ExpansionGadget gadget;
                gadget.w = middles.at(v)[i];
                gadget.vprime = copies[i + 1];
                gadget.survivor = v;
                for (Vertex a : current.neighbors(v))
                    if (a != gadget.w) gadget.a_side.push_back(a);
                out.gadgets.push_back(gadget);
                merge_into(v, gadget.w);
                merge_into(v, gadget.vprime);
            }
        }
        SimpleGraph recovered = contract_forest(out.expanded, out.forest);
        if (recovered.edges() != g.edges() || recovered.vertices() != g.vertices())
            throw verification_error("contracting the expansion forest did not recover the graph");
    }

    // the oblivious prefix: sigma_x on w then on v', corrections folded into
    // later measurements
    {
        const auto gadgets = out.gadgets;
        const double half = 0.5;
        Matrix plus{{half, half}, {half, half}};
        Matrix minus{{half, -half}, {-half, half}};
        out.prefix.declared_measurements = static_cast<int>(gadgets.size()) * 2;
        out.prefix.oblivious = true;
        out.prefix.next = [gadgets, plus, minus](const Transcript& transcript) -> std::optional<ProgramStep> {
            std::size_t t = transcript.size();
            if (t >= gadgets.size() * 2) return std::nullopt;
            const ExpansionGadget& gadget = gadgets[t / 2];
            Vertex q = (t % 2 == 0) ? gadget.w : gadget.vprime;
            auto fold = detail::pending_corrections(gadgets, transcript);
            auto [x, z] = fold.count(q) ? fold[q] : std::pair<int, int>{0, 0};
            return ProgramStep{q, detail::conjugate_element(plus, x, z), detail::conjugate_element(minus, x, z)};
        };
    }

    if (verify) {
        auto exact_tw_reduced = [&](const SimpleGraph& sg) {
            if (sg.edge_count() == 0) return sg.vertex_count() ? 0 : -1;
            if (sg.edge_count() == 1) return 1;
            MultiGraph reduced = simplify(sg.to_multigraph()).graph;
            return exact_treewidth(reduced, exact_budget).treewidth;
        };
        try {
            out.tw_original = exact_tw_reduced(g);
            out.tw_expanded = exact_tw_reduced(out.expanded);
            out.verified_exact = true;
            out.verified_bound = out.tw_expanded <= out.tw_original + 1;
            if (!out.verified_bound)
                throw verification_error("expansion raised the treewidth from " + std::to_string(out.tw_original) +
                                         " to " + std::to_string(out.tw_expanded));
        } catch (const budget_error&) {
            int ub_expanded = elimination_width(out.expanded, heuristic_order(out.expanded, OrderingStrategy::min_fill)).width;
            int lb_original = treewidth_lower_bound_mmd(g);
            int lb_expanded = treewidth_lower_bound_mmd(out.expanded);
            int ub_original = elimination_width(g, heuristic_order(g, OrderingStrategy::min_fill)).width;
            if (lb_expanded > ub_original + 1)
                throw verification_error("expansion certainly raised the treewidth: lower bound " +
                                         std::to_string(lb_expanded) + " > upper bound " +
                                         std::to_string(ub_original) + " + 1");
            out.verified_bound = ub_expanded <= lb_original + 1;
        }
    }
    return out;
}

// Prefix followed by the program, with pending Pauli corrections from the
// gadgets conjugated into every later measurement on the same qubit.
inline OneWayProgram compose_with_prefix(const ExpansionResult& expansion, const OneWayProgram& program) {
    const auto gadgets = expansion.gadgets;
    const std::size_t prefix_len = gadgets.size() * 2;
    OneWayProgram composite;
    composite.declared_measurements = static_cast<int>(prefix_len) + program.declared_measurements;
    composite.oblivious = program.oblivious;
    auto prefix_next = expansion.prefix.next;
    auto tail_next = program.next;
    composite.next = [gadgets, prefix_len, prefix_next, tail_next](const Transcript& transcript)
        -> std::optional<ProgramStep> {
        if (transcript.size() < prefix_len) return prefix_next(transcript);
        Transcript tail(transcript.begin() + static_cast<std::ptrdiff_t>(prefix_len), transcript.end());
        auto step = tail_next(tail);
        if (!step) return std::nullopt;
        auto fold = detail::pending_corrections(gadgets, transcript);
        auto [x, z] = fold.count(step->qubit) ? fold[step->qubit] : std::pair<int, int>{0, 0};
        return ProgramStep{step->qubit, detail::conjugate_element(step->element0, x, z),
                           detail::conjugate_element(step->element1, x, z)};
    };
    return composite;
}

// ---------------------------------------------------------------------------
// program and scenario files

// One-way program file: steps separated by "step" lines, each holding one or
// more alternatives
//   [if <step>=<bit> ...] measure <qubit> [ 8 reals ] [ 8 reals ]
// The first alternative whose guards match the earlier outcomes fires.
// Qubits are the graph file's vertex ids.
inline OneWayProgram parse_program(std::istream& in) {
    struct Alternative {
        std::vector<std::pair<int, int>> guards;  // (1-based step, outcome bit)
        Vertex qubit;
        Matrix p0, p1;
    };
    auto steps = std::make_shared<std::vector<std::vector<Alternative>>>();

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "step") {
            steps->push_back({});
            continue;
        }
        if (steps->empty()) throw input_error("line " + std::to_string(line_no) + ": 'step' must come first");
        Alternative alt;
        while (tok == "if") {
            std::string cond;
            if (!(ls >> cond)) throw input_error("line " + std::to_string(line_no) + ": malformed guard");
            auto eq = cond.find('=');
            if (eq == std::string::npos) throw input_error("line " + std::to_string(line_no) + ": malformed guard");
            try {
                int step_no = std::stoi(cond.substr(0, eq));
                int bit = std::stoi(cond.substr(eq + 1));
                if (step_no < 1 || (bit != 0 && bit != 1)) throw std::invalid_argument("range");
                alt.guards.emplace_back(step_no, bit);
            } catch (const std::exception&) {
                throw input_error("line " + std::to_string(line_no) + ": malformed guard '" + cond + "'");
            }
            if (!(ls >> tok)) throw input_error("line " + std::to_string(line_no) + ": missing 'measure'");
        }
        if (tok != "measure") throw input_error("line " + std::to_string(line_no) + ": expected 'measure'");
        if (!(ls >> alt.qubit)) throw input_error("line " + std::to_string(line_no) + ": missing qubit");
        auto read_element = [&]() {
            auto entries = detail::parse_complex_list(ls, line_no);
            if (entries.size() != 4) throw input_error("line " + std::to_string(line_no) + ": element needs 4 entries");
            Matrix m(2, 2);
            m(0, 0) = entries[0];
            m(0, 1) = entries[1];
            m(1, 0) = entries[2];
            m(1, 1) = entries[3];
            if (!is_psd_2x2(m))
                throw input_error("line " + std::to_string(line_no) + ": element is not Hermitian PSD");
            return m;
        };
        alt.p0 = read_element();
        alt.p1 = read_element();
        steps->back().push_back(std::move(alt));
    }

    OneWayProgram program;
    program.declared_measurements = static_cast<int>(steps->size());
    program.next = [steps](const Transcript& transcript) -> std::optional<ProgramStep> {
        std::size_t t = transcript.size();
        if (t >= steps->size()) return std::nullopt;
        for (const auto& alt : (*steps)[t]) {
            bool ok = true;
            for (const auto& [step_no, bit] : alt.guards) {
                if (step_no > static_cast<int>(t) || transcript[step_no - 1].outcome != bit) {
                    ok = false;
                    break;
                }
            }
            if (ok) return ProgramStep{alt.qubit, alt.p0, alt.p1};
        }
        throw input_error("no program alternative applies at step " + std::to_string(t + 1));
    };
    return program;
}

// Scenario over graph vertices: "m <vertex id> [ 8 reals ]" per line.
inline VertexScenario parse_vertex_scenario(std::istream& in, const SimpleGraph& g) {
    VertexScenario tau;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok != "m") throw input_error("line " + std::to_string(line_no) + ": expected 'm'");
        Vertex v;
        if (!(ls >> v)) throw input_error("line " + std::to_string(line_no) + ": missing vertex");
        if (!g.has_vertex(v))
            throw input_error("line " + std::to_string(line_no) + ": unknown vertex " + std::to_string(v));
        auto entries = detail::parse_complex_list(ls, line_no);
        if (entries.size() != 4) throw input_error("line " + std::to_string(line_no) + ": element needs 4 entries");
        Matrix m(2, 2);
        m(0, 0) = entries[0];
        m(0, 1) = entries[1];
        m(1, 0) = entries[2];
        m(1, 1) = entries[3];
        if (!is_psd_2x2(m)) throw input_error("line " + std::to_string(line_no) + ": element is not Hermitian PSD");
        tau[v] = m;
    }
    return tau;
}

struct OneWayFullResult {
    OneWayRun run;             // prefix outcomes first, then the program's
    ExpansionResult expansion;
    std::size_t prefix_length = 0;
};

// Full reduction: expand to degree <= 3, prepend the oblivious prefix,
// simulate on |G1>. The program's outcome distribution is unchanged.
inline OneWayFullResult simulate_oneway_full(const SimpleGraph& g, const OneWayProgram& program, std::uint64_t seed,
                                             OrderingStrategy strategy = OrderingStrategy::min_fill,
                                             int rank_budget = kDefaultRankBudget) {
    OneWayFullResult out;
    out.expansion = expand_to_degree3(g);
    out.prefix_length = out.expansion.gadgets.size() * 2;
    OneWayProgram composite = compose_with_prefix(out.expansion, program);
    out.run = simulate_oneway_randomized(out.expansion.expanded, composite, seed, strategy, rank_budget);
    return out;
}

// Deterministic variant for oblivious programs: composing with the prefix
// keeps the program oblivious, so the final-outcome probability is
// p_T / p_{T-1} on the expanded graph.
inline double simulate_oneway_full_oblivious(const SimpleGraph& g, const OneWayProgram& program,
                                             OrderingStrategy strategy = OrderingStrategy::min_fill,
                                             int rank_budget = kDefaultRankBudget) {
    ExpansionResult expansion = expand_to_degree3(g);
    OneWayProgram composite = compose_with_prefix(expansion, program);
    return simulate_oneway_oblivious(expansion.expanded, composite, strategy, rank_budget);
}

}  // namespace twsim
