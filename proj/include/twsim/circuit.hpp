#pragma once

// Circuit model and the simulation pipeline: parse, build the circuit graph
// and the closed tensor network, plan a contraction ordering over the
// network's wires, contract. Also the local-interaction path decomposition
// used for nearest-neighbor circuits.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twsim/errors.hpp"
#include "twsim/matrix.hpp"
#include "twsim/multigraph.hpp"
#include "twsim/planner.hpp"
#include "twsim/tensor.hpp"
#include "twsim/treewidth.hpp"

namespace twsim {

enum class GateKind { named, unitary, superop, traceout };

struct Gate {
    GateKind kind = GateKind::named;
    std::string name;              // named gates: h x y z s t cnot cz swap
    std::vector<int> qubits;       // 0-based line indices; first qubit is the most significant
    Matrix matrix;                 // unitary for kind named/unitary
    std::vector<Complex> superop;  // 4^(2a) entries for kind superop (equal arity)
};

// First listed qubit is the most significant bit of the gate matrix.
inline Matrix gate_matrix(const std::string& name) {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    if (name == "h") return Matrix{{s, s}, {s, -s}};
    if (name == "x") return Matrix{{0, 1}, {1, 0}};
    if (name == "y") return Matrix{{0, -i}, {i, 0}};
    if (name == "z") return Matrix{{1, 0}, {0, -1}};
    if (name == "s") return Matrix{{1, 0}, {0, i}};
    if (name == "t") return Matrix{{1, 0}, {0, std::polar(1.0, std::acos(-1.0) / 4)}};
    if (name == "cnot") return Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    if (name == "cz") return Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    if (name == "swap") return Matrix{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    throw input_error("unknown gate '" + name + "'");
}

inline int gate_arity(const std::string& name) {
    if (name == "cnot" || name == "cz" || name == "swap") return 2;
    return 1;
}

struct Circuit {
    int n = 0;  // input qubits
    std::vector<Gate> gates;

    int output_count() const {
        int traced = 0;
        for (const Gate& g : gates) traced += g.kind == GateKind::traceout ? 1 : 0;
        return n - traced;
    }
    int size() const { return static_cast<int>(gates.size()); }
};

inline void validate_circuit(const Circuit& c) {
    if (c.n < 1) throw input_error("circuit needs at least one qubit");
    std::vector<bool> line_alive(c.n, true);
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
        const Gate& g = c.gates[gi];
        const std::string loc = "gate " + std::to_string(gi + 1);
        if (g.qubits.empty()) throw input_error(loc + ": no qubits");
        std::set<int> distinct(g.qubits.begin(), g.qubits.end());
        if (distinct.size() != g.qubits.size()) throw input_error(loc + ": repeated qubit");
        for (int q : g.qubits) {
            if (q < 0 || q >= c.n) throw input_error(loc + ": qubit " + std::to_string(q) + " out of range");
            if (!line_alive[q]) throw input_error(loc + ": qubit " + std::to_string(q) + " was traced out");
        }
        const int a = static_cast<int>(g.qubits.size());
        switch (g.kind) {
            case GateKind::named:
                if (gate_arity(g.name) != a) throw input_error(loc + ": '" + g.name + "' arity mismatch");
                break;
            case GateKind::unitary:
                if (g.matrix.rows() != (1 << a) || g.matrix.cols() != (1 << a))
                    throw input_error(loc + ": unitary shape mismatch");
                break;
            case GateKind::superop:
                if (g.superop.size() != (std::size_t{1} << (4 * a)))
                    throw input_error(loc + ": superop entry count mismatch");
                break;
            case GateKind::traceout:
                if (a != 1) throw input_error(loc + ": traceout acts on one qubit");
                line_alive[g.qubits[0]] = false;
                break;
        }
    }
}

// Measurement scenario: one PSD element per output qubit; unlisted qubits
// default to the identity ("not measured").
class MeasurementScenario {
public:
    MeasurementScenario() = default;

    void set(int output_qubit, const Matrix& element) {
        if (!is_psd_2x2(element)) throw input_error("measurement element must be a 2x2 Hermitian PSD matrix");
        elements_[output_qubit] = element;
    }

    Matrix element(int output_qubit) const {
        auto it = elements_.find(output_qubit);
        return it == elements_.end() ? Matrix::identity(2) : it->second;
    }

    bool is_set(int output_qubit) const { return elements_.count(output_qubit) != 0; }
    const std::map<int, Matrix>& elements() const { return elements_; }

private:
    std::map<int, Matrix> elements_;
};

namespace detail {

struct CircuitWiring {
    std::vector<std::vector<WireId>> gate_in, gate_out;
    std::vector<WireId> input_wire;   // per input qubit
    std::vector<WireId> output_wire;  // per output qubit
    std::vector<int> output_line;     // output qubit -> original line
    int wire_count = 0;

    // circuit graph vertex ids
    int gate_vertex(int g) const { return g; }
    int input_vertex(int i, int T) const { return T + i; }
    int output_vertex(int j, int T, int n) const { return T + n + j; }
};

inline CircuitWiring wire_circuit(const Circuit& c) {
    validate_circuit(c);
    CircuitWiring w;
    int next = 0;
    std::vector<WireId> current(c.n);
    for (int q = 0; q < c.n; ++q) current[q] = next++;
    w.input_wire = current;
    w.gate_in.resize(c.gates.size());
    w.gate_out.resize(c.gates.size());
    std::vector<bool> alive(c.n, true);
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
        const Gate& g = c.gates[gi];
        for (int q : g.qubits) w.gate_in[gi].push_back(current[q]);
        if (g.kind == GateKind::traceout) {
            alive[g.qubits[0]] = false;
        } else {
            for (int q : g.qubits) {
                current[q] = next++;
                w.gate_out[gi].push_back(current[q]);
            }
        }
    }
    for (int q = 0; q < c.n; ++q) {
        if (alive[q]) {
            w.output_line.push_back(q);
            w.output_wire.push_back(current[q]);
        }
    }
    w.wire_count = next;
    return w;
}

}  // namespace detail

// One vertex per gate plus a terminal vertex per circuit input and output;
// one edge per wire segment, edge id = wire id. |V| = T + n + m.
inline MultiGraph circuit_graph(const Circuit& c) {
    auto w = detail::wire_circuit(c);
    const int T = c.size();
    MultiGraph g;
    for (int gi = 0; gi < T; ++gi) g.add_vertex(gi);
    for (int i = 0; i < c.n; ++i) g.add_vertex(T + i);
    for (std::size_t j = 0; j < w.output_wire.size(); ++j) g.add_vertex(T + c.n + static_cast<int>(j));

    std::map<WireId, Vertex> producer;
    for (int i = 0; i < c.n; ++i) producer[w.input_wire[i]] = T + i;
    for (int gi = 0; gi < T; ++gi)
        for (WireId out : w.gate_out[gi]) producer[out] = gi;

    for (int gi = 0; gi < T; ++gi)
        for (WireId in : w.gate_in[gi]) g.add_edge(in, producer.at(in), gi);
    for (std::size_t j = 0; j < w.output_wire.size(); ++j)
        g.add_edge(w.output_wire[j], producer.at(w.output_wire[j]), T + c.n + static_cast<int>(j));
    return g;
}

inline Tensor gate_tensor(const Gate& g, const std::vector<WireId>& in, const std::vector<WireId>& out) {
    switch (g.kind) {
        case GateKind::named: return superop_tensor(gate_matrix(g.name), in, out);
        case GateKind::unitary: return superop_tensor(g.matrix, in, out);
        case GateKind::traceout: return traceout_tensor(in);
        case GateKind::superop: {
            std::vector<WireId> wires = in;
            wires.insert(wires.end(), out.begin(), out.end());
            return Tensor(wires, g.superop);
        }
    }
    throw input_error("unreachable gate kind");
}

// The circuit's tensors plus |x_i><x_i| on every input wire and tau(i) on
// every output wire. Closed, so full contraction is rank 0.
inline TensorNetwork build_network(const Circuit& c, const std::string& x, const MeasurementScenario& tau) {
    if (static_cast<int>(x.size()) != c.n)
        throw input_error("input bitstring length " + std::to_string(x.size()) + " != qubit count " +
                          std::to_string(c.n));
    for (char b : x)
        if (b != '0' && b != '1') throw input_error("input bitstring must be over {0,1}");

    auto w = detail::wire_circuit(c);
    TensorNetwork net;
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi)
        net.add(gate_tensor(c.gates[gi], w.gate_in[gi], w.gate_out[gi]));
    for (int i = 0; i < c.n; ++i) {
        Matrix rho(2, 2);
        rho(x[i] == '1' ? 1 : 0, x[i] == '1' ? 1 : 0) = 1.0;
        net.add(density_tensor(rho, {w.input_wire[i]}));
    }
    for (std::size_t j = 0; j < w.output_wire.size(); ++j)
        net.add(measurement_tensor(tau.element(static_cast<int>(j)), w.output_wire[j]));
    return net;
}

// Graph of a tensor network: one vertex per tensor, one edge per wire used
// twice (edge id = wire id). Loops stay loops.
inline MultiGraph network_graph(const TensorNetwork& net) {
    MultiGraph g;
    for (int i = 0; i < static_cast<int>(net.tensors.size()); ++i) g.add_vertex(i);
    std::map<WireId, std::vector<int>> owners;
    for (int i = 0; i < static_cast<int>(net.tensors.size()); ++i)
        for (WireId w : net.tensors[i].wires()) owners[w].push_back(i);
    for (const auto& [w, who] : owners)
        if (who.size() == 2) g.add_edge(w, who[0], who[1]);
    return g;
}

struct SimulationResult {
    double probability = 0.0;  // clamped to [0, 1]
    Complex raw_value;         // unclamped rank-0 tensor value
    int achieved_max_rank = -1;
    ContractionPlan plan;
};

inline SimulationResult simulate_network(const TensorNetwork& net, OrderingStrategy strategy, std::uint64_t seed,
                                         int rank_budget = kDefaultRankBudget,
                                         int exact_budget = kDefaultExactBudget) {
    SimulationResult res;
    res.plan = plan_contraction(network_graph(net), strategy, seed, exact_budget);
    ContractionStats stats;
    Tensor out = contract_network(net, res.plan.ordering, rank_budget, &stats);
    res.achieved_max_rank = stats.max_intermediate_rank;
    res.raw_value = out.value();
    res.probability = std::clamp(out.value().real(), 0.0, 1.0);
    return res;
}

// Full pipeline: build the closed network, plan over its graph's
// line graph, contract along the plan.
inline SimulationResult simulate_probability(const Circuit& c, const std::string& x, const MeasurementScenario& tau,
                                             OrderingStrategy strategy = OrderingStrategy::min_fill,
                                             std::uint64_t seed = 0, int rank_budget = kDefaultRankBudget,
                                             int exact_budget = kDefaultExactBudget) {
    return simulate_network(build_network(c, x, tau), strategy, seed, rank_budget, exact_budget);
}

struct LocalInteractionDecomposition {
    TreeDecomposition decomposition;  // path of n-1 bags over multi-qubit gate vertices
    SimpleGraph reduced_graph;        // multi-qubit gates, consecutive on a shared line
    int straddle_count = 0;           // r: most gates whose qubit span covers one position
};

// Path decomposition from qubit-line locality: bag i holds the multi-qubit
// gates whose qubit span covers position i+1 (1-indexed qubits). Width is
// exactly r - 1. Single-qubit gates and terminals lie on line chains between
// these gates, so they disappear from the reduced graph.
inline LocalInteractionDecomposition local_interaction_path_decomposition(const Circuit& c) {
    validate_circuit(c);
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi)
        if (c.gates[gi].kind == GateKind::traceout)
            throw input_error("gate " + std::to_string(gi + 1) + ": unequal input/output arity");

    LocalInteractionDecomposition out;
    std::vector<int> lo(c.gates.size()), hi(c.gates.size());
    std::vector<int> multi;  // gate vertex ids
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
        const auto& qs = c.gates[gi].qubits;
        lo[gi] = 1 + *std::min_element(qs.begin(), qs.end());
        hi[gi] = 1 + *std::max_element(qs.begin(), qs.end());
        if (qs.size() >= 2) {
            multi.push_back(static_cast<int>(gi));
            out.reduced_graph.add_vertex(static_cast<int>(gi));
        }
    }

    for (int q = 0; q < c.n; ++q) {
        int prev = -1;
        for (int g : multi) {
            const auto& qs = c.gates[g].qubits;
            if (std::find(qs.begin(), qs.end(), q) == qs.end()) continue;
            if (prev >= 0) out.reduced_graph.add_edge(prev, g);
            prev = g;
        }
    }

    for (int i = 1; i <= c.n - 1; ++i) {
        std::vector<Vertex> bag;
        for (int g : multi)
            if (lo[g] <= i + 1 && i + 1 <= hi[g]) bag.push_back(g);
        out.straddle_count = std::max(out.straddle_count, static_cast<int>(bag.size()));
        out.decomposition.bags.push_back(bag);
        if (i >= 2) out.decomposition.tree_edges.emplace_back(i - 2, i - 1);
    }
    return out;
}

// Extends the local-interaction path decomposition to the full circuit graph
// by hanging the single-qubit chains of each line off a bag that covers their
// anchoring multi-qubit gates. Width grows to at most max(r-1, 2).
inline TreeDecomposition extend_path_decomposition_to_circuit_graph(const Circuit& c) {
    auto local = local_interaction_path_decomposition(c);
    auto w = detail::wire_circuit(c);
    const int T = c.size();

    TreeDecomposition td = local.decomposition;
    if (td.bags.empty()) td.bags.push_back({});  // root to hang chains from

    auto bag_with = [&](Vertex a, Vertex b) {
        for (std::size_t i = 0; i < td.bags.size(); ++i) {
            const auto& bag = td.bags[i];
            if (std::find(bag.begin(), bag.end(), a) != bag.end() &&
                std::find(bag.begin(), bag.end(), b) != bag.end())
                return static_cast<int>(i);
        }
        throw input_error("local decomposition misses an edge");
    };
    auto bag_with_one = [&](Vertex a) {
        for (std::size_t i = 0; i < td.bags.size(); ++i) {
            const auto& bag = td.bags[i];
            if (std::find(bag.begin(), bag.end(), a) != bag.end()) return static_cast<int>(i);
        }
        throw input_error("local decomposition misses a gate");
    };
    auto push_bag = [&](std::vector<Vertex> bag, int attach_to) {
        std::sort(bag.begin(), bag.end());
        bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
        td.bags.push_back(std::move(bag));
        int id = static_cast<int>(td.bags.size()) - 1;
        td.tree_edges.emplace_back(attach_to, id);
        return id;
    };

    for (int q = 0; q < c.n; ++q) {
        // vertices along line q: input terminal, gates, output terminal
        std::vector<Vertex> seq{T + q};
        std::vector<bool> is_anchor{false};
        for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
            const auto& qs = c.gates[gi].qubits;
            if (std::find(qs.begin(), qs.end(), q) != qs.end()) {
                seq.push_back(static_cast<int>(gi));
                is_anchor.push_back(qs.size() >= 2);
            }
        }
        for (std::size_t j = 0; j < w.output_line.size(); ++j)
            if (w.output_line[j] == q) {
                seq.push_back(T + c.n + static_cast<int>(j));
                is_anchor.push_back(false);
            }

        std::vector<int> anchors;
        for (std::size_t k = 0; k < seq.size(); ++k)
            if (is_anchor[k]) anchors.push_back(static_cast<int>(k));

        if (anchors.empty()) {
            int attach = 0;
            for (std::size_t k = 0; k + 1 < seq.size(); ++k)
                attach = push_bag({seq[k], seq[k + 1]}, attach);
            continue;
        }
        // prefix chain: seq[0..anchors.front()]
        {
            int a = anchors.front();
            int attach = bag_with_one(seq[a]);
            for (int k = a - 1; k >= 0; --k) attach = push_bag({seq[a], seq[k], seq[k + 1]}, attach);
        }
        // suffix chain
        {
            int a = anchors.back();
            int attach = bag_with_one(seq[a]);
            for (std::size_t k = a + 1; k < seq.size(); ++k)
                attach = push_bag({seq[a], seq[k - 1], seq[k]}, attach);
        }
        // chains between consecutive anchors
        for (std::size_t ai = 0; ai + 1 < anchors.size(); ++ai) {
            int a = anchors[ai], b = anchors[ai + 1];
            if (b == a + 1) continue;  // direct wire, covered by the local bags
            int attach = bag_with(seq[a], seq[b]);
            for (int k = a; k + 1 <= b - 1; ++k) attach = push_bag({seq[b], seq[k], seq[k + 1]}, attach);
        }
    }
    return td;
}

// ---------------------------------------------------------------------------
// text formats

namespace detail {

inline std::vector<Complex> parse_complex_list(std::istringstream& ls, int line_no) {
    std::string tok;
    if (!(ls >> tok) || tok != "[")
        throw input_error("line " + std::to_string(line_no) + ": expected '[' starting a matrix literal");
    std::vector<double> reals;
    while (ls >> tok) {
        if (tok == "]") {
            if (reals.size() % 2 != 0)
                throw input_error("line " + std::to_string(line_no) + ": odd number of reals in matrix literal");
            std::vector<Complex> out;
            for (std::size_t i = 0; i < reals.size(); i += 2) out.emplace_back(reals[i], reals[i + 1]);
            return out;
        }
        try {
            reals.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw input_error("line " + std::to_string(line_no) + ": bad number '" + tok + "' in matrix literal");
        }
    }
    throw input_error("line " + std::to_string(line_no) + ": unterminated matrix literal");
}

}  // namespace detail

// Line-oriented circuit format:
//   qubits <n>
//   <name> <qubit...>           named gate
//   u <qubit...> [ re im ... ]  inline unitary, row-major
//   traceout <qubit>
// '#' starts a comment.
inline Circuit parse_circuit(std::istream& in) {
    Circuit c;
    bool have_header = false;
    std::vector<bool> line_alive;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "qubits") {
            if (have_header) throw input_error("line " + std::to_string(line_no) + ": duplicate qubits line");
            if (!(ls >> c.n) || c.n < 1)
                throw input_error("line " + std::to_string(line_no) + ": malformed qubits line");
            line_alive.assign(c.n, true);
            have_header = true;
            continue;
        }
        if (!have_header) throw input_error("line " + std::to_string(line_no) + ": 'qubits' must come first");
        Gate g;
        if (tok == "u") {
            g.kind = GateKind::unitary;
            std::string rest;
            std::vector<int> qs;
            while (ls >> rest) {
                if (rest == "[") break;
                try {
                    qs.push_back(std::stoi(rest));
                } catch (const std::exception&) {
                    throw input_error("line " + std::to_string(line_no) + ": bad qubit '" + rest + "'");
                }
            }
            if (rest != "[") throw input_error("line " + std::to_string(line_no) + ": missing matrix literal");
            if (qs.empty() || qs.size() > 2)
                throw input_error("line " + std::to_string(line_no) + ": inline unitaries take 1 or 2 qubits");
            // put the '[' back through a fresh stream over the remainder
            std::string remainder;
            std::getline(ls, remainder);
            std::istringstream ms("[ " + remainder);
            auto entries = detail::parse_complex_list(ms, line_no);
            int dim = 1 << qs.size();
            if (static_cast<int>(entries.size()) != dim * dim)
                throw input_error("line " + std::to_string(line_no) + ": expected " + std::to_string(dim * dim) +
                                  " complex entries");
            g.qubits = qs;
            g.matrix = Matrix(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int col = 0; col < dim; ++col) g.matrix(r, col) = entries[r * dim + col];
        } else if (tok == "traceout") {
            g.kind = GateKind::traceout;
            int q;
            if (!(ls >> q)) throw input_error("line " + std::to_string(line_no) + ": traceout needs a qubit");
            g.qubits = {q};
        } else {
            g.kind = GateKind::named;
            g.name = tok;
            try {
                g.matrix = gate_matrix(tok);
            } catch (const input_error& e) {
                throw input_error("line " + std::to_string(line_no) + ": " + e.what());
            }
            int q;
            while (ls >> q) g.qubits.push_back(q);
            if (static_cast<int>(g.qubits.size()) != gate_arity(tok))
                throw input_error("line " + std::to_string(line_no) + ": '" + tok + "' takes " +
                                  std::to_string(gate_arity(tok)) + " qubit(s)");
        }
        for (int q : g.qubits) {
            if (q < 0 || q >= c.n)
                throw input_error("line " + std::to_string(line_no) + ": qubit " + std::to_string(q) +
                                  " out of range for a " + std::to_string(c.n) + "-qubit circuit");
            if (!line_alive[q])
                throw input_error("line " + std::to_string(line_no) + ": qubit " + std::to_string(q) +
                                  " was traced out");
        }
        if (g.kind == GateKind::traceout) line_alive[g.qubits[0]] = false;
        c.gates.push_back(std::move(g));
    }
    if (!have_header) throw input_error("missing 'qubits' line");
    validate_circuit(c);
    return c;
}

inline Circuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    return parse_circuit(in);
}

inline std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline std::string serialize_circuit(const Circuit& c) {
    std::ostringstream os;
    os << "qubits " << c.n << '\n';
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::named:
                os << g.name;
                for (int q : g.qubits) os << ' ' << q;
                os << '\n';
                break;
            case GateKind::traceout:
                os << "traceout " << g.qubits[0] << '\n';
                break;
            case GateKind::unitary: {
                os << "u";
                for (int q : g.qubits) os << ' ' << q;
                os << " [";
                for (int r = 0; r < g.matrix.rows(); ++r)
                    for (int col = 0; col < g.matrix.cols(); ++col)
                        os << ' ' << format_double(g.matrix(r, col).real()) << ' '
                           << format_double(g.matrix(r, col).imag());
                os << " ]\n";
                break;
            }
            case GateKind::superop:
                throw input_error("inline superoperators have no text form");
        }
    }
    return os.str();
}

// Scenario file: "m <output qubit> [ 8 reals ]" per measured qubit,
// row-major 2x2 complex; unlisted qubits default to the identity.
inline MeasurementScenario parse_scenario(std::istream& in, int output_count) {
    MeasurementScenario tau;
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
        int q;
        if (!(ls >> q)) throw input_error("line " + std::to_string(line_no) + ": missing qubit");
        if (q < 0 || q >= output_count)
            throw input_error("line " + std::to_string(line_no) + ": output qubit " + std::to_string(q) +
                              " out of range");
        auto entries = detail::parse_complex_list(ls, line_no);
        if (entries.size() != 4)
            throw input_error("line " + std::to_string(line_no) + ": expected 4 complex entries");
        Matrix m(2, 2);
        m(0, 0) = entries[0];
        m(0, 1) = entries[1];
        m(1, 0) = entries[2];
        m(1, 1) = entries[3];
        try {
            tau.set(q, m);
        } catch (const input_error& e) {
            throw input_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return tau;
}

}  // namespace twsim
