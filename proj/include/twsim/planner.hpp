#pragma once

// Contraction orderings and their cost. The cost of an ordering is the
// maximum degree of a merged vertex during one-edge-at-a-time contraction
// (loops stay and count toward the degree); the minimum over orderings equals
// the treewidth of the line graph, which is what planning exploits.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "twsim/errors.hpp"
#include "twsim/multigraph.hpp"
#include "twsim/treewidth.hpp"

namespace twsim {

using ContractionOrdering = std::vector<EdgeId>;

struct ContractionPlan {
    ContractionOrdering ordering;
    int predicted_cc = -1;
    std::string source;
};

// Simulates one-edge-at-a-time contraction and returns the maximum merged
// vertex degree. Loops remain uncontracted until their turn and count 1.
inline int cc_of_ordering(const MultiGraph& g, const ContractionOrdering& pi) {
    {
        std::set<EdgeId> claimed(pi.begin(), pi.end());
        if (claimed.size() != pi.size()) throw input_error("contraction ordering repeats an edge");
        if (pi.size() != g.edge_count()) throw input_error("contraction ordering must cover every edge");
        for (EdgeId id : pi)
            if (!g.has_edge(id)) throw input_error("contraction ordering names unknown edge " + std::to_string(id));
    }

    std::map<Vertex, Vertex> parent;
    for (Vertex v : g.vertices()) parent[v] = v;
    auto find = [&](Vertex v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };

    std::set<EdgeId> alive(pi.begin(), pi.end());
    int cc = -1;
    for (EdgeId id : pi) {
        const Edge& e = g.edge(id);
        Vertex ru = find(e.u), rv = find(e.v);
        alive.erase(id);
        Vertex merged = std::min(ru, rv);
        if (ru != rv) parent[std::max(ru, rv)] = merged;
        int deg = 0;
        for (EdgeId a : alive) {
            const Edge& ae = g.edge(a);
            if (find(ae.u) == merged || find(ae.v) == merged) ++deg;
        }
        cc = std::max(cc, deg);
    }
    return cc;
}

// Leaf peeling from the proof of cc(G) = tw(G*): repeatedly take a leaf bag;
// if it is contained in its parent, drop it, otherwise emit an edge private
// to the leaf. Emitted edges have all their remaining line-graph neighbors
// inside the leaf bag, so the ordering's cost never exceeds the width.
inline ContractionOrdering decomposition_to_contraction_ordering(const TreeDecomposition& td, const MultiGraph& g) {
    const SimpleGraph lg = line_graph(g);
    auto violations = validate_decomposition(td, lg);
    if (!violations.empty())
        throw input_error("decomposition is not valid for the line graph: " + violations.front().detail);
    if (g.edge_count() == 0) return {};

    const int k = static_cast<int>(td.bags.size());
    std::vector<std::set<EdgeId>> bags(k);
    for (int b = 0; b < k; ++b) bags[b] = {td.bags[b].begin(), td.bags[b].end()};
    std::vector<std::set<int>> tree_adj(k);
    for (const auto& [a, b] : td.tree_edges) {
        tree_adj[a].insert(b);
        tree_adj[b].insert(a);
    }
    std::set<int> alive;
    for (int b = 0; b < k; ++b) alive.insert(b);

    constexpr int kRoot = 0;
    ContractionOrdering out;
    while (!alive.empty()) {
        if (alive.size() == 1) {
            int b = *alive.begin();
            out.insert(out.end(), bags[b].begin(), bags[b].end());
            alive.erase(b);
            break;
        }
        int leaf = -1;
        for (int b : alive)
            if (b != kRoot && tree_adj[b].size() == 1) {
                leaf = b;
                break;
            }
        int par = *tree_adj[leaf].begin();
        std::vector<EdgeId> private_edges;
        for (EdgeId e : bags[leaf])
            if (!bags[par].count(e)) private_edges.push_back(e);
        if (private_edges.empty()) {
            tree_adj[par].erase(leaf);
            tree_adj[leaf].clear();
            alive.erase(leaf);
        } else {
            EdgeId e = *std::min_element(private_edges.begin(), private_edges.end());
            out.push_back(e);
            bags[leaf].erase(e);
        }
    }
    if (out.size() != g.edge_count()) throw input_error("decomposition did not yield a complete ordering");
    return out;
}

// End-to-end planning: order the line graph, turn the ordering into a
// decomposition, peel it into a contraction ordering. The predicted cost is
// recomputed from the ordering rather than trusted from the width.
inline ContractionPlan plan_contraction(const MultiGraph& g, OrderingStrategy strategy, std::uint64_t seed = 0,
                                        int exact_budget = kDefaultExactBudget) {
    const SimpleGraph lg = line_graph(g);
    EliminationOrdering pi;
    if (strategy == OrderingStrategy::exact) {
        pi = exact_treewidth(lg, exact_budget).ordering;
    } else {
        pi = heuristic_order(lg, strategy, seed);
    }
    TreeDecomposition td = ordering_to_decomposition(lg, pi);
    ContractionPlan plan;
    plan.ordering = decomposition_to_contraction_ordering(td, g);
    plan.predicted_cc = cc_of_ordering(g, plan.ordering);
    plan.source = to_string(strategy) + "/seed=" + std::to_string(seed);
    return plan;
}

// cc(G) = tw(G*), exactly.
inline int exact_cc(const MultiGraph& g, int budget = kDefaultExactBudget) {
    if (static_cast<int>(g.edge_count()) > budget)
        throw budget_error("graph with " + std::to_string(g.edge_count()) +
                           " edges exceeds the exact contraction-complexity budget of " + std::to_string(budget));
    return exact_treewidth(line_graph(g), budget).treewidth;
}

// Plan file: "p plan <edge count> <predicted cc>" then one edge id per line.
inline void write_plan(const ContractionPlan& plan, std::ostream& out) {
    out << "p plan " << plan.ordering.size() << ' ' << plan.predicted_cc << '\n';
    if (!plan.source.empty()) out << "c " << plan.source << '\n';
    for (EdgeId id : plan.ordering) out << id << '\n';
}

inline ContractionPlan read_plan(std::istream& in) {
    ContractionPlan plan;
    std::string line;
    int declared = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        if (tag == "p") {
            std::string kind;
            if (!(ls >> kind >> declared >> plan.predicted_cc) || kind != "plan")
                throw input_error("line " + std::to_string(line_no) + ": malformed plan header");
        } else {
            plan.ordering.push_back(std::stoi(tag));
        }
    }
    if (declared < 0) throw input_error("missing 'p plan' header");
    if (static_cast<int>(plan.ordering.size()) != declared)
        throw input_error("plan edge count mismatch");
    return plan;
}

}  // namespace twsim
