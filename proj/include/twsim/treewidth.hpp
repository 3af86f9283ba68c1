#pragma once

// Tree decompositions and elimination orderings: validation, the standard
// ordering <-> decomposition conversions, min-degree / min-fill heuristics and
// an exact solver for small graphs (memoized search over elimination states).

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twsim/errors.hpp"
#include "twsim/multigraph.hpp"

namespace twsim {

struct TreeDecomposition {
    std::vector<std::vector<Vertex>> bags;       // each sorted, unique entries
    std::vector<std::pair<int, int>> tree_edges; // indices into bags

    int width() const {
        int w = -1;
        for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
        return w;
    }
};

struct DecompositionViolation {
    enum class Kind { tree, vertex_coverage, edge_coverage, connectivity } kind;
    std::string detail;
};

using EliminationOrdering = std::vector<Vertex>;

namespace detail {

// Label-indexed simple adjacency; loops and parallel edges are dropped.
struct IndexedGraph {
    std::vector<Vertex> label;       // index -> original vertex id
    std::map<Vertex, int> index;     // original vertex id -> index
    std::vector<std::set<int>> adj;

    int size() const { return static_cast<int>(label.size()); }
};

inline IndexedGraph make_indexed(const std::vector<Vertex>& vertices,
                                 const std::vector<std::pair<Vertex, Vertex>>& edges) {
    IndexedGraph g;
    g.label = vertices;
    std::sort(g.label.begin(), g.label.end());
    for (int i = 0; i < static_cast<int>(g.label.size()); ++i) g.index[g.label[i]] = i;
    g.adj.resize(g.label.size());
    for (const auto& [u, v] : edges) {
        if (u == v) continue;
        int a = g.index.at(u), b = g.index.at(v);
        g.adj[a].insert(b);
        g.adj[b].insert(a);
    }
    return g;
}

inline IndexedGraph make_indexed(const MultiGraph& g) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& [id, e] : g.edges()) edges.emplace_back(e.u, e.v);
    return make_indexed(g.vertices(), edges);
}

inline IndexedGraph make_indexed(const SimpleGraph& g) {
    std::vector<std::pair<Vertex, Vertex>> edges(g.edges().begin(), g.edges().end());
    return make_indexed(g.vertices(), edges);
}

inline void check_permutation(const IndexedGraph& g, const EliminationOrdering& pi) {
    if (pi.size() != g.label.size())
        throw input_error("elimination ordering has " + std::to_string(pi.size()) + " vertices, graph has " +
                          std::to_string(g.label.size()));
    std::set<Vertex> seen(pi.begin(), pi.end());
    if (seen.size() != pi.size()) throw input_error("elimination ordering repeats a vertex");
    for (Vertex v : pi)
        if (!g.index.count(v)) throw input_error("elimination ordering names unknown vertex " + std::to_string(v));
}

}  // namespace detail

struct EliminationResult {
    int width = -1;
    std::vector<std::pair<Vertex, Vertex>> fill_edges;
};

// Width of pi: eliminate vertices in order, connecting all current neighbors
// of the eliminated vertex; the width is the largest neighbor count seen.
template <typename Graph>
EliminationResult elimination_width(const Graph& graph, const EliminationOrdering& pi) {
    auto g = detail::make_indexed(graph);
    detail::check_permutation(g, pi);
    EliminationResult res;
    for (Vertex label : pi) {
        int v = g.index.at(label);
        std::vector<int> nb(g.adj[v].begin(), g.adj[v].end());
        res.width = std::max(res.width, static_cast<int>(nb.size()));
        for (std::size_t i = 0; i < nb.size(); ++i) {
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                if (!g.adj[nb[i]].count(nb[j])) {
                    g.adj[nb[i]].insert(nb[j]);
                    g.adj[nb[j]].insert(nb[i]);
                    res.fill_edges.emplace_back(g.label[nb[i]], g.label[nb[j]]);
                }
            }
        }
        for (int u : nb) g.adj[u].erase(v);
        g.adj[v].clear();
    }
    return res;
}

// Standard clique-tree construction: bag of v is {v} plus its neighbors at
// elimination time; each bag hangs off the bag of its earliest-eliminated
// later neighbor. The width equals elimination_width(graph, pi).
template <typename Graph>
TreeDecomposition ordering_to_decomposition(const Graph& graph, const EliminationOrdering& pi) {
    auto g = detail::make_indexed(graph);
    detail::check_permutation(g, pi);
    std::map<Vertex, int> position;
    for (std::size_t i = 0; i < pi.size(); ++i) position[pi[i]] = static_cast<int>(i);

    TreeDecomposition td;
    std::vector<std::vector<int>> bag_neighbors(pi.size());
    for (std::size_t step = 0; step < pi.size(); ++step) {
        int v = g.index.at(pi[step]);
        std::vector<int> nb(g.adj[v].begin(), g.adj[v].end());
        std::vector<Vertex> bag{pi[step]};
        for (int u : nb) bag.push_back(g.label[u]);
        std::sort(bag.begin(), bag.end());
        td.bags.push_back(bag);
        bag_neighbors[step] = nb;
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                g.adj[nb[i]].insert(nb[j]);
                g.adj[nb[j]].insert(nb[i]);
            }
        for (int u : nb) g.adj[u].erase(v);
        g.adj[v].clear();
    }
    for (std::size_t step = 0; step < pi.size(); ++step) {
        int parent = -1;
        for (int u : bag_neighbors[step]) {
            int pos = position.at(g.label[u]);
            if (parent == -1 || pos < parent) parent = pos;
        }
        if (parent == -1 && step + 1 < pi.size()) parent = static_cast<int>(step) + 1;
        if (parent != -1) td.tree_edges.emplace_back(static_cast<int>(step), parent);
    }
    return td;
}

inline std::vector<std::pair<Vertex, Vertex>> decomposition_edges(const MultiGraph& g) {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (const auto& [id, e] : g.edges()) out.emplace_back(e.u, e.v);
    return out;
}

inline std::vector<std::pair<Vertex, Vertex>> decomposition_edges(const SimpleGraph& g) {
    return {g.edges().begin(), g.edges().end()};
}

template <typename Graph>
std::vector<DecompositionViolation> validate_decomposition(const TreeDecomposition& td, const Graph& graph) {
    std::vector<DecompositionViolation> out;
    const int k = static_cast<int>(td.bags.size());

    std::set<Vertex> graph_vertices;
    for (Vertex v : graph.vertices()) graph_vertices.insert(v);
    for (int b = 0; b < k; ++b)
        for (Vertex v : td.bags[b])
            if (!graph_vertices.count(v))
                out.push_back({DecompositionViolation::Kind::tree,
                               "bag " + std::to_string(b) + " references unknown vertex " + std::to_string(v)});

    // tree structure
    std::vector<std::vector<int>> tree_adj(k);
    bool structure_ok = true;
    for (const auto& [a, b] : td.tree_edges) {
        if (a < 0 || b < 0 || a >= k || b >= k || a == b) {
            out.push_back({DecompositionViolation::Kind::tree, "tree edge references invalid bag"});
            structure_ok = false;
            continue;
        }
        tree_adj[a].push_back(b);
        tree_adj[b].push_back(a);
    }
    if (structure_ok && k > 0) {
        if (static_cast<int>(td.tree_edges.size()) != k - 1) {
            out.push_back({DecompositionViolation::Kind::tree, "bag graph is not a tree"});
            structure_ok = false;
        } else {
            std::vector<bool> seen(k, false);
            std::vector<int> stack{0};
            seen[0] = true;
            int count = 1;
            while (!stack.empty()) {
                int b = stack.back();
                stack.pop_back();
                for (int nb : tree_adj[b])
                    if (!seen[nb]) {
                        seen[nb] = true;
                        ++count;
                        stack.push_back(nb);
                    }
            }
            if (count != k) {
                out.push_back({DecompositionViolation::Kind::tree, "bag graph is disconnected"});
                structure_ok = false;
            }
        }
    }

    // (T1) every vertex appears in a bag
    std::map<Vertex, std::vector<int>> occurrences;
    for (int b = 0; b < k; ++b)
        for (Vertex v : td.bags[b]) occurrences[v].push_back(b);
    for (Vertex v : graph_vertices)
        if (!occurrences.count(v))
            out.push_back({DecompositionViolation::Kind::vertex_coverage,
                           "vertex " + std::to_string(v) + " appears in no bag"});

    // (T2) every edge is inside some bag (loops reduce to T1)
    auto covered = [&](Vertex u, Vertex v) {
        for (int b = 0; b < k; ++b) {
            const auto& bag = td.bags[b];
            if (std::binary_search(bag.begin(), bag.end(), u) && std::binary_search(bag.begin(), bag.end(), v))
                return true;
        }
        return false;
    };
    for (const auto& [u, v] : decomposition_edges(graph))
        if (u != v && !covered(u, v))
            out.push_back({DecompositionViolation::Kind::edge_coverage,
                           "edge {" + std::to_string(u) + "," + std::to_string(v) + "} is in no bag"});

    // (T3) occurrences of each vertex form a connected subtree
    if (structure_ok) {
        for (const auto& [v, occ] : occurrences) {
            if (occ.size() <= 1) continue;
            std::set<int> member(occ.begin(), occ.end());
            std::set<int> seen{occ.front()};
            std::vector<int> stack{occ.front()};
            while (!stack.empty()) {
                int b = stack.back();
                stack.pop_back();
                for (int nb : tree_adj[b])
                    if (member.count(nb) && !seen.count(nb)) {
                        seen.insert(nb);
                        stack.push_back(nb);
                    }
            }
            if (seen.size() != member.size())
                out.push_back({DecompositionViolation::Kind::connectivity,
                               "bags containing vertex " + std::to_string(v) + " are disconnected"});
        }
    }
    return out;
}

enum class OrderingStrategy { min_fill, min_degree, exact };

inline std::string to_string(OrderingStrategy s) {
    switch (s) {
        case OrderingStrategy::min_fill: return "minfill";
        case OrderingStrategy::min_degree: return "mindeg";
        case OrderingStrategy::exact: return "exact";
    }
    return "?";
}

// Greedy elimination ordering. Ties break on (fill count, degree, vertex id);
// a nonzero seed replaces the id tie-break with a seeded shuffle.
template <typename Graph>
EliminationOrdering heuristic_order(const Graph& graph, OrderingStrategy strategy, std::uint64_t seed = 0) {
    auto g = detail::make_indexed(graph);
    const int n = g.size();
    std::vector<int> priority(n);
    for (int i = 0; i < n; ++i) priority[i] = i;
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::shuffle(priority.begin(), priority.end(), rng);
    }

    auto fill_count = [&](int v) {
        int fill = 0;
        std::vector<int> nb(g.adj[v].begin(), g.adj[v].end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j)
                if (!g.adj[nb[i]].count(nb[j])) ++fill;
        return fill;
    };

    EliminationOrdering pi;
    std::vector<bool> alive(n, true);
    for (int step = 0; step < n; ++step) {
        int best = -1;
        std::array<long, 3> best_key{};
        for (int v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            long deg = static_cast<long>(g.adj[v].size());
            long fill = fill_count(v);
            std::array<long, 3> key = strategy == OrderingStrategy::min_degree
                                          ? std::array<long, 3>{deg, fill, priority[v]}
                                          : std::array<long, 3>{fill, deg, priority[v]};
            if (best == -1 || key < best_key) {
                best = v;
                best_key = key;
            }
        }
        pi.push_back(g.label[best]);
        std::vector<int> nb(g.adj[best].begin(), g.adj[best].end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                g.adj[nb[i]].insert(nb[j]);
                g.adj[nb[j]].insert(nb[i]);
            }
        for (int u : nb) g.adj[u].erase(best);
        g.adj[best].clear();
        alive[best] = false;
    }
    return pi;
}

inline constexpr int kDefaultExactBudget = 14;

struct ExactTreewidthResult {
    int treewidth = -1;
    EliminationOrdering ordering;
};

// Exact treewidth as the minimum induced width over all elimination
// orderings, computed by a memoized search over eliminated-vertex subsets.
// Q(S, v) counts the neighbors v would have once S is gone: vertices outside
// S reachable from v through S.
template <typename Graph>
ExactTreewidthResult exact_treewidth(const Graph& graph, int budget = kDefaultExactBudget) {
    auto g = detail::make_indexed(graph);
    const int n = g.size();
    if (n == 0) return {-1, {}};
    if (n > budget)
        throw budget_error("graph with " + std::to_string(n) + " vertices exceeds the exact solver budget of " +
                           std::to_string(budget));
    if (n > 26) throw budget_error("exact solver is capped at 26 vertices");

    std::vector<std::uint32_t> adj(n, 0);
    for (int v = 0; v < n; ++v)
        for (int u : g.adj[v]) adj[v] |= (1u << u);
    const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);

    auto q_count = [&](std::uint32_t s, int v) {
        std::uint32_t through = adj[v] & s;
        std::uint32_t frontier = through;
        while (frontier) {
            std::uint32_t next = 0;
            std::uint32_t f = frontier;
            while (f) {
                int u = std::countr_zero(f);
                f &= f - 1;
                next |= adj[u] & s;
            }
            next &= ~through;
            through |= next;
            frontier = next;
        }
        std::uint32_t reached = adj[v];
        std::uint32_t t = through;
        while (t) {
            int u = std::countr_zero(t);
            t &= t - 1;
            reached |= adj[u];
        }
        reached &= ~s;
        reached &= ~(1u << v);
        return std::popcount(reached);
    };

    std::unordered_map<std::uint32_t, std::int8_t> memo;
    memo.reserve(1u << std::min(n, 20));
    auto solve = [&](auto&& self, std::uint32_t s) -> int {
        if (s == full) return -1;
        auto it = memo.find(s);
        if (it != memo.end()) return it->second;
        int best = std::numeric_limits<int>::max();
        for (int v = 0; v < n; ++v) {
            if (s & (1u << v)) continue;
            int q = q_count(s, v);
            if (q >= best) continue;  // cannot improve
            int rest = self(self, s | (1u << v));
            best = std::min(best, std::max(q, rest));
        }
        memo[s] = static_cast<std::int8_t>(best);
        return best;
    };
    const int tw = solve(solve, 0);

    // reconstruct an optimal ordering by walking states that stay within tw
    ExactTreewidthResult res;
    res.treewidth = tw;
    std::uint32_t s = 0;
    while (s != full) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (s & (1u << v)) continue;
            int q = q_count(s, v);
            if (q > tw) continue;
            if (std::max(q, solve(solve, s | (1u << v))) <= tw) {
                pick = v;
                break;
            }
        }
        res.ordering.push_back(g.label[pick]);
        s |= (1u << pick);
    }
    return res;
}

// Maximum-minimum-degree lower bound on treewidth.
template <typename Graph>
int treewidth_lower_bound_mmd(const Graph& graph) {
    auto g = detail::make_indexed(graph);
    std::set<int> alive;
    for (int v = 0; v < g.size(); ++v) alive.insert(v);
    int lb = g.size() > 0 ? 0 : -1;
    while (!alive.empty()) {
        int best = -1, best_deg = std::numeric_limits<int>::max();
        for (int v : alive) {
            int d = 0;
            for (int u : g.adj[v]) d += alive.count(u) ? 1 : 0;
            if (d < best_deg) {
                best_deg = d;
                best = v;
            }
        }
        lb = std::max(lb, best_deg);
        alive.erase(best);
    }
    return lb;
}

// Lifts a tree decomposition of G to one of line_graph(G): each vertex in a
// bag is replaced by all edges of G incident to it. The width grows to at
// most (width+1) * max_degree - 1.
inline TreeDecomposition decomposition_for_line_graph(const TreeDecomposition& td, const MultiGraph& g) {
    TreeDecomposition out;
    out.tree_edges = td.tree_edges;
    for (const auto& bag : td.bags) {
        std::set<EdgeId> lifted;
        for (Vertex v : bag)
            for (EdgeId id : g.incident_edges(v)) lifted.insert(id);
        out.bags.emplace_back(lifted.begin(), lifted.end());
    }
    return out;
}

// PACE-style .td format: "s td <#bags> <width+1> <n>" header, "b <id> <v...>"
// bag lines (bags 1-indexed), then tree edges as bag-id pairs.
inline void write_td(const TreeDecomposition& td, std::size_t n_graph_vertices, std::ostream& out) {
    out << "s td " << td.bags.size() << ' ' << td.width() + 1 << ' ' << n_graph_vertices << '\n';
    for (std::size_t b = 0; b < td.bags.size(); ++b) {
        out << "b " << b + 1;
        for (Vertex v : td.bags[b]) out << ' ' << v;
        out << '\n';
    }
    for (const auto& [a, b] : td.tree_edges) out << a + 1 << ' ' << b + 1 << '\n';
}

inline TreeDecomposition read_td(std::istream& in) {
    TreeDecomposition td;
    std::string line;
    int declared_bags = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        if (tag == "s") {
            std::string kind;
            int width_plus_one, n;
            if (!(ls >> kind >> declared_bags >> width_plus_one >> n) || kind != "td")
                throw input_error("line " + std::to_string(line_no) + ": malformed solution line");
            td.bags.assign(declared_bags, {});
        } else if (tag == "b") {
            int id;
            if (!(ls >> id) || id < 1 || id > declared_bags)
                throw input_error("line " + std::to_string(line_no) + ": bad bag id");
            Vertex v;
            std::vector<Vertex> bag;
            while (ls >> v) bag.push_back(v);
            std::sort(bag.begin(), bag.end());
            bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
            td.bags[id - 1] = bag;
        } else {
            int a = std::stoi(tag), b;
            if (!(ls >> b)) throw input_error("line " + std::to_string(line_no) + ": malformed tree edge");
            td.tree_edges.emplace_back(a - 1, b - 1);
        }
    }
    if (declared_bags < 0) throw input_error("missing 's td' header");
    return td;
}

}  // namespace twsim
