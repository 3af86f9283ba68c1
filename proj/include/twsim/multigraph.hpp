#pragma once

// Undirected multigraphs with parallel edges and loops. Circuit graphs, line
// graphs and the contraction process all live on these. Graphs are immutable
// values once built: every operation returns a new graph.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "twsim/errors.hpp"

namespace twsim {

using Vertex = int;
using EdgeId = int;

class MultiGraph;
struct ContractionResult;

struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    bool is_loop() const { return u == v; }
    bool incident_to(Vertex w) const { return u == w || v == w; }
    Vertex other(Vertex w) const { return w == u ? v : u; }
    bool same_endpoints(const Edge& e) const {
        return (u == e.u && v == e.v) || (u == e.v && v == e.u);
    }
};

class MultiGraph {
public:
    MultiGraph() = default;

    Vertex add_vertex() {
        Vertex v = next_vertex_++;
        vertices_.insert(v);
        return v;
    }

    void add_vertex(Vertex v) {
        vertices_.insert(v);
        next_vertex_ = std::max(next_vertex_, v + 1);
    }

    EdgeId add_edge(Vertex u, Vertex v) {
        EdgeId id = next_edge_++;
        add_edge(id, u, v);
        return id;
    }

    void add_edge(EdgeId id, Vertex u, Vertex v) {
        if (edges_.count(id)) throw input_error("duplicate edge id " + std::to_string(id));
        add_vertex(u);
        add_vertex(v);
        edges_[id] = Edge{u, v};
        next_edge_ = std::max(next_edge_, id + 1);
    }

    bool has_vertex(Vertex v) const { return vertices_.count(v) != 0; }
    bool has_edge(EdgeId id) const { return edges_.count(id) != 0; }

    const Edge& edge(EdgeId id) const {
        auto it = edges_.find(id);
        if (it == edges_.end()) throw input_error("unknown edge id " + std::to_string(id));
        return it->second;
    }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::size_t loop_count() const {
        std::size_t n = 0;
        for (const auto& [id, e] : edges_) n += e.is_loop() ? 1 : 0;
        return n;
    }

    std::vector<Vertex> vertices() const { return {vertices_.begin(), vertices_.end()}; }

    std::vector<EdgeId> edge_ids() const {
        std::vector<EdgeId> ids;
        ids.reserve(edges_.size());
        for (const auto& [id, e] : edges_) ids.push_back(id);
        return ids;
    }

    const std::map<EdgeId, Edge>& edges() const { return edges_; }

    std::vector<EdgeId> incident_edges(Vertex v) const {
        std::vector<EdgeId> out;
        for (const auto& [id, e] : edges_)
            if (e.incident_to(v)) out.push_back(id);
        return out;
    }

    // A loop counts as 1 edge toward the degree.
    int degree(Vertex v) const {
        int d = 0;
        for (const auto& [id, e] : edges_)
            if (e.incident_to(v)) ++d;
        return d;
    }

    int max_degree() const {
        int d = 0;
        for (Vertex v : vertices_) d = std::max(d, degree(v));
        return d;
    }

    // Distinct neighbors, excluding v itself (loops do not self-neighbor).
    std::vector<Vertex> neighbors(Vertex v) const {
        std::set<Vertex> ns;
        for (const auto& [id, e] : edges_)
            if (e.incident_to(v) && !e.is_loop()) ns.insert(e.other(v));
        return {ns.begin(), ns.end()};
    }

    bool adjacent(Vertex u, Vertex v) const {
        if (u == v) return false;
        for (const auto& [id, e] : edges_)
            if (!e.is_loop() && e.incident_to(u) && e.incident_to(v)) return true;
        return false;
    }

    int count_edges_between(Vertex u, Vertex v) const {
        int n = 0;
        for (const auto& [id, e] : edges_)
            if (e.same_endpoints(Edge{u, v})) ++n;
        return n;
    }

    void remove_edge(EdgeId id) {
        if (!edges_.erase(id)) throw input_error("unknown edge id " + std::to_string(id));
    }

    void remove_vertex(Vertex v) {
        for (EdgeId id : incident_edges(v)) edges_.erase(id);
        vertices_.erase(v);
    }

    // Removes e and merges its endpoints. Edges between the endpoints become
    // loops, parallel edges are preserved. The merged vertex keeps the smaller
    // endpoint id so repeated contractions are reproducible.
    ContractionResult contract_edge(EdgeId id) const;

private:
    std::set<Vertex> vertices_;
    std::map<EdgeId, Edge> edges_;
    Vertex next_vertex_ = 0;
    EdgeId next_edge_ = 0;
};

struct ContractionResult {
    MultiGraph graph;
    Vertex merged = 0;
    int merged_degree = 0;
};

inline ContractionResult MultiGraph::contract_edge(EdgeId id) const {
    const Edge e = edge(id);
    MultiGraph g = *this;
    g.edges_.erase(id);
    Vertex keep = std::min(e.u, e.v);
    Vertex drop = std::max(e.u, e.v);
    if (keep != drop) {
        for (auto& [eid, ed] : g.edges_) {
            if (ed.u == drop) ed.u = keep;
            if (ed.v == drop) ed.v = keep;
        }
        g.vertices_.erase(drop);
    }
    return {g, keep, g.degree(keep)};
}

// Simple undirected graph: no parallels, no loops.
class SimpleGraph {
public:
    SimpleGraph() = default;

    void add_vertex(Vertex v) { vertices_.insert(v); }

    void add_edge(Vertex u, Vertex v) {
        if (u == v) throw input_error("loop not allowed in a simple graph");
        vertices_.insert(u);
        vertices_.insert(v);
        edges_.insert(normalized(u, v));
    }

    bool has_vertex(Vertex v) const { return vertices_.count(v) != 0; }
    bool adjacent(Vertex u, Vertex v) const { return u != v && edges_.count(normalized(u, v)) != 0; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::vector<Vertex> vertices() const { return {vertices_.begin(), vertices_.end()}; }
    const std::set<std::pair<Vertex, Vertex>>& edges() const { return edges_; }

    std::vector<Vertex> neighbors(Vertex v) const {
        std::vector<Vertex> ns;
        for (const auto& [a, b] : edges_) {
            if (a == v) ns.push_back(b);
            if (b == v) ns.push_back(a);
        }
        std::sort(ns.begin(), ns.end());
        return ns;
    }

    int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

    int max_degree() const {
        int d = 0;
        for (Vertex v : vertices_) d = std::max(d, degree(v));
        return d;
    }

    MultiGraph to_multigraph() const {
        MultiGraph g;
        for (Vertex v : vertices_) g.add_vertex(v);
        for (const auto& [u, v] : edges_) g.add_edge(u, v);
        return g;
    }

private:
    static std::pair<Vertex, Vertex> normalized(Vertex u, Vertex v) {
        return {std::min(u, v), std::max(u, v)};
    }

    std::set<Vertex> vertices_;
    std::set<std::pair<Vertex, Vertex>> edges_;
};

// Drops loops and collapses parallel edges.
inline SimpleGraph underlying_simple_graph(const MultiGraph& g) {
    SimpleGraph s;
    for (Vertex v : g.vertices()) s.add_vertex(v);
    for (const auto& [id, e] : g.edges())
        if (!e.is_loop()) s.add_edge(e.u, e.v);
    return s;
}

// Requires the multigraph to already be simple.
inline SimpleGraph as_simple_graph(const MultiGraph& g) {
    SimpleGraph s;
    for (Vertex v : g.vertices()) s.add_vertex(v);
    for (const auto& [id, e] : g.edges()) {
        if (e.is_loop()) throw input_error("graph has a loop; a simple graph is required");
        if (s.adjacent(e.u, e.v)) throw input_error("graph has parallel edges; a simple graph is required");
        s.add_edge(e.u, e.v);
    }
    return s;
}

// Line graph G*: one vertex per edge of G, adjacent iff the edges share an
// endpoint of G.
inline SimpleGraph line_graph(const MultiGraph& g) {
    SimpleGraph s;
    for (EdgeId id : g.edge_ids()) s.add_vertex(id);
    const auto ids = g.edge_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const Edge& a = g.edge(ids[i]);
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            const Edge& b = g.edge(ids[j]);
            if (b.incident_to(a.u) || b.incident_to(a.v)) s.add_edge(ids[i], ids[j]);
        }
    }
    return s;
}

struct SimplifyStep {
    enum class Kind { removed_leaf, smoothed } kind;
    Vertex vertex;          // the removed vertex
    Vertex neighbor_a = -1; // smoothing: the two reconnected neighbors
    Vertex neighbor_b = -1;
};

struct SimplifyResult {
    MultiGraph graph;
    std::vector<SimplifyStep> log;
};

// Repeatedly deletes degree-1 vertices and smooths degree-2 vertices (remove
// the vertex, connect its neighbors). Smoothing is skipped when it would
// create a parallel edge or a loop, and leaf deletion stops once a single
// edge remains, so the treewidth of any graph with at least 2 edges is
// preserved.
inline SimplifyResult simplify(const MultiGraph& input) {
    MultiGraph g = input;
    std::vector<SimplifyStep> log;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Vertex v : g.vertices()) {
            auto inc = g.incident_edges(v);
            bool has_loop = false;
            for (EdgeId id : inc) has_loop |= g.edge(id).is_loop();
            if (has_loop) continue;
            if (inc.size() == 1 && g.edge_count() >= 2) {
                g.remove_vertex(v);
                log.push_back({SimplifyStep::Kind::removed_leaf, v});
                changed = true;
                break;
            }
            if (inc.size() == 2) {
                Vertex a = g.edge(inc[0]).other(v);
                Vertex b = g.edge(inc[1]).other(v);
                if (a == b || a == v || b == v) continue;       // would create a loop
                if (g.count_edges_between(a, b) > 0) continue;  // would create a parallel edge
                g.remove_vertex(v);
                g.add_edge(a, b);
                log.push_back({SimplifyStep::Kind::smoothed, v, a, b});
                changed = true;
                break;
            }
        }
    }
    return {g, log};
}

namespace detail {

inline bool is_odd_prime(int p) {
    if (p < 3 || p % 2 == 0) return false;
    for (int d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

inline int mod_inverse(int x, int p) {
    // p is prime, 1 <= x < p
    int result = 1;
    int base = x % p;
    int exp = p - 2;
    while (exp > 0) {
        if (exp & 1) result = static_cast<int>((static_cast<long long>(result) * base) % p);
        base = static_cast<int>((static_cast<long long>(base) * base) % p);
        exp >>= 1;
    }
    return result;
}

}  // namespace detail

struct LpsExpanderResult {
    MultiGraph graph;        // G_p on Z_p plus the infinity vertex
    MultiGraph reduced;      // G'_p: infinity and the edge {0, p-1} removed
    Vertex infinity_vertex;  // id used for the infinity vertex (= p)
};

// 3-regular expander on Z_p + {infinity}: x is connected to x+1, x-1 and
// x^{-1}. The projective-line convention 0^{-1} = infinity and
// infinity^{-1} = 0 is used; self-inverse elements get loops, and
// infinity +- 1 gives two loops at infinity.
inline LpsExpanderResult lps_expander(int p) {
    if (!detail::is_odd_prime(p)) throw input_error("lps_expander requires an odd prime, got " + std::to_string(p));
    const Vertex inf = p;
    MultiGraph g;
    for (Vertex v = 0; v <= p; ++v) g.add_vertex(v);
    for (int x = 0; x < p; ++x) g.add_edge(x, (x + 1) % p);  // successor cycle
    g.add_edge(inf, inf);
    g.add_edge(inf, inf);
    g.add_edge(0, inf);  // 0^{-1} = infinity
    for (int x = 1; x < p; ++x) {
        int y = detail::mod_inverse(x, p);
        if (x < y) g.add_edge(x, y);
        if (x == y) g.add_edge(x, x);
    }

    MultiGraph reduced = g;
    reduced.remove_vertex(inf);
    for (EdgeId id : reduced.edge_ids()) {
        if (reduced.edge(id).same_endpoints(Edge{0, p - 1})) {
            reduced.remove_edge(id);
            break;
        }
    }
    return {g, reduced, inf};
}

inline MultiGraph strip_loops(const MultiGraph& g) {
    MultiGraph out;
    for (Vertex v : g.vertices()) out.add_vertex(v);
    for (const auto& [id, e] : g.edges())
        if (!e.is_loop()) out.add_edge(id, e.u, e.v);
    return out;
}

// PACE-style edge-list format: "p tw <n> <m>" header, then one "e <u> <v>"
// line per edge (1-indexed). Loops are "e u u", parallel edges repeat lines.
inline MultiGraph read_pace(std::istream& in) {
    MultiGraph g;
    std::string line;
    int declared_n = -1, declared_m = -1;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        if (tag == "p") {
            std::string kind;
            if (!(ls >> kind >> declared_n >> declared_m) || kind != "tw")
                throw input_error("line " + std::to_string(line_no) + ": malformed problem line");
            for (Vertex v = 1; v <= declared_n; ++v) g.add_vertex(v);
            have_header = true;
        } else if (tag == "e") {
            Vertex u, v;
            if (!(ls >> u >> v))
                throw input_error("line " + std::to_string(line_no) + ": malformed edge line");
            if (!have_header) throw input_error("edge line before problem line");
            if (u < 1 || v < 1 || u > declared_n || v > declared_n)
                throw input_error("line " + std::to_string(line_no) + ": vertex out of range");
            g.add_edge(u, v);
        } else {
            throw input_error("line " + std::to_string(line_no) + ": unknown tag '" + tag + "'");
        }
    }
    if (!have_header) throw input_error("missing 'p tw' header");
    if (declared_m >= 0 && static_cast<int>(g.edge_count()) != declared_m)
        throw input_error("edge count mismatch: header says " + std::to_string(declared_m) + ", found " +
                          std::to_string(g.edge_count()));
    return g;
}

inline MultiGraph read_pace(const std::string& text) {
    std::istringstream in(text);
    return read_pace(in);
}

// Vertices are renumbered 1..n in ascending id order on output.
inline void write_pace(const MultiGraph& g, std::ostream& out) {
    std::map<Vertex, int> index;
    int next = 1;
    for (Vertex v : g.vertices()) index[v] = next++;
    out << "p tw " << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (EdgeId id : g.edge_ids()) {
        const Edge& e = g.edge(id);
        out << "e " << index.at(e.u) << ' ' << index.at(e.v) << '\n';
    }
}

}  // namespace twsim
