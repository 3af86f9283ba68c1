#pragma once

// Dimension-4 tensors over the operator basis Pi = {|b1><b2|}, the encodings
// of states, gates and measurement elements, and the contraction engine.
// Entries are stored row-major over the wire list; the Pi index order
// |0><0|, |0><1|, |1><0|, |1><1| is a file-format contract.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twsim/errors.hpp"
#include "twsim/matrix.hpp"

namespace twsim {

using WireId = int;

inline constexpr int kDefaultRankBudget = 14;  // at most 4^14 entries per tensor

// Pi element for index 2*b1 + b2.
inline Matrix pi_element(int idx) {
    Matrix m(2, 2);
    m(idx >> 1, idx & 1) = 1.0;
    return m;
}

class Tensor {
public:
    Tensor() : entries_{Complex{0.0}} {}

    Tensor(std::vector<WireId> wires, std::vector<Complex> entries)
        : wires_(std::move(wires)), entries_(std::move(entries)) {
        std::size_t expect = std::size_t{1} << (2 * wires_.size());
        if (entries_.size() != expect)
            throw input_error("tensor of rank " + std::to_string(wires_.size()) + " needs " + std::to_string(expect) +
                              " entries, got " + std::to_string(entries_.size()));
    }

    static Tensor scalar(Complex value) { return Tensor({}, {value}); }

    int rank() const { return static_cast<int>(wires_.size()); }
    const std::vector<WireId>& wires() const { return wires_; }
    const std::vector<Complex>& entries() const { return entries_; }
    std::vector<Complex>& entries() { return entries_; }

    Complex value() const {
        if (rank() != 0) throw input_error("value() requires a rank-0 tensor");
        return entries_[0];
    }

    bool has_wire(WireId w) const { return std::find(wires_.begin(), wires_.end(), w) != wires_.end(); }

    int wire_occurrences(WireId w) const {
        return static_cast<int>(std::count(wires_.begin(), wires_.end(), w));
    }

    // stride of digit position k (first wire is the most significant digit)
    std::size_t stride(int k) const { return std::size_t{1} << (2 * (rank() - 1 - k)); }

    Complex at(const std::vector<int>& digits) const {
        std::size_t idx = 0;
        for (int k = 0; k < rank(); ++k) idx += static_cast<std::size_t>(digits[k]) * stride(k);
        return entries_[idx];
    }

    // Reorders the axes to the given wire order (wires must be distinct).
    Tensor permuted(const std::vector<WireId>& order) const {
        if (order.size() != wires_.size()) throw input_error("permutation must list every wire");
        std::vector<int> src_pos(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto it = std::find(wires_.begin(), wires_.end(), order[k]);
            if (it == wires_.end()) throw input_error("permutation names a missing wire");
            src_pos[k] = static_cast<int>(it - wires_.begin());
        }
        Tensor out(std::vector<WireId>(order), std::vector<Complex>(entries_.size()));
        std::vector<int> digits(order.size(), 0);
        for (std::size_t idx = 0; idx < out.entries_.size(); ++idx) {
            std::size_t rem = idx;
            std::size_t src = 0;
            for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k) {
                int digit = static_cast<int>(rem & 3);
                rem >>= 2;
                src += static_cast<std::size_t>(digit) * stride(src_pos[k]);
            }
            out.entries_[idx] = entries_[src];
        }
        return out;
    }

    double max_abs_diff(const Tensor& other) const {
        Tensor aligned = other.permuted(wires_);
        double d = 0.0;
        for (std::size_t i = 0; i < entries_.size(); ++i) d = std::max(d, std::abs(entries_[i] - aligned.entries_[i]));
        return d;
    }

private:
    std::vector<WireId> wires_;
    std::vector<Complex> entries_;
};

namespace detail {

inline void check_rank_budget(int rank, int budget, const std::string& what) {
    if (rank > budget)
        throw budget_error(what + " would create a rank-" + std::to_string(rank) +
                           " tensor, over the rank budget of " + std::to_string(budget));
}

// base_table[i] = entry offset contributed by composite index i spread over
// the given digit positions (first position most significant).
inline std::vector<std::size_t> base_table(const Tensor& t, const std::vector<int>& positions) {
    std::size_t count = std::size_t{1} << (2 * positions.size());
    std::vector<std::size_t> base(count, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t rem = idx;
        for (int k = static_cast<int>(positions.size()) - 1; k >= 0; --k) {
            base[idx] += static_cast<std::size_t>(rem & 3) * t.stride(positions[k]);
            rem >>= 2;
        }
    }
    return base;
}

}  // namespace detail

// rho_{sigma_1..sigma_a} = tr(rho * (sigma_1 x ... x sigma_a)^dagger), which
// for matrix units is just rho indexed by the b1 bits and the b2 bits.
inline Tensor density_tensor(const Matrix& rho, const std::vector<WireId>& wires) {
    const int a = static_cast<int>(wires.size());
    const int dim = 1 << a;
    if (rho.rows() != dim || rho.cols() != dim)
        throw input_error("density matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
    std::vector<Complex> entries(std::size_t{1} << (2 * a));
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        int row = 0, col = 0;
        std::size_t rem = idx;
        for (int k = a - 1; k >= 0; --k) {
            int digit = static_cast<int>(rem & 3);
            rem >>= 2;
            row |= ((digit >> 1) & 1) << (a - 1 - k);
            col |= (digit & 1) << (a - 1 - k);
        }
        entries[idx] = rho(row, col);
    }
    return Tensor(wires, std::move(entries));
}

// Superoperator tensor of Q(rho) = U rho U^dagger. Input wires index first.
inline Tensor superop_tensor(const Matrix& unitary, const std::vector<WireId>& in_wires,
                             const std::vector<WireId>& out_wires) {
    if (in_wires.size() != out_wires.size()) throw input_error("unitary gate needs equal input and output arity");
    const int a = static_cast<int>(in_wires.size());
    const int dim = 1 << a;
    if (unitary.rows() != dim || unitary.cols() != dim)
        throw input_error("unitary must be " + std::to_string(dim) + "x" + std::to_string(dim));

    std::vector<WireId> wires = in_wires;
    wires.insert(wires.end(), out_wires.begin(), out_wires.end());
    std::vector<Complex> entries(std::size_t{1} << (4 * a));
    const std::size_t in_count = std::size_t{1} << (2 * a);
    for (std::size_t si = 0; si < in_count; ++si) {
        int b1 = 0, b2 = 0;
        std::size_t rem = si;
        for (int k = a - 1; k >= 0; --k) {
            int digit = static_cast<int>(rem & 3);
            rem >>= 2;
            b1 |= ((digit >> 1) & 1) << (a - 1 - k);
            b2 |= (digit & 1) << (a - 1 - k);
        }
        for (std::size_t ti = 0; ti < in_count; ++ti) {
            int d1 = 0, d2 = 0;
            rem = ti;
            for (int k = a - 1; k >= 0; --k) {
                int digit = static_cast<int>(rem & 3);
                rem >>= 2;
                d1 |= ((digit >> 1) & 1) << (a - 1 - k);
                d2 |= (digit & 1) << (a - 1 - k);
            }
            // tr(U |b1><b2| U^dag |d2><d1|) = U[d1][b1] * conj(U[d2][b2])
            entries[si * in_count + ti] = unitary(d1, b1) * std::conj(unitary(d2, b2));
        }
    }
    return Tensor(wires, std::move(entries));
}

// Trace-out: Q(|x><y|) = <x|y>, a rank-a tensor of Kronecker deltas.
inline Tensor traceout_tensor(const std::vector<WireId>& in_wires) {
    const int a = static_cast<int>(in_wires.size());
    std::vector<Complex> entries(std::size_t{1} << (2 * a));
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        bool diag = true;
        std::size_t rem = idx;
        for (int k = 0; k < a; ++k) {
            int digit = static_cast<int>(rem & 3);
            rem >>= 2;
            diag = diag && ((digit >> 1) == (digit & 1));
        }
        entries[idx] = diag ? 1.0 : 0.0;
    }
    return Tensor(in_wires, std::move(entries));
}

// Single-qubit POVM element attached to an output wire: entries tr(M sigma).
inline Tensor measurement_tensor(const Matrix& element, WireId wire) {
    if (element.rows() != 2 || element.cols() != 2) throw input_error("measurement element must be 2x2");
    std::vector<Complex> entries(4);
    for (int digit = 0; digit < 4; ++digit) entries[digit] = element(digit & 1, digit >> 1);
    return Tensor({wire}, std::move(entries));
}

// General superoperator tensor from the action on matrix units.
inline Tensor superop_tensor_from_action(const std::function<Matrix(const Matrix&)>& action, int a, int b,
                                         const std::vector<WireId>& in_wires, const std::vector<WireId>& out_wires) {
    if (static_cast<int>(in_wires.size()) != a || static_cast<int>(out_wires.size()) != b)
        throw input_error("superop wire counts must match the declared arity");
    std::vector<WireId> wires = in_wires;
    wires.insert(wires.end(), out_wires.begin(), out_wires.end());
    const std::size_t in_count = std::size_t{1} << (2 * a);
    const std::size_t out_count = std::size_t{1} << (2 * b);
    std::vector<Complex> entries(in_count * out_count);
    const int in_dim = 1 << a;
    const int out_dim = 1 << b;
    for (std::size_t si = 0; si < in_count; ++si) {
        int b1 = 0, b2 = 0;
        std::size_t rem = si;
        for (int k = a - 1; k >= 0; --k) {
            int digit = static_cast<int>(rem & 3);
            rem >>= 2;
            b1 |= ((digit >> 1) & 1) << (a - 1 - k);
            b2 |= (digit & 1) << (a - 1 - k);
        }
        Matrix unit(in_dim, in_dim);
        unit(b1, b2) = 1.0;
        Matrix image = action(unit);
        if (image.rows() != out_dim || image.cols() != out_dim)
            throw input_error("superop action returned a matrix of the wrong shape");
        for (std::size_t ti = 0; ti < out_count; ++ti) {
            int d1 = 0, d2 = 0;
            rem = ti;
            for (int k = b - 1; k >= 0; --k) {
                int digit = static_cast<int>(rem & 3);
                rem >>= 2;
                d1 |= ((digit >> 1) & 1) << (b - 1 - k);
                d2 |= (digit & 1) << (b - 1 - k);
            }
            entries[si * out_count + ti] = image(d1, d2);
        }
    }
    return Tensor(wires, std::move(entries));
}

// Sums over every wire the two tensors share, all at once. Output index
// order: g's free wires, then h's free wires.
inline Tensor contract_pair(const Tensor& g, const Tensor& h, int rank_budget = kDefaultRankBudget) {
    std::vector<int> g_shared, h_shared, g_free, h_free;
    for (int k = 0; k < g.rank(); ++k)
        (h.has_wire(g.wires()[k]) ? g_shared : g_free).push_back(k);
    for (int k = 0; k < h.rank(); ++k)
        (g.has_wire(h.wires()[k]) ? h_shared : h_free).push_back(k);
    if (g_shared.empty()) throw input_error("contract_pair requires at least one shared wire");
    if (g_shared.size() != h_shared.size())
        throw input_error("shared wires must appear once in each tensor");
    // align h's shared positions with g's shared wire order
    {
        std::vector<int> aligned(g_shared.size());
        for (std::size_t k = 0; k < g_shared.size(); ++k) {
            WireId w = g.wires()[g_shared[k]];
            auto it = std::find(h.wires().begin(), h.wires().end(), w);
            aligned[k] = static_cast<int>(it - h.wires().begin());
        }
        h_shared = aligned;
    }

    std::vector<WireId> out_wires;
    for (int p : g_free) out_wires.push_back(g.wires()[p]);
    for (int p : h_free) out_wires.push_back(h.wires()[p]);
    detail::check_rank_budget(static_cast<int>(out_wires.size()), rank_budget, "contracting a tensor pair");

    const auto g_free_base = detail::base_table(g, g_free);
    const auto g_shared_base = detail::base_table(g, g_shared);
    const auto h_free_base = detail::base_table(h, h_free);
    const auto h_shared_base = detail::base_table(h, h_shared);

    std::vector<Complex> entries(g_free_base.size() * h_free_base.size());
    std::size_t out_idx = 0;
    for (std::size_t gi = 0; gi < g_free_base.size(); ++gi) {
        for (std::size_t hi = 0; hi < h_free_base.size(); ++hi, ++out_idx) {
            Complex sum = 0.0;
            for (std::size_t s = 0; s < g_shared_base.size(); ++s)
                sum += g.entries()[g_free_base[gi] + g_shared_base[s]] *
                       h.entries()[h_free_base[hi] + h_shared_base[s]];
            entries[out_idx] = sum;
        }
    }
    return Tensor(std::move(out_wires), std::move(entries));
}

// Partial trace over a wire that appears twice in the same tensor.
inline Tensor trace_wire(const Tensor& t, WireId w) {
    std::vector<int> pair_pos, keep_pos;
    for (int k = 0; k < t.rank(); ++k)
        (t.wires()[k] == w ? pair_pos : keep_pos).push_back(k);
    if (pair_pos.size() != 2) throw input_error("trace_wire requires the wire to appear exactly twice");
    std::vector<WireId> out_wires;
    for (int p : keep_pos) out_wires.push_back(t.wires()[p]);
    const auto keep_base = detail::base_table(t, keep_pos);
    std::vector<Complex> entries(keep_base.size());
    for (std::size_t i = 0; i < keep_base.size(); ++i) {
        Complex sum = 0.0;
        for (int x = 0; x < 4; ++x)
            sum += t.entries()[keep_base[i] + static_cast<std::size_t>(x) * (t.stride(pair_pos[0]) + t.stride(pair_pos[1]))];
        entries[i] = sum;
    }
    return Tensor(std::move(out_wires), std::move(entries));
}

inline Tensor tensor_product(const Tensor& g, const Tensor& h, int rank_budget = kDefaultRankBudget) {
    std::vector<WireId> out_wires = g.wires();
    out_wires.insert(out_wires.end(), h.wires().begin(), h.wires().end());
    detail::check_rank_budget(static_cast<int>(out_wires.size()), rank_budget, "tensor product");
    std::vector<Complex> entries(g.entries().size() * h.entries().size());
    std::size_t idx = 0;
    for (const Complex& a : g.entries())
        for (const Complex& b : h.entries()) entries[idx++] = a * b;
    return Tensor(std::move(out_wires), std::move(entries));
}

// A collection of tensors; every wire is used by at most two tensor slots
// (twice in one tensor is a loop).
struct TensorNetwork {
    std::vector<Tensor> tensors;

    void add(Tensor t) { tensors.push_back(std::move(t)); }

    std::map<WireId, int> wire_occurrences() const {
        std::map<WireId, int> count;
        for (const Tensor& t : tensors)
            for (WireId w : t.wires()) ++count[w];
        return count;
    }

    std::vector<WireId> open_wires() const {
        std::vector<WireId> out;
        for (const auto& [w, c] : wire_occurrences())
            if (c == 1) out.push_back(w);
        return out;
    }

    std::vector<WireId> internal_wires() const {
        std::vector<WireId> out;
        for (const auto& [w, c] : wire_occurrences())
            if (c == 2) out.push_back(w);
        return out;
    }

    void validate() const {
        for (const auto& [w, c] : wire_occurrences())
            if (c > 2) throw input_error("wire " + std::to_string(w) + " is used " + std::to_string(c) + " times");
    }
};

struct ContractionStats {
    int max_intermediate_rank = -1;  // over tensors created during contraction
    int steps = 0;
};

// Contracts the network along the wire ordering. All wires shared by the
// chosen pair are summed together, so later ordering entries that were
// already consumed are skipped. Wires shared by a tensor with itself are
// traced out internally.
inline Tensor contract_network(const TensorNetwork& net, const std::vector<WireId>& ordering,
                               int rank_budget = kDefaultRankBudget, ContractionStats* stats_out = nullptr) {
    net.validate();
    std::vector<std::optional<Tensor>> slots(net.tensors.begin(), net.tensors.end());
    std::map<WireId, std::vector<int>> owners;
    for (int i = 0; i < static_cast<int>(slots.size()); ++i)
        for (WireId w : slots[i]->wires()) owners[w].push_back(i);

    {
        std::set<WireId> listed(ordering.begin(), ordering.end());
        if (listed.size() != ordering.size()) throw input_error("contraction ordering repeats a wire");
        for (const auto& [w, who] : owners)
            if (who.size() == 2 && !listed.count(w))
                throw input_error("contraction ordering does not cover wire " + std::to_string(w));
        for (WireId w : ordering) {
            auto it = owners.find(w);
            if (it == owners.end()) throw input_error("contraction ordering names unknown wire " + std::to_string(w));
            if (it->second.size() == 1) throw input_error("wire " + std::to_string(w) + " is open, not contractible");
        }
    }

    ContractionStats stats;
    std::set<WireId> consumed;
    auto place = [&](Tensor t) {
        int slot = static_cast<int>(slots.size());
        stats.max_intermediate_rank = std::max(stats.max_intermediate_rank, t.rank());
        ++stats.steps;
        for (WireId w : t.wires()) {
            auto& who = owners[w];
            who.push_back(slot);
        }
        slots.push_back(std::move(t));
        return slot;
    };
    auto retire = [&](int slot) {
        for (WireId w : slots[slot]->wires()) {
            auto& who = owners[w];
            who.erase(std::remove(who.begin(), who.end(), slot), who.end());
            if (who.empty()) owners.erase(w);
        }
        slots[slot].reset();
    };

    for (WireId w : ordering) {
        if (consumed.count(w)) continue;
        auto& who = owners.at(w);
        if (who[0] == who[1]) {
            int a = who[0];
            Tensor traced = trace_wire(*slots[a], w);
            consumed.insert(w);
            retire(a);
            place(std::move(traced));
        } else {
            int a = who[0], b = who[1];
            try {
                Tensor merged = contract_pair(*slots[a], *slots[b], rank_budget);
                for (WireId x : slots[a]->wires())
                    if (slots[b]->has_wire(x)) consumed.insert(x);
                retire(a);
                retire(b);
                place(std::move(merged));
            } catch (const budget_error& e) {
                throw budget_error(std::string(e.what()) + " (while contracting wire " + std::to_string(w) + ")");
            }
        }
    }

    std::vector<int> live;
    for (int i = 0; i < static_cast<int>(slots.size()); ++i)
        if (slots[i]) live.push_back(i);
    Tensor result = live.empty() ? Tensor::scalar(1.0) : *slots[live[0]];
    for (std::size_t i = 1; i < live.size(); ++i) {
        result = tensor_product(result, *slots[live[i]], rank_budget);
        stats.max_intermediate_rank = std::max(stats.max_intermediate_rank, result.rank());
    }
    if (stats_out) *stats_out = stats;
    return result;
}

}  // namespace twsim
