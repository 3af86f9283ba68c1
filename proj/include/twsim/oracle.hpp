#pragma once

// Dense reference simulator: sequential density-matrix evolution plus the
// graph-state amplitude formula. Deliberately a different algorithm from the
// contraction engine; it is the oracle everything else is checked against.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "twsim/circuit.hpp"
#include "twsim/errors.hpp"
#include "twsim/matrix.hpp"
#include "twsim/multigraph.hpp"

namespace twsim {

inline constexpr int kOracleQubitLimit = 10;

namespace detail {

// first live qubit is the most significant bit
inline int extract_bits(int index, const std::vector<int>& positions, int k) {
    int out = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        out |= ((index >> (k - 1 - positions[i])) & 1) << (positions.size() - 1 - i);
    return out;
}

inline int replace_bits(int index, const std::vector<int>& positions, int k, int bits) {
    for (std::size_t i = 0; i < positions.size(); ++i) {
        int mask = 1 << (k - 1 - positions[i]);
        if ((bits >> (positions.size() - 1 - i)) & 1)
            index |= mask;
        else
            index &= ~mask;
    }
    return index;
}

}  // namespace detail

class DenseState {
public:
    static DenseState from_bitstring(const std::string& x) {
        const int n = static_cast<int>(x.size());
        if (n > kOracleQubitLimit) throw budget_error("oracle supports at most 10 qubits");
        DenseState s;
        s.rho_ = Matrix(1 << n, 1 << n);
        int basis = 0;
        for (int i = 0; i < n; ++i)
            if (x[i] == '1') basis |= 1 << (n - 1 - i);
        s.rho_(basis, basis) = 1.0;
        for (int i = 0; i < n; ++i) s.live_.push_back(i);
        return s;
    }

    static DenseState from_statevector(const std::vector<Complex>& amps, const std::vector<int>& lines) {
        DenseState s;
        int dim = static_cast<int>(amps.size());
        s.rho_ = Matrix(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) s.rho_(r, c) = amps[r] * std::conj(amps[c]);
        s.live_ = lines;
        return s;
    }

    int qubit_count() const { return static_cast<int>(live_.size()); }
    const std::vector<int>& live_lines() const { return live_; }
    const Matrix& rho() const { return rho_; }

    int position_of(int line) const {
        auto it = std::find(live_.begin(), live_.end(), line);
        if (it == live_.end()) throw input_error("qubit line " + std::to_string(line) + " is not live");
        return static_cast<int>(it - live_.begin());
    }

    void apply_unitary(const Matrix& u, const std::vector<int>& lines) {
        std::vector<int> pos;
        for (int line : lines) pos.push_back(position_of(line));
        left_apply(u, pos);
        right_apply_adjoint(u, pos);
    }

    void apply_superop_tensor(const std::vector<Complex>& entries, const std::vector<int>& lines) {
        const int a = static_cast<int>(lines.size());
        std::vector<int> pos;
        for (int line : lines) pos.push_back(position_of(line));
        const int k = qubit_count();
        const int dim = 1 << k;
        const int tdim = 1 << a;
        Matrix out(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                int d1 = detail::extract_bits(r, pos, k);
                int d2 = detail::extract_bits(c, pos, k);
                Complex sum = 0.0;
                for (int b1 = 0; b1 < tdim; ++b1) {
                    for (int b2 = 0; b2 < tdim; ++b2) {
                        // entry index: input digits (2 b1_i + b2_i), then output digits
                        std::size_t si = 0, ti = 0;
                        for (int q = 0; q < a; ++q) {
                            si = si * 4 + (((b1 >> (a - 1 - q)) & 1) * 2 + ((b2 >> (a - 1 - q)) & 1));
                            ti = ti * 4 + (((d1 >> (a - 1 - q)) & 1) * 2 + ((d2 >> (a - 1 - q)) & 1));
                        }
                        sum += entries[si * (std::size_t{1} << (2 * a)) + ti] *
                               rho_(detail::replace_bits(r, pos, k, b1), detail::replace_bits(c, pos, k, b2));
                    }
                }
                out(r, c) = sum;
            }
        }
        rho_ = std::move(out);
    }

    void traceout(int line) {
        int p = position_of(line);
        const int k = qubit_count();
        const int dim_out = 1 << (k - 1);
        Matrix out(dim_out, dim_out);
        for (int r = 0; r < dim_out; ++r)
            for (int c = 0; c < dim_out; ++c)
                for (int b = 0; b < 2; ++b)
                    out(r, c) += rho_(insert_bit(r, p, k, b), insert_bit(c, p, k, b));
        rho_ = std::move(out);
        live_.erase(live_.begin() + p);
    }

    void apply_gate(const Gate& g) {
        switch (g.kind) {
            case GateKind::named: apply_unitary(gate_matrix(g.name), g.qubits); break;
            case GateKind::unitary: apply_unitary(g.matrix, g.qubits); break;
            case GateKind::superop: apply_superop_tensor(g.superop, g.qubits); break;
            case GateKind::traceout: traceout(g.qubits[0]); break;
        }
    }

    // tr((x) elements applied per line) * rho); missing lines mean identity
    double scenario_probability(const std::map<int, Matrix>& per_line) const {
        const int k = qubit_count();
        const int dim = 1 << k;
        Complex p = 0.0;
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                if (rho_(c, r) == Complex{}) continue;
                Complex m = 1.0;
                for (int i = 0; i < k && m != Complex{}; ++i) {
                    auto it = per_line.find(live_[i]);
                    if (it == per_line.end()) {
                        if (((r >> (k - 1 - i)) & 1) != ((c >> (k - 1 - i)) & 1)) m = 0.0;
                    } else {
                        m *= it->second((r >> (k - 1 - i)) & 1, (c >> (k - 1 - i)) & 1);
                    }
                }
                p += m * rho_(c, r);
            }
        }
        return p.real();
    }

    double element_probability(int line, const Matrix& element) const {
        return scenario_probability({{line, element}});
    }

    // Measurement update with Kraus operator sqrt(element); returns the
    // branch probability and leaves the state normalized.
    double collapse(int line, const Matrix& element) {
        double p = element_probability(line, element);
        if (p <= 1e-14) throw input_error("measurement branch has (near) zero probability");
        Matrix root = sqrt_psd_2x2(element);
        std::vector<int> pos{position_of(line)};
        left_apply(root, pos);
        right_apply_adjoint(root, pos);
        for (auto& x : rho_.data()) x /= p;
        return p;
    }

private:
    static int insert_bit(int index, int p, int k, int bit) {
        // inserts a bit at position p (MSB order) into a (k-1)-bit index
        int low_count = k - 1 - p;
        int high = index >> low_count;
        int low = index & ((1 << low_count) - 1);
        return (((high << 1) | bit) << low_count) | low;
    }

    void left_apply(const Matrix& u, const std::vector<int>& pos) {
        const int k = qubit_count();
        const int dim = 1 << k;
        const int tdim = u.rows();
        Matrix out(dim, dim);
        for (int r = 0; r < dim; ++r) {
            int tb = detail::extract_bits(r, pos, k);
            for (int tb2 = 0; tb2 < tdim; ++tb2) {
                Complex coeff = u(tb, tb2);
                if (coeff == Complex{}) continue;
                int r2 = detail::replace_bits(r, pos, k, tb2);
                for (int c = 0; c < dim; ++c) out(r, c) += coeff * rho_(r2, c);
            }
        }
        rho_ = std::move(out);
    }

    void right_apply_adjoint(const Matrix& u, const std::vector<int>& pos) {
        const int k = qubit_count();
        const int dim = 1 << k;
        const int tdim = u.rows();
        Matrix out(dim, dim);
        for (int c = 0; c < dim; ++c) {
            int tb = detail::extract_bits(c, pos, k);
            for (int tb2 = 0; tb2 < tdim; ++tb2) {
                Complex coeff = std::conj(u(tb, tb2));
                if (coeff == Complex{}) continue;
                int c2 = detail::replace_bits(c, pos, k, tb2);
                for (int r = 0; r < dim; ++r) out(r, c) += rho_(r, c2) * coeff;
            }
        }
        rho_ = std::move(out);
    }

    Matrix rho_;
    std::vector<int> live_;
};

// Dense sequential evaluation of the probability that tau is realized on
// C(rho_x).
inline double oracle_probability(const Circuit& c, const std::string& x, const MeasurementScenario& tau) {
    validate_circuit(c);
    if (c.n > kOracleQubitLimit) throw budget_error("oracle supports at most 10 qubits");
    if (static_cast<int>(x.size()) != c.n) throw input_error("input bitstring length mismatch");
    DenseState s = DenseState::from_bitstring(x);
    for (const Gate& g : c.gates) s.apply_gate(g);
    std::map<int, Matrix> per_line;
    const auto& live = s.live_lines();
    for (std::size_t j = 0; j < live.size(); ++j)
        per_line[live[j]] = tau.element(static_cast<int>(j));
    return s.scenario_probability(per_line);
}

// |G> = 2^{-n/2} sum_{V'} (-1)^{e(V')} |V'>; vertex order = sorted ids,
// first vertex is the most significant bit.
inline std::vector<Complex> oracle_graph_state(const SimpleGraph& g) {
    const int n = static_cast<int>(g.vertex_count());
    if (n > 20) throw budget_error("graph-state amplitudes capped at 20 vertices");
    auto vs = g.vertices();
    std::map<Vertex, int> pos;
    for (int i = 0; i < n; ++i) pos[vs[i]] = i;
    std::vector<std::pair<int, int>> edge_bits;
    for (const auto& [u, v] : g.edges())
        edge_bits.emplace_back(n - 1 - pos[u], n - 1 - pos[v]);

    std::vector<Complex> amps(std::size_t{1} << n);
    const double norm = std::pow(2.0, -n / 2.0);
    for (std::size_t subset = 0; subset < amps.size(); ++subset) {
        int count = 0;
        for (const auto& [bu, bv] : edge_bits)
            count += ((subset >> bu) & 1) & ((subset >> bv) & 1);
        amps[subset] = (count % 2 == 0 ? norm : -norm);
    }
    return amps;
}

// Pure-state evolution, used to cross-validate the graph-state formula and
// the measurement gadgets.
struct StateVector {
    int n = 0;
    std::vector<Complex> amps;

    static StateVector zero_state(int n) {
        StateVector s;
        s.n = n;
        s.amps.assign(std::size_t{1} << n, 0.0);
        s.amps[0] = 1.0;
        return s;
    }

    void apply_unitary(const Matrix& u, const std::vector<int>& positions) {
        const int dim = 1 << n;
        const int tdim = u.rows();
        std::vector<Complex> out(dim, 0.0);
        for (int r = 0; r < dim; ++r) {
            int tb = detail::extract_bits(r, positions, n);
            for (int tb2 = 0; tb2 < tdim; ++tb2) {
                Complex coeff = u(tb, tb2);
                if (coeff == Complex{}) continue;
                out[r] += coeff * amps[detail::replace_bits(r, positions, n, tb2)];
            }
        }
        amps = std::move(out);
    }

    // Applies the element's square root and normalizes; returns the branch
    // probability <psi| M |psi>.
    double collapse(int position, const Matrix& element) {
        Matrix root = sqrt_psd_2x2(element);
        StateVector branch = *this;
        branch.apply_unitary(root, {position});
        double p = 0.0;
        for (const Complex& a : branch.amps) p += std::norm(a);
        if (p <= 1e-14) throw input_error("measurement branch has (near) zero probability");
        double s = 1.0 / std::sqrt(p);
        for (Complex& a : branch.amps) a *= s;
        amps = std::move(branch.amps);
        return p;
    }

    // |<a|b>| up to global phase
    double overlap_magnitude(const StateVector& other) const {
        Complex ip = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) ip += std::conj(amps[i]) * other.amps[i];
        return std::abs(ip);
    }
};

}  // namespace twsim
