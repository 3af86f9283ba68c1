#pragma once

// Minimal dense complex matrices, enough for gate algebra and the dense
// reference simulator. Row-major, square or rectangular.

#include <cmath>
#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "twsim/errors.hpp"

namespace twsim {

using Complex = std::complex<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        a_.reserve(static_cast<std::size_t>(rows_) * cols_);
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != cols_) throw input_error("ragged matrix literal");
            for (const Complex& x : r) a_.push_back(x);
        }
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Complex& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<Complex>& data() const { return a_; }
    std::vector<Complex>& data() { return a_; }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw input_error("matrix shape mismatch in product");
        Matrix m(a.rows_, b.cols_);
        for (int r = 0; r < a.rows_; ++r)
            for (int k = 0; k < a.cols_; ++k) {
                Complex arK = a(r, k);
                if (arK == Complex{}) continue;
                for (int c = 0; c < b.cols_; ++c) m(r, c) += arK * b(k, c);
            }
        return m;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw input_error("matrix shape mismatch in sum");
        Matrix m = a;
        for (std::size_t i = 0; i < m.a_.size(); ++i) m.a_[i] += b.a_[i];
        return m;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw input_error("matrix shape mismatch in difference");
        Matrix m = a;
        for (std::size_t i = 0; i < m.a_.size(); ++i) m.a_[i] -= b.a_[i];
        return m;
    }

    friend Matrix operator*(Complex s, const Matrix& a) {
        Matrix m = a;
        for (auto& x : m.a_) x *= s;
        return m;
    }

    friend Matrix kron(const Matrix& a, const Matrix& b) {
        Matrix m(a.rows_ * b.rows_, a.cols_ * b.cols_);
        for (int ra = 0; ra < a.rows_; ++ra)
            for (int ca = 0; ca < a.cols_; ++ca)
                for (int rb = 0; rb < b.rows_; ++rb)
                    for (int cb = 0; cb < b.cols_; ++cb)
                        m(ra * b.rows_ + rb, ca * b.cols_ + cb) = a(ra, ca) * b(rb, cb);
        return m;
    }

    double max_abs_diff(const Matrix& other) const {
        double d = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) d = std::max(d, std::abs(a_[i] - other.a_[i]));
        return d;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> a_;
};

inline bool is_hermitian(const Matrix& m, double tol = 1e-9) {
    if (m.rows() != m.cols()) return false;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
    return true;
}

struct Eigen2 {
    double eval[2];
    Complex evec[2][2];  // evec[k] is the k-th (unit) eigenvector
};

// Eigensystem of a 2x2 Hermitian matrix, in closed form.
inline Eigen2 hermitian_eigen_2x2(const Matrix& m) {
    if (m.rows() != 2 || m.cols() != 2) throw input_error("hermitian_eigen_2x2 requires a 2x2 matrix");
    double a = m(0, 0).real();
    double d = m(1, 1).real();
    Complex b = m(0, 1);
    double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) / 4.0 + std::norm(b)));
    double mid = (a + d) / 2.0;
    Eigen2 out;
    out.eval[0] = mid + disc;
    out.eval[1] = mid - disc;
    for (int k = 0; k < 2; ++k) {
        // (a - lambda) x + b y = 0
        Complex x, y;
        if (std::abs(b) > 1e-14) {
            x = b;
            y = Complex(out.eval[k] - a, 0.0);
        } else if (a >= d) {
            x = (k == 0) ? 1.0 : 0.0;
            y = (k == 0) ? 0.0 : 1.0;
        } else {
            x = (k == 0) ? 0.0 : 1.0;
            y = (k == 0) ? 1.0 : 0.0;
        }
        double nrm = std::sqrt(std::norm(x) + std::norm(y));
        out.evec[k][0] = x / nrm;
        out.evec[k][1] = y / nrm;
    }
    return out;
}

inline bool is_psd_2x2(const Matrix& m, double tol = 1e-9) {
    if (!is_hermitian(m, tol)) return false;
    auto e = hermitian_eigen_2x2(m);
    return e.eval[0] >= -tol && e.eval[1] >= -tol;
}

// Square root of a 2x2 PSD matrix (tiny negative eigenvalues clamp to 0).
inline Matrix sqrt_psd_2x2(const Matrix& m) {
    auto e = hermitian_eigen_2x2(m);
    Matrix out(2, 2);
    for (int k = 0; k < 2; ++k) {
        double s = std::sqrt(std::max(0.0, e.eval[k]));
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) out(r, c) += s * e.evec[k][r] * std::conj(e.evec[k][c]);
    }
    return out;
}

}  // namespace twsim
