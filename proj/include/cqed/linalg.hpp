// linalg.hpp — small dense complex linear solver (LU with partial pivoting)

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqed {

/// Row-major dense complex matrix, just big enough for the oracle systems.
struct ComplexMatrix {
    int n = 0;
    std::vector<std::complex<double>> a;

    explicit ComplexMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size) {}

    std::complex<double>& operator()(int i, int j) {
        return a[static_cast<std::size_t>(i) * n + j];
    }
    const std::complex<double>& operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * n + j];
    }
};

/// Solve A x = b by Gaussian elimination with partial pivoting.  A is taken
/// by value (clarity over speed; the systems are tiny).  Throws on a
/// numerically singular pivot, reporting the pivot-ratio diagnostic.
inline std::vector<std::complex<double>> lu_solve(ComplexMatrix a,
                                                  std::vector<std::complex<double>> b);

/// lu_solve plus one pass of iterative refinement, which pushes the backward
/// residual to the rounding floor even for poorly scaled systems.
inline std::vector<std::complex<double>> lu_solve_refined(const ComplexMatrix& a,
                                                          const std::vector<std::complex<double>>& b) {
    std::vector<std::complex<double>> x = lu_solve(a, b);
    const int n = a.n;
    std::vector<std::complex<double>> residual(b);
    for (int i = 0; i < n; ++i) {
        std::complex<double> s{};
        for (int j = 0; j < n; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
        residual[static_cast<std::size_t>(i)] -= s;
    }
    std::vector<std::complex<double>> correction = lu_solve(a, residual);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += correction[static_cast<std::size_t>(i)];
    return x;
}

inline std::vector<std::complex<double>> lu_solve(ComplexMatrix a,
                                                  std::vector<std::complex<double>> b) {
    const int n = a.n;
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: size mismatch");

    double max_pivot = 0.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int row = col + 1; row < n; ++row) {
            double v = std::abs(a(row, col));
            if (v > best) {
                best = v;
                pivot = row;
            }
        }
        max_pivot = std::max(max_pivot, best);
        if (best < 1e-14 * std::max(max_pivot, 1.0))
            throw std::runtime_error("lu_solve: singular system (pivot ratio " +
                                     std::to_string(best / std::max(max_pivot, 1e-300)) +
                                     " at column " + std::to_string(col) + ")");
        if (pivot != col) {
            for (int j = col; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
        }
        for (int row = col + 1; row < n; ++row) {
            std::complex<double> f = a(row, col) / a(col, col);
            if (f == std::complex<double>{}) continue;
            a(row, col) = {};
            for (int j = col + 1; j < n; ++j) a(row, j) -= f * a(col, j);
            b[static_cast<std::size_t>(row)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        std::complex<double> s = b[static_cast<std::size_t>(row)];
        for (int j = row + 1; j < n; ++j) s -= a(row, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(row)] = s / a(row, row);
    }
    return b;
}

}  // namespace cqed
