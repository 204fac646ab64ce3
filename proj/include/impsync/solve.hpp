#pragma once

// LU factorization with partial pivoting and the linear solve built on it.

#include "impsync/mat.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace impsync {

/// Relative pivot threshold below which a matrix is treated as singular.
inline constexpr double kSingularPivotTol = 1e-12;

struct LuFactors {
    Mat lu;                        // packed L (unit diagonal) and U
    std::vector<std::size_t> perm; // row permutation applied to the input
    double min_pivot = 0.0;
    double max_pivot = 0.0;
};

/// PA = LU with partial pivoting. Throws singular_error when the smallest
/// pivot falls below kSingularPivotTol times the largest.
inline LuFactors lu_factor(const Mat& a) {
    if (!a.square()) throw dimension_error("lu_factor: matrix must be square");
    const std::size_t n = a.rows();
    LuFactors f;
    f.lu = a;
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    Mat& m = f.lu;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(m(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        const double pmag = std::abs(m(k, k));
        f.max_pivot = std::max(f.max_pivot, pmag);
        f.min_pivot = (k == 0) ? pmag : std::min(f.min_pivot, pmag);
        if (pmag == 0.0)
            throw singular_error("lu_factor: exact zero pivot at step " + std::to_string(k));
        const cxd inv = 1.0 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            m(i, k) *= inv;
            const cxd lik = m(i, k);
            if (lik == cxd{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
        }
    }
    if (f.min_pivot < kSingularPivotTol * f.max_pivot)
        throw singular_error("lu_factor: matrix singular to tolerance (pivot ratio " +
                             std::to_string(f.min_pivot / f.max_pivot) + ")");
    return f;
}

inline Mat lu_solve(const LuFactors& f, const Mat& b) {
    const std::size_t n = f.lu.rows();
    if (b.rows() != n) throw dimension_error("lu_solve: right-hand side rows disagree");
    Mat x(n, b.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(f.perm[i], j);
    // forward: L y = P b
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) {
            const cxd lik = f.lu(i, k);
            if (lik == cxd{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) -= lik * x(k, j);
        }
    // backward: U x = y
    for (std::size_t kk = n; kk-- > 0;) {
        const cxd inv = 1.0 / f.lu(kk, kk);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            cxd s = x(kk, j);
            for (std::size_t i = kk + 1; i < n; ++i) s -= f.lu(kk, i) * x(i, j);
            x(kk, j) = s * inv;
        }
    }
    return x;
}

/// x with a x = b.
inline Mat solve(const Mat& a, const Mat& b) { return lu_solve(lu_factor(a), b); }

} // namespace impsync
