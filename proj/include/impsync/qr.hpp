#pragma once

// Householder QR with column pivoting, plus the rank and null-space
// extraction the deadbeat and graph layers rely on.

#include "impsync/mat.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace impsync {

struct QrPivoted {
    Mat q;                         // full m x m unitary factor
    Mat r;                         // m x n upper triangular (in pivoted columns)
    std::vector<std::size_t> perm; // perm[k] = original index of pivoted column k
};

/// A P = Q R with column pivoting; diagonal magnitudes of R are non-increasing.
inline QrPivoted qr_col_pivot(const Mat& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    QrPivoted f;
    f.r = a;
    f.q = Mat::identity(m);
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});

    std::vector<double> colsq(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) colsq[j] += std::norm(f.r(i, j));

    const std::size_t steps = std::min(m, n);
    for (std::size_t k = 0; k < steps; ++k) {
        // pivot: move the column of largest residual norm to position k
        std::size_t piv = k;
        double best = 0.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += std::norm(f.r(i, j));
            if (s > best) {
                best = s;
                piv = j;
            }
        }
        if (piv != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(f.r(i, k), f.r(i, piv));
            std::swap(f.perm[k], f.perm[piv]);
        }

        // Householder vector for column k below the diagonal
        double sigma = 0.0;
        for (std::size_t i = k; i < m; ++i) sigma += std::norm(f.r(i, k));
        sigma = std::sqrt(sigma);
        if (sigma == 0.0) continue;
        const cxd x0 = f.r(k, k);
        const cxd phase = (x0 == cxd{}) ? cxd(1.0, 0.0) : x0 / std::abs(x0);
        std::vector<cxd> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = f.r(i, k);
        v[0] += phase * sigma;
        double vnsq = 0.0;
        for (const auto& vi : v) vnsq += std::norm(vi);
        if (vnsq == 0.0) continue;
        const double beta = 2.0 / vnsq;

        // apply H = I - beta v v^H to R (left) and accumulate into Q (right)
        for (std::size_t j = k; j < n; ++j) {
            cxd s{};
            for (std::size_t i = k; i < m; ++i) s += std::conj(v[i - k]) * f.r(i, j);
            s *= beta;
            for (std::size_t i = k; i < m; ++i) f.r(i, j) -= s * v[i - k];
        }
        for (std::size_t i = 0; i < m; ++i) {
            cxd s{};
            for (std::size_t j = k; j < m; ++j) s += f.q(i, j) * v[j - k];
            s *= beta;
            for (std::size_t j = k; j < m; ++j) f.q(i, j) -= s * std::conj(v[j - k]);
        }
        for (std::size_t i = k + 1; i < m; ++i) f.r(i, k) = 0.0;
    }
    return f;
}

/// |R_kk| for k = 0..min(m,n)-1, non-increasing by pivoting.
inline std::vector<double> qr_diag_magnitudes(const QrPivoted& f) {
    const std::size_t d = std::min(f.r.rows(), f.r.cols());
    std::vector<double> mags(d);
    for (std::size_t k = 0; k < d; ++k) mags[k] = std::abs(f.r(k, k));
    return mags;
}

/// Smallest over largest pivoted R diagonal; 0 for a zero matrix.
inline double rank_ratio(const Mat& a) {
    const auto mags = qr_diag_magnitudes(qr_col_pivot(a));
    if (mags.empty() || mags.front() == 0.0) return 0.0;
    return mags.back() / mags.front();
}

/// Orthonormal basis of null(a) as matrix columns. Diagonal entries of the
/// pivoted QR of a^H at or below max(rel_tol * |R_00|, abs_floor) count as
/// zero. When the null space is trivial the result is an empty Mat.
inline Mat nullspace(const Mat& a, double rel_tol, double abs_floor = 0.0) {
    const QrPivoted f = qr_col_pivot(a.adjoint());
    const auto mags = qr_diag_magnitudes(f);
    const double tol = std::max(rel_tol * mags.front(), abs_floor);
    std::size_t rank = 0;
    for (double v : mags)
        if (v > tol) ++rank;
    const std::size_t n = a.cols();
    if (rank >= n) return Mat{};
    // null(a) is the orthogonal complement of range(a^H): trailing Q columns
    return f.q.block(0, rank, n, n - rank);
}

} // namespace impsync
