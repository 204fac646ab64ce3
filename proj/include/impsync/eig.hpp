#pragma once

// Dense eigenvalue machinery: Hessenberg reduction followed by shifted QR
// iteration on the complex matrix, the induced 2-norm derived from it, and
// the normalized left null vector used for Laplacian analysis.

#include "impsync/mat.hpp"
#include "impsync/qr.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace impsync {

/// Eigenvalues ordered by ascending real part, ties (to a relative
/// tolerance) broken by ascending imaginary part.
struct SpectrumSummary {
    std::vector<cxd> eigenvalues;

    [[nodiscard]] std::size_t size() const { return eigenvalues.size(); }
    [[nodiscard]] cxd operator[](std::size_t i) const { return eigenvalues[i]; }
};

namespace detail {

inline void hessenberg_in_place(Mat& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double sigma = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) sigma += std::norm(h(i, k));
        sigma = std::sqrt(sigma);
        if (sigma == 0.0) continue;
        const cxd x0 = h(k + 1, k);
        const cxd phase = (x0 == cxd{}) ? cxd(1.0, 0.0) : x0 / std::abs(x0);
        std::vector<cxd> v(n - k - 1);
        for (std::size_t i = k + 1; i < n; ++i) v[i - k - 1] = h(i, k);
        v[0] += phase * sigma;
        double vnsq = 0.0;
        for (const auto& vi : v) vnsq += std::norm(vi);
        if (vnsq == 0.0) continue;
        const double beta = 2.0 / vnsq;

        // left: rows k+1..n-1
        for (std::size_t j = k; j < n; ++j) {
            cxd s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i - k - 1]) * h(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i - k - 1];
        }
        // right: columns k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            cxd s{};
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j - k - 1];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j - k - 1]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

struct Givens {
    double c;
    cxd s;
};

inline Givens make_givens(cxd f, cxd g) {
    if (g == cxd{}) return {1.0, cxd{}};
    if (f == cxd{}) return {0.0, std::conj(g) / std::abs(g)};
    const double d = std::hypot(std::abs(f), std::abs(g));
    const double c = std::abs(f) / d;
    const cxd s = (f / std::abs(f)) * std::conj(g) / d;
    return {c, s};
}

/// Eigenvalue of [[a, b], [c, d]] closest to d (Wilkinson shift).
inline cxd wilkinson_shift(cxd a, cxd b, cxd c, cxd d) {
    const cxd tr2 = (a + d) * 0.5;
    const cxd det = a * d - b * c;
    const cxd disc = std::sqrt(tr2 * tr2 - det);
    const cxd l1 = tr2 + disc;
    const cxd l2 = tr2 - disc;
    return (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
}

} // namespace detail

/// All eigenvalues, unordered, via shifted QR on the Hessenberg form.
/// Throws convergence_error if the sweep budget runs out.
inline std::vector<cxd> eigenvalues_unordered(const Mat& m) {
    if (!m.square()) throw dimension_error("eigenvalues: matrix must be square");
    const std::size_t n = m.rows();
    Mat h = m;
    detail::hessenberg_in_place(h);
    const double hnorm = std::max(h.frobenius_norm(), std::numeric_limits<double>::min());
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::vector<cxd> eig;
    eig.reserve(n);
    std::size_t hi = n - 1;
    std::size_t iters_here = 0;
    std::size_t total = 0;
    const std::size_t budget = 100 * n + 100;

    auto negligible = [&](std::size_t i) {
        const double bound = eps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i)));
        return std::abs(h(i, i - 1)) <= std::max(bound, eps * eps * hnorm);
    };

    while (true) {
        if (hi == 0) {
            eig.push_back(h(0, 0));
            break;
        }
        if (negligible(hi)) {
            h(hi, hi - 1) = 0.0;
            eig.push_back(h(hi, hi));
            --hi;
            iters_here = 0;
            continue;
        }
        if (++total > budget)
            throw convergence_error("eigenvalues: QR iteration exceeded its sweep budget");

        // active block lo..hi
        std::size_t lo = hi;
        while (lo > 0 && !negligible(lo)) --lo;
        if (lo > 0) h(lo, lo - 1) = 0.0;

        cxd shift = detail::wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1),
                                            h(hi, hi));
        if (++iters_here % 12 == 0) {
            // exceptional shift to break symmetric stagnation
            const double kick = std::abs(h(hi, hi - 1)) +
                                (hi >= lo + 2 ? std::abs(h(hi - 1, hi - 2)) : 0.0);
            shift = h(hi, hi) + cxd(1.5 * kick, 0.5 * kick);
        }

        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= shift;
        std::vector<detail::Givens> rot(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto g = detail::make_givens(h(i, i), h(i + 1, i));
            rot[i - lo] = g;
            for (std::size_t j = i; j <= hi; ++j) {
                const cxd t1 = h(i, j);
                const cxd t2 = h(i + 1, j);
                h(i, j) = g.c * t1 + g.s * t2;
                h(i + 1, j) = -std::conj(g.s) * t1 + g.c * t2;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) {
            const auto g = rot[i - lo];
            for (std::size_t r = lo; r <= hi; ++r) {
                const cxd t1 = h(r, i);
                const cxd t2 = h(r, i + 1);
                h(r, i) = g.c * t1 + std::conj(g.s) * t2;
                h(r, i + 1) = -g.s * t1 + g.c * t2;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += shift;
    }
    return eig;
}

namespace detail {

/// Sort ascending by real part; runs of nearly equal real parts (within
/// rel_tol of the spectrum scale) are ordered by imaginary part.
inline void order_spectrum(std::vector<cxd>& v, double rel_tol = 1e-9) {
    std::sort(v.begin(), v.end(), [](cxd a, cxd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    double scale = 0.0;
    for (const auto& z : v) scale = std::max(scale, std::abs(z));
    const double tol = rel_tol * std::max(scale, 1.0);
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i + 1;
        while (j < v.size() && std::abs(v[j].real() - v[j - 1].real()) <= tol) ++j;
        std::sort(v.begin() + static_cast<std::ptrdiff_t>(i),
                  v.begin() + static_cast<std::ptrdiff_t>(j), [](cxd a, cxd b) {
                      if (a.imag() != b.imag()) return a.imag() < b.imag();
                      return a.real() < b.real();
                  });
        i = j;
    }
}

} // namespace detail

/// Ordered spectrum of a square matrix.
inline SpectrumSummary eigenvalues(const Mat& m) {
    SpectrumSummary s;
    s.eigenvalues = eigenvalues_unordered(m);
    detail::order_spectrum(s.eigenvalues);
    return s;
}

/// max |lambda|.
inline double spectral_radius(const Mat& m) {
    double r = 0.0;
    for (const auto& z : eigenvalues_unordered(m)) r = std::max(r, std::abs(z));
    return r;
}

/// Induced 2-norm: largest singular value, via the Hermitian spectrum of m^H m.
inline double two_norm(const Mat& m) {
    if (m.max_abs() == 0.0) return 0.0;
    // scale so m^H m cannot overflow and is well equilibrated
    const double scale = m.max_abs();
    Mat s = m;
    s *= cxd(1.0 / scale, 0.0);
    const Mat g = s.adjoint() * s;
    double lmax = 0.0;
    for (const auto& z : eigenvalues_unordered(g)) lmax = std::max(lmax, z.real());
    return scale * std::sqrt(std::max(lmax, 0.0));
}

/// Row vector l^T with l^T m = 0 and l^T 1 = 1; m must have a simple
/// eigenvalue at zero to tolerance.
inline Mat left_null_vector(const Mat& m) {
    if (!m.square()) throw dimension_error("left_null_vector: matrix must be square");
    const std::size_t q = m.rows();
    const Mat mt = m.transpose();
    const QrPivoted f = qr_col_pivot(mt.adjoint());
    const auto mags = qr_diag_magnitudes(f);
    const double tol = 1e-9 * std::max(mags.front(), std::numeric_limits<double>::min());
    std::size_t rank = 0;
    for (double v : mags)
        if (v > tol) ++rank;
    if (mags.front() == 0.0) rank = 0; // zero matrix
    const std::size_t nulldim = q - rank;
    if (nulldim == 0)
        throw numeric_error("left_null_vector: no zero eigenvalue to tolerance");
    if (nulldim > 1)
        throw numeric_error("left_null_vector: zero eigenvalue is not simple to tolerance");
    const Mat v = f.q.block(0, rank, q, 1);
    cxd s{};
    for (std::size_t i = 0; i < q; ++i) s += v(i, 0);
    if (std::abs(s) < 1e-9)
        throw numeric_error("left_null_vector: normalization l^T 1 = 1 impossible");
    Mat ell(1, q);
    for (std::size_t i = 0; i < q; ++i) ell(0, i) = v(i, 0) / s;
    return ell;
}

} // namespace impsync
