#pragma once

// Normalized deadbeat coupling design for one sampled agent.
//
// For a controllable pair (A, B) with impulse period T, the gain
//   G = e_n^T C^{-1} e^{AnT},   C = [B, e^{AT}B, ..., e^{A(n-1)T}B]
// places every eigenvalue of e^{AT} - BG at the origin, and the impulse
// gain K = G e^{-AT} makes M = (I - BK) e^{AT} nilpotent with KB = 1.
// The Schur triangularization of M is built directly from the kernel flag
// ker(M) c ker(M^2) c ... instead of QR iteration, which behaves poorly
// when the whole spectrum sits at the origin.

#include "impsync/eig.hpp"
#include "impsync/errors.hpp"
#include "impsync/expm.hpp"
#include "impsync/mat.hpp"
#include "impsync/qr.hpp"
#include "impsync/solve.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace impsync {

/// Rank threshold below which a controllability matrix counts as singular.
inline constexpr double kControllabilityTol = 1e-10;

/// One agent's continuous dynamics x' = Ax + Bu with impulse period T.
/// Construction validates shapes, realness, T > 0 and controllability of
/// (A, B) to tolerance.
struct AgentSystem {
    Mat A;    // n x n, real
    Mat B;    // n x 1, real
    double T; // seconds, > 0
    std::size_t n;

    AgentSystem(Mat A_in, Mat B_in, double period)
        : A(std::move(A_in)), B(std::move(B_in)), T(period), n(A.rows()) {
        if (!A.square()) throw dimension_error("AgentSystem: A must be square");
        if (B.rows() != n || B.cols() != 1)
            throw dimension_error("AgentSystem: B must be n x 1");
        if (!A.is_real() || !B.is_real())
            throw dimension_error("AgentSystem: A and B must be real");
        if (!(T > 0.0)) throw dimension_error("AgentSystem: T must be positive");

        // Kalman matrix [B, AB, ..., A^{n-1}B]
        Mat kal(n, n);
        Mat col = B;
        for (std::size_t k = 0; k < n; ++k) {
            kal.set_block(0, k, col);
            col = A * col;
        }
        if (rank_ratio(kal) < kControllabilityTol)
            throw controllability_error("AgentSystem: (A, B) is not controllable to tolerance");
    }
};

/// The designed gains and the Schur factors of the nilpotent closed loop.
struct DeadbeatDesign {
    Mat C;       // n x n controllability matrix of (e^{AT}, B)
    Mat G;       // 1 x n deadbeat gain for (e^{AT}, B)
    Mat K;       // 1 x n impulse gain, K = G e^{-AT}
    Mat M;       // (I - BK) e^{AT}, nilpotent
    Mat Q;       // unitary Schur factor
    Mat N;       // strictly upper triangular, Q^H M Q = N
    double kb;   // K B, equals 1 by the deadbeat constraint

    // cached problem data used by the network layer
    Mat exp_at;    // e^{AT}
    Mat bk;        // B K projection
    Mat bk_exp_at; // B K e^{AT}
    std::size_t n;
    double T;
};

/// C = [B, e^{AT}B, ..., e^{A(n-1)T}B].
inline Mat controllability_matrix(const AgentSystem& sys) {
    const Mat f = expm(sys.A * sys.T);
    Mat c(sys.n, sys.n);
    Mat col = sys.B;
    for (std::size_t k = 0; k < sys.n; ++k) {
        c.set_block(0, k, col);
        col = f * col;
    }
    return c;
}

/// Unitary Q and strictly upper triangular N with Q^H m Q = N, for a
/// nilpotent m. Layers of the kernel flag become consecutive column groups
/// of Q, so m maps each column into the span of strictly earlier ones.
inline std::pair<Mat, Mat> schur_nilpotent(const Mat& m) {
    if (!m.square()) throw dimension_error("schur_nilpotent: matrix must be square");
    const std::size_t n = m.rows();
    const double nm = two_norm(m);

    if (nm == 0.0) return {Mat::identity(n), Mat::zeros(n, n)};

    const double npow = two_norm(mat_pow(m, n));
    if (npow > 1e-8 * std::pow(nm, static_cast<double>(n)))
        throw numeric_error("schur_nilpotent: input is not nilpotent to tolerance");

    Mat q(n, n);
    std::size_t filled = 0;
    Mat power = m;
    double power_scale = nm;
    for (std::size_t layer = 1; layer <= n && filled < n; ++layer) {
        // noise floor for ker(m^layer): rounding from the power products and
        // from whatever arithmetic produced m (linear solves can amplify
        // roundoff far past machine epsilon), kept well inside the nilpotency
        // acceptance threshold above; anything the floor misclassifies is
        // caught by the reconstruction check downstream
        const double floor = 1e-10 * power_scale;
        const Mat ker = nullspace(power, 1e-12, floor);
        if (ker.empty() || ker.cols() <= filled)
            throw numeric_error("schur_nilpotent: kernel flag stalled at layer " +
                                std::to_string(layer));
        // orthogonalize new kernel directions against the columns found so far
        const std::size_t want = ker.cols() - filled;
        Mat cand = ker;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < cand.cols(); ++j)
                for (std::size_t c = 0; c < filled; ++c) {
                    cxd dot{};
                    for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, c)) * cand(i, j);
                    for (std::size_t i = 0; i < n; ++i) cand(i, j) -= dot * q(i, c);
                }
        }
        // pick the `want` strongest residuals via pivoted QR
        const QrPivoted cf = qr_col_pivot(cand);
        for (std::size_t k = 0; k < want; ++k) {
            for (std::size_t i = 0; i < n; ++i) q(i, filled) = cf.q(i, k);
            ++filled;
        }
        power = power * m;
        power_scale *= nm;
    }
    if (filled < n) throw numeric_error("schur_nilpotent: kernel flag incomplete");

    Mat nmat = q.adjoint() * (m * q);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) nmat(i, j) = 0.0; // exact zeros by structure
    return {std::move(q), std::move(nmat)};
}

namespace detail {

inline void verify_design(const DeadbeatDesign& d) {
    const std::size_t n = d.n;
    if (std::abs(d.kb - 1.0) > 1e-9)
        throw numeric_error("deadbeat design: KB deviates from 1 by " +
                            std::to_string(std::abs(d.kb - 1.0)));
    if (max_abs_diff(d.Q.adjoint() * d.Q, Mat::identity(n)) > 1e-10)
        throw numeric_error("deadbeat design: Schur factor Q is not unitary");
    const double nm = two_norm(d.M);
    if (nm <= 1e-12 * two_norm(d.exp_at))
        return; // M is zero to working precision; nothing further to check
    if (two_norm(mat_pow(d.M, n)) > 1e-8 * std::pow(nm, static_cast<double>(n)))
        throw numeric_error("deadbeat design: closed loop is not nilpotent to tolerance");
    if (two_norm(d.Q.adjoint() * (d.M * d.Q) - d.N) > 1e-9 * nm)
        throw numeric_error("deadbeat design: Schur reconstruction failed");
}

} // namespace detail

/// Designs the normalized deadbeat coupling for `sys`. Both closed-form
/// expressions for K are evaluated and cross-checked, and every invariant
/// of the returned design is verified before it is handed out.
inline DeadbeatDesign design_deadbeat(const AgentSystem& sys) {
    const std::size_t n = sys.n;
    DeadbeatDesign d;
    d.n = n;
    d.T = sys.T;
    d.exp_at = expm(sys.A * sys.T);
    d.C = controllability_matrix(sys);

    if (rank_ratio(d.C) < kControllabilityTol)
        throw controllability_error(
            "design_deadbeat: period T loses controllability ((e^{AT}, B) singular)");

    const Mat exp_ant = expm(sys.A * (static_cast<double>(n) * sys.T));
    const Mat exp_an1t = expm(sys.A * (static_cast<double>(n - 1) * sys.T));
    Mat g_rows;
    Mat k_rows;
    try {
        g_rows = solve(d.C, exp_ant);
        k_rows = solve(d.C, exp_an1t);
    } catch (const singular_error&) {
        throw controllability_error(
            "design_deadbeat: period T loses controllability (singular solve)");
    }
    d.G = g_rows.row_at(n - 1); // e_n^T C^{-1} e^{AnT}
    d.K = d.G * expm(-(sys.A * sys.T));

    // second route K = e_n^T C^{-1} e^{A(n-1)T}
    const Mat k_alt = k_rows.row_at(n - 1);
    const double k_scale = std::max(1.0, d.K.max_abs());
    if (max_abs_diff(d.K, k_alt) > 1e-9 * k_scale)
        throw numeric_error("design_deadbeat: the two gain expressions disagree");

    d.kb = (d.K * sys.B)(0, 0).real();
    d.bk = sys.B * d.K;
    d.M = (Mat::identity(n) - d.bk) * d.exp_at;
    d.bk_exp_at = d.bk * d.exp_at;

    if (two_norm(d.M) <= 1e-12 * two_norm(d.exp_at)) {
        // closed loop is zero to working precision (always the case for n = 1)
        d.Q = Mat::identity(n);
        d.N = Mat::zeros(n, n);
    } else {
        auto qn = schur_nilpotent(d.M);
        d.Q = std::move(qn.first);
        d.N = std::move(qn.second);
    }

    detail::verify_design(d);
    return d;
}

} // namespace impsync
