#pragma once

// Coupling-graph handling: Laplacian assembly from nonnegative weights and
// the spectral validation of the spanning-tree assumption.
//
// Weight orientation: weights(i, j) scales the relative measurement
// (x_j - x_i) seen by agent i, i.e. agent j influences agent i. A spanning
// tree therefore means one root agent reaches every other along the
// influence direction.

#include "impsync/eig.hpp"
#include "impsync/errors.hpp"
#include "impsync/mat.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace impsync {

/// Nonnegative coupling weights with zero diagonal, row-major q x q.
struct CouplingGraph {
    std::size_t q;
    std::vector<double> weights;

    CouplingGraph(std::size_t q_in, std::vector<double> w) : q(q_in), weights(std::move(w)) {
        if (q == 0) throw dimension_error("CouplingGraph: q must be at least 1");
        if (weights.size() != q * q)
            throw dimension_error("CouplingGraph: expected q*q weights");
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < q; ++j) {
                const double w_ij = weight(i, j);
                if (w_ij < 0.0)
                    throw dimension_error("CouplingGraph: negative weight at (" +
                                          std::to_string(i) + "," + std::to_string(j) + ")");
                if (i == j && w_ij != 0.0)
                    throw dimension_error("CouplingGraph: diagonal weight must be zero");
            }
    }

    [[nodiscard]] double weight(std::size_t i, std::size_t j) const {
        return weights[i * q + j];
    }
};

/// Laplacian: diagonal sum_j w_ij, off-diagonal -w_ij. Row sums vanish.
inline Mat laplacian(const CouplingGraph& g) {
    Mat gamma(g.q, g.q);
    for (std::size_t i = 0; i < g.q; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < g.q; ++j) {
            if (j == i) continue;
            const double w = g.weight(i, j);
            deg += w;
            gamma(i, j) = -w;
        }
        gamma(i, i) = deg;
    }
    return gamma;
}

/// Spectral summary of a Laplacian plus the connectivity verdict.
/// lambda2 and ell are present only when meaningful (spanning tree, q >= 2).
struct LaplacianSpectrum {
    Mat gamma;
    SpectrumSummary spectrum;
    bool spanning_tree = false;
    std::optional<cxd> lambda2;
    std::optional<Mat> ell; // 1 x q, ell * gamma = 0, ell * 1 = 1
};

/// Validates zero row sums, orders the spectrum, and applies the criterion:
/// spanning tree iff exactly one eigenvalue sits at the origin (relative to
/// ||Gamma||) and every other eigenvalue has strictly positive real part.
inline LaplacianSpectrum analyze_spectrum(const Mat& gamma) {
    if (!gamma.square()) throw dimension_error("analyze_spectrum: Laplacian must be square");
    const std::size_t q = gamma.rows();
    for (std::size_t i = 0; i < q; ++i) {
        cxd s{};
        double scale = 1.0;
        for (std::size_t j = 0; j < q; ++j) {
            s += gamma(i, j);
            scale = std::max(scale, std::abs(gamma(i, j)));
        }
        if (std::abs(s) > 1e-12 * scale)
            throw dimension_error("analyze_spectrum: row " + std::to_string(i) +
                                  " sum is not zero");
    }

    LaplacianSpectrum out;
    out.gamma = gamma;
    out.spectrum = eigenvalues(gamma);
    const double scale = two_norm(gamma);
    const double tol = 1e-9 * scale;

    std::size_t at_origin = 0;
    bool rest_positive = true;
    for (const cxd z : out.spectrum.eigenvalues) {
        if (std::abs(z) <= tol)
            ++at_origin;
        else if (!(z.real() > tol))
            rest_positive = false;
    }
    out.spanning_tree = (at_origin == 1) && rest_positive;

    if (out.spanning_tree) {
        for (const cxd z : out.spectrum.eigenvalues) {
            if (std::abs(z) > tol) {
                out.lambda2 = z; // first in the total order with Re > 0
                break;
            }
        }
        out.ell = left_null_vector(gamma);
    }
    return out;
}

inline LaplacianSpectrum analyze_graph(const CouplingGraph& g) {
    return analyze_spectrum(laplacian(g));
}

} // namespace impsync
