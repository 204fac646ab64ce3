#pragma once

// Shared generators and oracles for the test suites. Everything is seeded
// explicitly so failures reproduce.

#include <impsync/impsync.hpp>

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

using impsync::AgentSystem;
using impsync::CouplingGraph;
using impsync::cxd;
using impsync::Mat;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Mat random_real(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = cxd(uniform(rng, -scale, scale), 0.0);
    return m;
}

inline Mat random_complex(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
    Mat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m(i, j) = cxd(uniform(rng, -scale, scale), uniform(rng, -scale, scale));
    return m;
}

/// Real orthogonal matrix (Q factor of a random real matrix).
inline Mat random_orthogonal(Rng& rng, std::size_t n) {
    return impsync::qr_col_pivot(random_real(rng, n, n)).q;
}

/// Unitary matrix (Q factor of a random complex matrix).
inline Mat random_unitary(Rng& rng, std::size_t n) {
    return impsync::qr_col_pivot(random_complex(rng, n, n)).q;
}

/// Real nilpotent matrix: a sparse strictly upper triangular core rotated by
/// a random orthogonal similarity, so the zero structure is hidden.
inline Mat random_nilpotent(Rng& rng, std::size_t n, double scale = 1.0) {
    Mat core(n, n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (uniform(rng, 0.0, 1.0) < 0.7) {
                core(i, j) = cxd(uniform(rng, -scale, scale), 0.0);
                any = true;
            }
    if (!any && n > 1) core(0, n - 1) = cxd(uniform(rng, 0.5, scale + 0.5), 0.0);
    const Mat q = random_orthogonal(rng, n);
    return q * core * q.adjoint();
}

/// Random agent pool member: bounded dynamics, a well-conditioned
/// controllability matrix, and a sampling period away from degeneracy.
inline AgentSystem random_controllable_system(Rng& rng, std::size_t n, double t_lo = 0.4,
                                              double t_hi = 1.6) {
    for (int tries = 0; tries < 500; ++tries) {
        Mat a = random_real(rng, n, n);
        const double nrm = a.one_norm();
        if (nrm > 1.0) a *= cxd(1.0 / nrm, 0.0);
        Mat b = random_real(rng, n, 1);
        const double t = uniform(rng, t_lo, t_hi);
        try {
            AgentSystem sys(std::move(a), std::move(b), t);
            if (impsync::rank_ratio(impsync::controllability_matrix(sys)) >= 1e-4) return sys;
        } catch (const impsync::controllability_error&) {
        }
    }
    throw std::runtime_error("random_controllable_system: exhausted retries");
}

/// Weighted digraph that contains a spanning tree by construction: each
/// agent i >= 1 listens to one earlier agent, plus optional extra edges.
inline CouplingGraph random_tree_graph(Rng& rng, std::size_t q, std::size_t extra_edges = 0) {
    std::vector<double> w(q * q, 0.0);
    for (std::size_t i = 1; i < q; ++i) {
        const std::size_t parent = pick(rng, 0, i - 1);
        w[i * q + parent] = uniform(rng, 0.5, 2.0);
    }
    for (std::size_t e = 0; e < extra_edges; ++e) {
        const std::size_t i = pick(rng, 0, q - 1);
        const std::size_t j = pick(rng, 0, q - 1);
        if (i != j) w[i * q + j] = uniform(rng, 0.1, 1.5);
    }
    return CouplingGraph(q, std::move(w));
}

/// Each directed edge present independently with the given probability.
inline CouplingGraph random_sparse_graph(Rng& rng, std::size_t q, double density) {
    std::vector<double> w(q * q, 0.0);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j)
            if (i != j && uniform(rng, 0.0, 1.0) < density) w[i * q + j] = uniform(rng, 0.2, 2.0);
    return CouplingGraph(q, std::move(w));
}

/// Reachability oracle, independent of any spectral machinery: true iff some
/// root influences every agent (edge j -> i whenever weight(i, j) > 0).
inline bool has_spanning_tree_bfs(const CouplingGraph& g) {
    for (std::size_t root = 0; root < g.q; ++root) {
        std::vector<char> seen(g.q, 0);
        std::vector<std::size_t> stack{root};
        seen[root] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t j = stack.back();
            stack.pop_back();
            for (std::size_t i = 0; i < g.q; ++i)
                if (!seen[i] && g.weight(i, j) > 0.0) {
                    seen[i] = 1;
                    ++count;
                    stack.push_back(i);
                }
        }
        if (count == g.q) return true;
    }
    return false;
}

/// Greedy minimal matching between two multisets of complex numbers; returns
/// the largest matched distance (infinity on size mismatch).
inline double match_spectra(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<char> used(b.size(), 0);
    double worst = 0.0;
    for (const cxd za : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = b.size();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(za - b[j]);
            if (dist < best) {
                best = dist;
                best_j = j;
            }
        }
        used[best_j] = 1;
        worst = std::max(worst, best);
    }
    return worst;
}

/// Fresh directory under the system temp root.
inline std::string make_temp_dir(const std::string& prefix) {
    namespace fs = std::filesystem;
    std::random_device rd;
    for (int tries = 0; tries < 100; ++tries) {
        fs::path p = fs::temp_directory_path() / (prefix + std::to_string(rd()));
        std::error_code ec;
        if (fs::create_directory(p, ec)) return p.string();
    }
    throw std::runtime_error("make_temp_dir: could not create a directory");
}

} // namespace testutil
