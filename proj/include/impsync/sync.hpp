#pragma once

// ============================================================================
// Network-level machinery: the impulsive jump map, the one-period step
// matrix, the coupling-strength bound, stability analysis of the per-mode
// blocks, and trajectory simulation (static graph, consensus-limit coupling,
// and per-period switching graphs).
// ============================================================================

#include "impsync/deadbeat.hpp"
#include "impsync/eig.hpp"
#include "impsync/errors.hpp"
#include "impsync/expm.hpp"
#include "impsync/graph.hpp"
#include "impsync/mat.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace impsync {

// ----------------------------------------------------------------------------
// Coupling-strength policy
// ----------------------------------------------------------------------------

/// How the impulse strength mu is chosen for a run.
///  - explicit_value: use `value` as given (zero is allowed; it disables the
///    coupling and is useful as a negative control).
///  - auto_scaled: safety * analytic bound, rejected when the bound is not
///    positive (then any positive mu already works and the caller should say
///    which one).
///  - infinite: the limit case; the jump averages the network exactly onto
///    the consensus direction.
struct MuPolicy {
    enum class Mode { explicit_value, auto_scaled, infinite };

    Mode mode = Mode::auto_scaled;
    double value = 0.0;
    double safety = 1.05;

    static MuPolicy explicit_mu(double v) {
        if (!(v >= 0.0)) throw dimension_error("MuPolicy: explicit mu must be >= 0");
        MuPolicy p;
        p.mode = Mode::explicit_value;
        p.value = v;
        return p;
    }

    static MuPolicy auto_mu(double safety = 1.05) {
        if (!(safety > 1.0)) throw dimension_error("MuPolicy: safety factor must exceed 1");
        MuPolicy p;
        p.mode = Mode::auto_scaled;
        p.safety = safety;
        return p;
    }

    static MuPolicy infinite_mu() {
        MuPolicy p;
        p.mode = Mode::infinite;
        return p;
    }
};

// ----------------------------------------------------------------------------
// Jump and step matrices
// ----------------------------------------------------------------------------

/// Exact impulse response exp(-mu * kron(Gamma, BK)) in closed form.
/// Because BK is a projection, every power kron(Gamma, BK)^j with j >= 1
/// equals kron(Gamma^j, BK), so the series collapses to
///   I + kron(exp(-Gamma mu) - I, BK).
inline Mat impulse_jump(const Mat& gamma, double mu, const DeadbeatDesign& d) {
    if (!gamma.square()) throw dimension_error("impulse_jump: Laplacian must be square");
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw dimension_error("impulse_jump: mu must be finite and >= 0");
    const Mat bk2 = d.bk * d.bk;
    if (max_abs_diff(bk2, d.bk) > 1e-9)
        throw numeric_error("impulse_jump: BK is not a projection to tolerance");
    const std::size_t q = gamma.rows();
    Mat e = expm(gamma * cxd(-mu, 0.0));
    e -= Mat::identity(q);
    Mat jump = kron(e, d.bk);
    jump += Mat::identity(q * d.n);
    return jump;
}

/// One-period boundary map for a static graph and finite mu:
///   Phi = kron(exp(-Gamma mu), exp(AT)) + kron(I - exp(-Gamma mu), M).
inline Mat step_matrix(const Mat& gamma, double mu, const DeadbeatDesign& d) {
    if (!gamma.square()) throw dimension_error("step_matrix: Laplacian must be square");
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw dimension_error("step_matrix: mu must be finite and >= 0");
    const std::size_t q = gamma.rows();
    const Mat e = expm(gamma * cxd(-mu, 0.0));
    Mat rest = Mat::identity(q);
    rest -= e;
    return kron(e, d.exp_at) + kron(rest, d.M);
}

/// One-period boundary map in the infinite-mu limit, where exp(-Gamma mu)
/// tends to the rank-one averaging projection 1 * ell (ell the normalized
/// left null row of Gamma):
///   Phi_inf = kron(1 ell, exp(AT)) + kron(I - 1 ell, M).
inline Mat step_matrix_consensus(const Mat& ell, const DeadbeatDesign& d) {
    if (ell.rows() != 1) throw dimension_error("step_matrix_consensus: ell must be a row");
    const std::size_t q = ell.cols();
    Mat avg(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) avg(i, j) = ell(0, j);
    Mat rest = Mat::identity(q);
    rest -= avg;
    return kron(avg, d.exp_at) + kron(rest, d.M);
}

// ----------------------------------------------------------------------------
// Analytic coupling bound and per-mode blocks
// ----------------------------------------------------------------------------

/// Smallest coupling strength certified by the geometric-series argument:
///   mu* = ln(||BK exp(AT)|| * sum_{k<n} ||N||^k) / Re(lambda2).
/// A non-positive result means every positive mu is already certified.
/// ||N|| is cross-checked against ||M||; the two are unitarily similar.
inline double mu_bound(const DeadbeatDesign& d, cxd lambda2) {
    if (!(lambda2.real() > 0.0))
        throw dimension_error("mu_bound: lambda2 must have positive real part");
    const double norm_n = two_norm(d.N);
    const double norm_m = two_norm(d.M);
    if (std::abs(norm_n - norm_m) > 1e-9 * std::max(1.0, norm_m))
        throw numeric_error("mu_bound: ||N|| and ||M|| disagree beyond tolerance");
    double series = 0.0;
    double pw = 1.0;
    for (std::size_t k = 0; k < d.n; ++k) {
        series += pw;
        pw *= norm_n;
    }
    const double gain = two_norm(d.bk_exp_at);
    return std::log(gain * series) / lambda2.real();
}

/// Per-mode boundary blocks D_i = M + exp(-lambda_i mu) BK exp(AT), one for
/// each Laplacian eigenvalue off the origin. Synchronization of the network
/// is equivalent to every D_i being Schur stable.
inline std::vector<Mat> diagonal_blocks(const DeadbeatDesign& d, const SpectrumSummary& spectrum,
                                        double mu, double origin_tol) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw dimension_error("diagonal_blocks: mu must be finite and >= 0");
    std::vector<Mat> blocks;
    for (const cxd lam : spectrum.eigenvalues) {
        if (std::abs(lam) <= origin_tol) continue;
        Mat block = d.bk_exp_at * std::exp(-lam * mu);
        block += d.M;
        blocks.push_back(std::move(block));
    }
    return blocks;
}

// ----------------------------------------------------------------------------
// Analysis report
// ----------------------------------------------------------------------------

/// Everything the stability analysis produces for one (system, graph, mu)
/// triple. `synchronous` is the headline verdict: spanning tree present and
/// every per-mode block strictly Schur stable (spectral radius < 1 - 1e-9).
struct AnalysisReport {
    bool spanning_tree = false;
    std::optional<cxd> lambda2;
    std::optional<double> mu_bound; // present iff spanning tree and q >= 2
    double norm_bk_exp_at = 0.0;
    double norm_n = 0.0;
    double resolved_mu = 0.0; // +inf under the infinite policy
    bool mu_infinite = false;
    std::vector<double> block_radii;
    double phi_radius = 0.0; // max of block_radii, 0 when none
    bool synchronous = false;
};

/// Turns a policy into a concrete mu, given the analytic bound (when known).
inline double resolve_mu(const MuPolicy& policy, std::optional<double> bound) {
    switch (policy.mode) {
        case MuPolicy::Mode::explicit_value:
            return policy.value;
        case MuPolicy::Mode::infinite:
            return std::numeric_limits<double>::infinity();
        case MuPolicy::Mode::auto_scaled:
            if (!bound.has_value())
                throw numeric_error("resolve_mu: auto mu needs a spanning tree");
            if (!(*bound > 0.0))
                throw numeric_error(
                    "resolve_mu: analytic bound is not positive, any positive mu works; "
                    "pass an explicit mu instead");
            return policy.safety * *bound;
    }
    throw numeric_error("resolve_mu: unreachable");
}

inline AnalysisReport analyze(const DeadbeatDesign& d, const LaplacianSpectrum& spec,
                              const MuPolicy& policy) {
    AnalysisReport rep;
    rep.spanning_tree = spec.spanning_tree;
    rep.lambda2 = spec.lambda2;
    rep.norm_bk_exp_at = two_norm(d.bk_exp_at);
    rep.norm_n = two_norm(d.N);
    if (spec.lambda2.has_value()) rep.mu_bound = mu_bound(d, *spec.lambda2);

    rep.resolved_mu = resolve_mu(policy, rep.mu_bound);
    rep.mu_infinite = std::isinf(rep.resolved_mu);

    const std::size_t q = spec.gamma.rows();
    const double origin_tol = 1e-9 * two_norm(spec.gamma);
    if (rep.mu_infinite) {
        // Each block degenerates to the nilpotent M: radius exactly zero.
        rep.block_radii.assign(q >= 1 ? q - 1 : 0, 0.0);
    } else {
        for (const Mat& block : diagonal_blocks(d, spec.spectrum, rep.resolved_mu, origin_tol))
            rep.block_radii.push_back(spectral_radius(block));
    }
    rep.phi_radius = 0.0;
    for (const double r : rep.block_radii) rep.phi_radius = std::max(rep.phi_radius, r);
    rep.synchronous = rep.spanning_tree && rep.phi_radius < 1.0 - 1e-9;
    return rep;
}

// ----------------------------------------------------------------------------
// Simulation
// ----------------------------------------------------------------------------

/// A fully assembled run: agents, design, one Laplacian per period (a single
/// entry means the graph is static; a short list under time_varying repeats
/// its last entry), the coupling policy, stacked initial state, and the
/// sampling density.
struct NetworkRun {
    AgentSystem sys;
    DeadbeatDesign design;
    std::vector<Mat> gammas;
    bool time_varying = false;
    MuPolicy mu;
    Mat x0; // (q*n) x 1, real
    std::size_t periods = 1;
    std::size_t samples_per_period = 1;
};

/// One sampled time point of the full network state. Boundary samples carry
/// tag "-" (end of the flow, before the impulse) or "+" (after the impulse);
/// interior samples carry the empty tag. `k` is the period index the sample
/// belongs to: a "-" sample at t = (k+1)T has index k+1, matching the
/// convention that the boundary sequence x[k] is the post-impulse state.
struct TrajectorySample {
    std::size_t k = 0;
    double t = 0.0;
    std::string tag;
    Mat state; // (q*n) x 1, real
    double disagreement = 0.0;
};

/// Simulation output: dense samples, the post-impulse boundary states x[k],
/// the disagreement at each boundary, and (for infinite mu on a static
/// graph) the predicted common trajectory value exp(AnT) * sum_j ell_j x_j[0]
/// that every agent reaches after n periods.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<Mat> boundary_states;          // size periods + 1
    std::vector<double> per_period_disagreement; // size periods + 1
    std::optional<std::vector<double>> consensus; // length n
};

/// Largest pairwise Euclidean distance between agent states inside a stacked
/// vector. Zero exactly at synchronization.
inline double disagreement(const Mat& x, std::size_t q, std::size_t n) {
    if (x.cols() != 1 || x.rows() != q * n)
        throw dimension_error("disagreement: expected a (q*n) x 1 state");
    double worst = 0.0;
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = i + 1; j < q; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const cxd diff = x(i * n + r, 0) - x(j * n + r, 0);
                acc += std::norm(diff);
            }
            worst = std::max(worst, std::sqrt(acc));
        }
    return worst;
}

namespace detail {

/// Applies the same n x n flow matrix to every agent block of a stacked
/// state; equivalent to kron(I_q, f) * x without forming the product.
inline Mat apply_blockwise(const Mat& f, const Mat& x, std::size_t q) {
    const std::size_t n = f.rows();
    Mat out(q * n, 1);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
            cxd acc{};
            for (std::size_t c = 0; c < n; ++c) acc += f(r, c) * x(i * n + c, 0);
            out(i * n + r, 0) = acc;
        }
    }
    return out;
}

inline void validate_run(const NetworkRun& run) {
    if (run.gammas.empty()) throw dimension_error("simulate: need at least one Laplacian");
    const std::size_t q = run.gammas.front().rows();
    for (const Mat& g : run.gammas)
        if (!g.square() || g.rows() != q)
            throw dimension_error("simulate: all Laplacians must be q x q");
    if (run.x0.cols() != 1 || run.x0.rows() != q * run.sys.n)
        throw dimension_error("simulate: x0 must be (q*n) x 1");
    if (run.x0.max_imag() != 0.0) throw dimension_error("simulate: x0 must be real");
    if (run.periods == 0) throw dimension_error("simulate: periods must be >= 1");
    if (run.samples_per_period == 0)
        throw dimension_error("simulate: samples_per_period must be >= 1");
    if (run.time_varying && run.mu.mode != MuPolicy::Mode::infinite)
        throw dimension_error("simulate: switching graphs require the infinite mu policy");
    if (!run.time_varying && run.gammas.size() != 1)
        throw dimension_error("simulate: a static run takes exactly one Laplacian");
}

/// Shared sampling loop. `steps[k]` must map x[k] to x[k+1].
inline Trajectory run_sampling(const NetworkRun& run, const std::vector<Mat>& steps) {
    const std::size_t q = run.gammas.front().rows();
    const std::size_t n = run.sys.n;
    const std::size_t S = run.samples_per_period;
    const Mat flow_step = expm(run.sys.A * cxd(run.sys.T / static_cast<double>(S), 0.0));

    Trajectory traj;
    traj.samples.reserve(1 + run.periods * (S + 1));
    traj.boundary_states.reserve(run.periods + 1);

    Mat x = run.x0;
    traj.boundary_states.push_back(x);
    traj.per_period_disagreement.push_back(disagreement(x, q, n));
    traj.samples.push_back({0, 0.0, "+", x, traj.per_period_disagreement.back()});

    for (std::size_t k = 0; k < run.periods; ++k) {
        const double t0 = static_cast<double>(k) * run.sys.T;
        Mat cum = flow_step;
        for (std::size_t s = 1; s < S; ++s) {
            Mat xs = apply_blockwise(cum, x, q);
            const double ts = t0 + static_cast<double>(s) * run.sys.T / static_cast<double>(S);
            traj.samples.push_back({k, ts, "", std::move(xs), 0.0});
            traj.samples.back().disagreement = disagreement(traj.samples.back().state, q, n);
            cum = cum * flow_step;
        }
        // End of the flow, just before the impulse. The design's exp(AT) is
        // authoritative here; the accumulated flow_step powers are only used
        // for interior samples.
        Mat x_minus = apply_blockwise(run.design.exp_at, x, q);
        const double t1 = t0 + run.sys.T;
        traj.samples.push_back({k + 1, t1, "-", x_minus, disagreement(x_minus, q, n)});

        x = steps[k] * x;
        traj.boundary_states.push_back(x);
        traj.per_period_disagreement.push_back(disagreement(x, q, n));
        traj.samples.push_back({k + 1, t1, "+", x, traj.per_period_disagreement.back()});
    }
    return traj;
}

} // namespace detail

/// Simulates the network over `periods` impulse periods and returns the
/// sampled trajectory. Static graphs accept any mu policy; switching graphs
/// require the infinite policy (period k uses gammas[k], with the last entry
/// repeating when the list is shorter than the horizon).
inline Trajectory simulate(const NetworkRun& run) {
    detail::validate_run(run);
    const std::size_t q = run.gammas.front().rows();
    const std::size_t n = run.sys.n;

    std::vector<Mat> steps;
    steps.reserve(run.periods);
    std::optional<std::vector<double>> consensus;

    if (!run.time_varying) {
        const LaplacianSpectrum spec = analyze_spectrum(run.gammas.front());
        if (!spec.spanning_tree)
            throw spanning_tree_error("simulate: the coupling graph has no spanning tree");
        std::optional<double> bound;
        if (spec.lambda2) bound = mu_bound(run.design, *spec.lambda2);
        const double mu = resolve_mu(run.mu, bound);
        Mat phi = std::isinf(mu) ? step_matrix_consensus(*spec.ell, run.design)
                                 : step_matrix(run.gammas.front(), mu, run.design);
        if (std::isinf(mu)) {
            // Predicted common state after n periods: exp(AnT) applied to the
            // ell-weighted average of the initial agent states.
            Mat avg(n, 1);
            for (std::size_t j = 0; j < q; ++j)
                for (std::size_t r = 0; r < n; ++r)
                    avg(r, 0) += (*spec.ell)(0, j) * run.x0(j * n + r, 0);
            Mat common = mat_pow(run.design.exp_at, n) * avg;
            std::vector<double> vals(n);
            for (std::size_t r = 0; r < n; ++r) vals[r] = common(r, 0).real();
            consensus = std::move(vals);
        }
        steps.assign(run.periods, phi);
    } else {
        // Switching graphs: reuse each distinct Laplacian's consensus step.
        std::vector<Mat> per_graph;
        per_graph.reserve(run.gammas.size());
        for (const Mat& g : run.gammas) {
            const LaplacianSpectrum spec = analyze_spectrum(g);
            if (!spec.spanning_tree)
                throw spanning_tree_error("simulate: a switching graph lacks a spanning tree");
            per_graph.push_back(step_matrix_consensus(*spec.ell, run.design));
        }
        for (std::size_t k = 0; k < run.periods; ++k)
            steps.push_back(per_graph[std::min(k, per_graph.size() - 1)]);
    }

    Trajectory traj = detail::run_sampling(run, steps);
    traj.consensus = std::move(consensus);
    return traj;
}

// ----------------------------------------------------------------------------
// Narrow-pulse validation of the impulsive model
// ----------------------------------------------------------------------------

/// Integrates dy/dt = p_eps(t) * m * y over [0, eps] with a raised-cosine
/// unit-mass pulse p_eps(t) = (1 - cos(2 pi t / eps)) / eps, starting from
/// the identity, with classical RK4. As eps shrinks this approximates the
/// ideal impulse, whose exact response is expm(m); the result is a numeric
/// check that the jump map is the right idealization.
inline Mat dirac_pulse_response(const Mat& m, double eps, std::size_t steps = 2000) {
    if (!m.square()) throw dimension_error("dirac_pulse_response: matrix must be square");
    if (!(eps > 0.0)) throw dimension_error("dirac_pulse_response: eps must be positive");
    if (steps < 1000) throw dimension_error("dirac_pulse_response: need at least 1000 steps");

    const double h = eps / static_cast<double>(steps);
    const double two_pi = 2.0 * 3.14159265358979323846;
    auto pulse = [&](double t) { return (1.0 - std::cos(two_pi * t / eps)) / eps; };

    Mat y = Mat::identity(m.rows());
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * h;
        Mat k1 = (m * y) * cxd(pulse(t), 0.0);
        Mat y2 = y;
        y2 += k1 * cxd(0.5 * h, 0.0);
        Mat k2 = (m * y2) * cxd(pulse(t + 0.5 * h), 0.0);
        Mat y3 = y;
        y3 += k2 * cxd(0.5 * h, 0.0);
        Mat k3 = (m * y3) * cxd(pulse(t + 0.5 * h), 0.0);
        Mat y4 = y;
        y4 += k3 * cxd(h, 0.0);
        Mat k4 = (m * y4) * cxd(pulse(t + h), 0.0);

        Mat incr = k1;
        incr += k2 * cxd(2.0, 0.0);
        incr += k3 * cxd(2.0, 0.0);
        incr += k4;
        y += incr * cxd(h / 6.0, 0.0);
    }
    return y;
}

} // namespace impsync
