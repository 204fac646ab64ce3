// ============================================================================
// Deadbeat synthesis: the sampled controllability matrix, the impulse gain,
// the nilpotent closed-loop map and its exact Schur form.
// ============================================================================

#include "helpers.hpp"

#include <impsync/impsync.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using impsync::AgentSystem;
using impsync::cxd;
using impsync::DeadbeatDesign;
using impsync::Mat;
using testutil::Rng;

namespace {

const double kPi = 3.14159265358979323846;

AgentSystem oscillator_pair_agent() {
    return AgentSystem(Mat::real(2, 2, {0, -1, 1, 0}), Mat::real(2, 1, {1, 0}), kPi / 2.0);
}

} // namespace

TEST_CASE("oscillator agent sampled at a quarter turn", "[deadbeat]") {
    const DeadbeatDesign d = impsync::design_deadbeat(oscillator_pair_agent());

    // Hand values: C = I, G = (0, -1), K = (1, 0), M = [[0,0],[1,0]].
    REQUIRE(max_abs_diff(d.C, Mat::identity(2)) < 1e-14);
    REQUIRE(max_abs_diff(d.G, Mat::real(1, 2, {0, -1})) < 1e-14);
    REQUIRE(max_abs_diff(d.K, Mat::real(1, 2, {1, 0})) < 1e-14);
    REQUIRE(max_abs_diff(d.M, Mat::real(2, 2, {0, 0, 1, 0})) < 1e-14);
    REQUIRE(max_abs_diff(d.bk_exp_at, Mat::real(2, 2, {0, -1, 0, 0})) < 1e-14);
    REQUIRE(d.kb == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(max_abs_diff(mat_pow(d.M, 2), Mat::zeros(2, 2)) < 1e-14);
}

TEST_CASE("system validation rejects malformed agents", "[deadbeat]") {
    const Mat a = Mat::real(2, 2, {0, -1, 1, 0});
    const Mat b = Mat::real(2, 1, {1, 0});
    REQUIRE_THROWS_AS(AgentSystem(a, b, 0.0), impsync::dimension_error);
    REQUIRE_THROWS_AS(AgentSystem(a, b, -1.0), impsync::dimension_error);
    REQUIRE_THROWS_AS(AgentSystem(Mat::real(2, 3, {0, 0, 0, 0, 0, 0}), b, 1.0),
                      impsync::dimension_error);
    REQUIRE_THROWS_AS(AgentSystem(a, Mat::real(2, 1, {0, 0}), 1.0),
                      impsync::controllability_error);
}

TEST_CASE("sampling at a full turn loses controllability", "[deadbeat]") {
    // (A, B) is controllable, but exp(A 2 pi) = I makes the sampled input
    // directions coincide, so synthesis must refuse this period.
    const Mat a = Mat::real(2, 2, {0, -1, 1, 0});
    const Mat b = Mat::real(2, 1, {1, 0});
    const AgentSystem sys(a, b, 2.0 * kPi);
    REQUIRE_THROWS_AS(impsync::design_deadbeat(sys), impsync::controllability_error);
}

TEST_CASE("scalar agents close the loop in one period", "[deadbeat]") {
    const AgentSystem sys(Mat::real(1, 1, {-0.7}), Mat::real(1, 1, {2.0}), 0.9);
    const DeadbeatDesign d = impsync::design_deadbeat(sys);
    REQUIRE(d.kb == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(d.K(0, 0) - cxd(0.5, 0)) < 1e-12); // 1/b
    REQUIRE(d.M.max_abs() < 1e-14);
    REQUIRE(d.N.max_abs() == 0.0);
}

TEST_CASE("random designs satisfy the structural identities", "[deadbeat]") {
    Rng rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = testutil::pick(rng, 1, 4);
        const AgentSystem sys = testutil::random_controllable_system(rng, n);
        const DeadbeatDesign d = impsync::design_deadbeat(sys);
        const double scale = std::max(1.0, d.M.max_abs());

        // K B = 1 and B K is a projection.
        REQUIRE(std::abs(d.kb - 1.0) < 1e-9);
        REQUIRE(max_abs_diff(d.bk * d.bk, d.bk) < 1e-9);

        // M = (I - B K) exp(AT), and M^n vanishes.
        Mat closed = Mat::identity(n);
        closed -= d.bk;
        REQUIRE(max_abs_diff(d.M, closed * d.exp_at) < 1e-12 * scale);
        REQUIRE(mat_pow(d.M, n).max_abs() < 1e-8 * std::max(1.0, std::pow(scale, n)));

        // K = G exp(-AT)  <=>  G = K exp(AT).
        REQUIRE(max_abs_diff(d.G, d.K * d.exp_at) < 1e-9 * std::max(1.0, d.G.max_abs()));

        // Exact Schur form of M.
        REQUIRE(max_abs_diff(d.Q.adjoint() * d.Q, Mat::identity(n)) < 1e-10);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) REQUIRE(d.N(i, j) == cxd{});
        REQUIRE(max_abs_diff(d.Q * d.N * d.Q.adjoint(), d.M) < 1e-9 * scale);
    }
}

TEST_CASE("schur form of a fixed nilpotent matrix", "[deadbeat]") {
    const auto [q, n] = impsync::schur_nilpotent(Mat::real(2, 2, {0, 0, 1, 0}));
    REQUIRE(max_abs_diff(q.adjoint() * q, Mat::identity(2)) < 1e-12);
    REQUIRE(n(1, 0) == cxd{});
    REQUIRE(n(0, 0) == cxd{});
    REQUIRE(n(1, 1) == cxd{});
    REQUIRE(std::abs(std::abs(n(0, 1)) - 1.0) < 1e-12);
}

TEST_CASE("schur form handles hidden jordan structure", "[deadbeat]") {
    Rng rng(707);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = testutil::pick(rng, 2, 6);
        const Mat m = testutil::random_nilpotent(rng, n);
        const auto [qm, nm] = impsync::schur_nilpotent(m);
        REQUIRE(max_abs_diff(qm.adjoint() * qm, Mat::identity(n)) < 1e-10);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) REQUIRE(nm(i, j) == cxd{});
        REQUIRE(max_abs_diff(qm * nm * qm.adjoint(), m) < 1e-9 * std::max(1.0, m.max_abs()));
    }
}

TEST_CASE("schur form of the zero matrix is trivial", "[deadbeat]") {
    const auto [q, n] = impsync::schur_nilpotent(Mat::zeros(3, 3));
    REQUIRE(max_abs_diff(q, Mat::identity(3)) == 0.0);
    REQUIRE(n.max_abs() == 0.0);
}

TEST_CASE("schur form rejects matrices that are not nilpotent", "[deadbeat]") {
    REQUIRE_THROWS_AS(impsync::schur_nilpotent(Mat::identity(3)), impsync::numeric_error);
}
