#pragma once

// ============================================================================
// Run specifications: the JSON contract for driving a full design + analysis
// + simulation from data, and its execution.
//
// Schema (version "v1"):
//   {
//     "version": "v1",
//     "system": {"A": [n*n row-major], "B": [n], "T": period},
//     "graph": {"q": q, "weights": [q*q row-major, nonnegative, zero diag]},
//       or "graph_sequence": [graph, ...]   (one per period, last repeats)
//     "mu": {"mode": "explicit", "value": v}
//        or {"mode": "auto", "safety": s}     (s > 1, default 1.05)
//        or {"mode": "infinite"},
//     "x0": [q*n values] or {"seed": u64},
//     "periods": count,
//     "samples_per_period": count,          (optional, default 20)
//     "outputs": {"trajectory_path": "...", "report_path": "..."}  (optional)
//   }
// Seeded initial states draw q*n values uniformly from [-1, 1) through a
// fixed generator mapping, so a seed reproduces bit-identically everywhere.
// ============================================================================

#include "impsync/deadbeat.hpp"
#include "impsync/errors.hpp"
#include "impsync/graph.hpp"
#include "impsync/mat.hpp"
#include "impsync/sync.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace impsync {

struct RunSpec {
    std::vector<double> A; // n*n row-major
    std::vector<double> B; // n
    double T = 0.0;
    std::vector<CouplingGraph> graphs;
    bool time_varying = false;
    MuPolicy mu;
    std::optional<std::vector<double>> x0_values;
    std::optional<std::uint64_t> x0_seed;
    std::size_t periods = 1;
    std::size_t samples_per_period = 20;
    std::optional<std::string> trajectory_path;
    std::optional<std::string> report_path;
};

namespace detail {

using json = nlohmann::json;

inline const json& need(const json& j, const char* key, const char* where) {
    const auto it = j.find(key);
    if (it == j.end())
        throw dimension_error(std::string(where) + ": missing key '" + key + "'");
    return *it;
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw dimension_error(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

inline double need_number(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_number())
        throw dimension_error(std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

inline std::size_t need_count(const json& j, const char* key, const char* where,
                              std::size_t max_value) {
    const json& v = need(j, key, where);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
        throw dimension_error(std::string(where) + ": '" + key + "' must be a positive integer");
    const std::uint64_t c = v.get<std::uint64_t>();
    if (c > max_value)
        throw dimension_error(std::string(where) + ": '" + key + "' exceeds the supported limit");
    return static_cast<std::size_t>(c);
}

inline std::vector<double> need_real_array(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_array())
        throw dimension_error(std::string(where) + ": '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number())
            throw dimension_error(std::string(where) + ": '" + key +
                                  "' must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

inline CouplingGraph parse_graph(const json& j, const char* where) {
    if (!j.is_object()) throw dimension_error(std::string(where) + ": must be an object");
    reject_unknown(j, {"q", "weights"}, where);
    const std::size_t q = need_count(j, "q", where, 64);
    std::vector<double> w = need_real_array(j, "weights", where);
    if (w.size() != q * q)
        throw dimension_error(std::string(where) + ": weights must hold q*q entries");
    return CouplingGraph(q, std::move(w));
}

inline MuPolicy parse_mu(const json& j) {
    if (!j.is_object()) throw dimension_error("spec.mu: must be an object");
    const json& m = need(j, "mode", "spec.mu");
    if (!m.is_string()) throw dimension_error("spec.mu: 'mode' must be a string");
    const std::string mode = m.get<std::string>();
    if (mode == "explicit") {
        reject_unknown(j, {"mode", "value"}, "spec.mu");
        const double v = need_number(j, "value", "spec.mu");
        if (!(v >= 0.0) || !std::isfinite(v))
            throw dimension_error("spec.mu: explicit value must be finite and >= 0");
        return MuPolicy::explicit_mu(v);
    }
    if (mode == "auto") {
        reject_unknown(j, {"mode", "safety"}, "spec.mu");
        double safety = 1.05;
        if (j.contains("safety")) safety = need_number(j, "safety", "spec.mu");
        if (!(safety > 1.0) || !std::isfinite(safety))
            throw dimension_error("spec.mu: safety must be finite and > 1");
        return MuPolicy::auto_mu(safety);
    }
    if (mode == "infinite") {
        reject_unknown(j, {"mode"}, "spec.mu");
        return MuPolicy::infinite_mu();
    }
    throw dimension_error("spec.mu: mode must be 'explicit', 'auto' or 'infinite'");
}

} // namespace detail

inline RunSpec parse_run_spec_text(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::exception& e) {
        throw dimension_error(std::string("spec: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw dimension_error("spec: top level must be an object");
    detail::reject_unknown(j,
                           {"version", "system", "graph", "graph_sequence", "mu", "x0", "periods",
                            "samples_per_period", "outputs"},
                           "spec");

    const detail::json& ver = detail::need(j, "version", "spec");
    if (!ver.is_string() || ver.get<std::string>() != "v1")
        throw dimension_error("spec: unsupported version, expected \"v1\"");

    RunSpec spec;

    const detail::json& sys = detail::need(j, "system", "spec");
    if (!sys.is_object()) throw dimension_error("spec.system: must be an object");
    detail::reject_unknown(sys, {"A", "B", "T"}, "spec.system");
    spec.B = detail::need_real_array(sys, "B", "spec.system");
    if (spec.B.empty()) throw dimension_error("spec.system: B must not be empty");
    spec.A = detail::need_real_array(sys, "A", "spec.system");
    if (spec.A.size() != spec.B.size() * spec.B.size())
        throw dimension_error("spec.system: A must hold n*n entries for n = len(B)");
    spec.T = detail::need_number(sys, "T", "spec.system");
    if (!(spec.T > 0.0) || !std::isfinite(spec.T))
        throw dimension_error("spec.system: T must be finite and positive");

    const bool has_static = j.contains("graph");
    const bool has_sequence = j.contains("graph_sequence");
    if (has_static == has_sequence)
        throw dimension_error("spec: provide exactly one of 'graph' and 'graph_sequence'");
    if (has_static) {
        spec.graphs.push_back(detail::parse_graph(j["graph"], "spec.graph"));
    } else {
        const detail::json& seq = j["graph_sequence"];
        if (!seq.is_array() || seq.empty())
            throw dimension_error("spec.graph_sequence: must be a non-empty array");
        for (const detail::json& g : seq)
            spec.graphs.push_back(detail::parse_graph(g, "spec.graph_sequence"));
        for (const CouplingGraph& g : spec.graphs)
            if (g.q != spec.graphs.front().q)
                throw dimension_error("spec.graph_sequence: all graphs must share q");
        spec.time_varying = true;
    }

    spec.mu = detail::parse_mu(detail::need(j, "mu", "spec"));

    const std::size_t q = spec.graphs.front().q;
    const std::size_t n = spec.B.size();
    const detail::json& x0 = detail::need(j, "x0", "spec");
    if (x0.is_array()) {
        std::vector<double> vals = detail::need_real_array(j, "x0", "spec");
        if (vals.size() != q * n)
            throw dimension_error("spec.x0: expected q*n values");
        spec.x0_values = std::move(vals);
    } else if (x0.is_object()) {
        detail::reject_unknown(x0, {"seed"}, "spec.x0");
        const detail::json& s = detail::need(x0, "seed", "spec.x0");
        if (!s.is_number_unsigned())
            throw dimension_error("spec.x0: seed must be a non-negative integer");
        spec.x0_seed = s.get<std::uint64_t>();
    } else {
        throw dimension_error("spec.x0: must be an array of values or {\"seed\": u64}");
    }

    spec.periods = detail::need_count(j, "periods", "spec", 1000000);
    if (j.contains("samples_per_period"))
        spec.samples_per_period = detail::need_count(j, "samples_per_period", "spec", 100000);

    if (j.contains("outputs")) {
        const detail::json& o = j["outputs"];
        if (!o.is_object()) throw dimension_error("spec.outputs: must be an object");
        detail::reject_unknown(o, {"trajectory_path", "report_path"}, "spec.outputs");
        if (o.contains("trajectory_path")) {
            if (!o["trajectory_path"].is_string())
                throw dimension_error("spec.outputs: trajectory_path must be a string");
            spec.trajectory_path = o["trajectory_path"].get<std::string>();
        }
        if (o.contains("report_path")) {
            if (!o["report_path"].is_string())
                throw dimension_error("spec.outputs: report_path must be a string");
            spec.report_path = o["report_path"].get<std::string>();
        }
    }
    return spec;
}

inline RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dimension_error("spec: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_spec_text(buf.str());
}

inline AgentSystem make_system(const RunSpec& spec) {
    const std::size_t n = spec.B.size();
    std::vector<double> b_col = spec.B;
    return AgentSystem(Mat::real(n, n, spec.A), Mat::real(n, 1, b_col), spec.T);
}

inline std::vector<Mat> make_laplacians(const RunSpec& spec) {
    std::vector<Mat> out;
    out.reserve(spec.graphs.size());
    for (const CouplingGraph& g : spec.graphs) out.push_back(laplacian(g));
    return out;
}

/// Deterministic seeded draw: each coordinate is (rng() >> 11) * 2^-53 mapped
/// onto [-1, 1). Pinned here so the same seed yields the same state on every
/// platform.
inline Mat resolve_x0(const RunSpec& spec, std::size_t q, std::size_t n) {
    std::vector<double> vals;
    if (spec.x0_values.has_value()) {
        vals = *spec.x0_values;
    } else {
        std::mt19937_64 rng(*spec.x0_seed);
        vals.resize(q * n);
        for (double& v : vals) {
            const double u =
                static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0); // [0, 1)
            v = 2.0 * u - 1.0;
        }
    }
    return Mat::real(q * n, 1, vals);
}

/// Everything a caller needs after a full run: the synthesized design, the
/// first graph's spectral summary, the stability report, the resolved
/// initial state and the sampled trajectory.
struct RunOutput {
    AgentSystem sys;
    DeadbeatDesign design;
    LaplacianSpectrum first_graph;
    AnalysisReport analysis;
    Mat x0;
    Trajectory traj;
    bool time_varying = false;
};

inline RunOutput execute(const RunSpec& spec) {
    AgentSystem sys = make_system(spec);
    DeadbeatDesign design = design_deadbeat(sys);
    std::vector<Mat> gammas = make_laplacians(spec);

    LaplacianSpectrum first = analyze_spectrum(gammas.front());
    if (!first.spanning_tree)
        throw spanning_tree_error("run: the coupling graph has no spanning tree");
    for (std::size_t i = 1; i < gammas.size(); ++i)
        if (!analyze_spectrum(gammas[i]).spanning_tree)
            throw spanning_tree_error("run: switching graph " + std::to_string(i) +
                                      " has no spanning tree");

    AnalysisReport analysis = analyze(design, first, spec.mu);

    const std::size_t q = spec.graphs.front().q;
    NetworkRun run{sys,
                   design,
                   std::move(gammas),
                   spec.time_varying,
                   spec.mu,
                   resolve_x0(spec, q, sys.n),
                   spec.periods,
                   spec.samples_per_period};
    Trajectory traj = simulate(run);

    return RunOutput{std::move(sys),      std::move(design), std::move(first),
                     std::move(analysis), std::move(run.x0), std::move(traj),
                     spec.time_varying};
}

/// Built-in demonstration: two harmonic oscillators (an LC-circuit pair)
/// sampled at a quarter turn, symmetric bidirectional coupling, impulse
/// strength 1. The per-mode radius is exp(-1), so the pair synchronizes.
inline std::string lc_demo_text() {
    return R"json({
  "version": "v1",
  "system": {
    "A": [0.0, -1.0, 1.0, 0.0],
    "B": [1.0, 0.0],
    "T": 1.5707963267948966
  },
  "graph": {"q": 2, "weights": [0.0, 1.0, 1.0, 0.0]},
  "mu": {"mode": "explicit", "value": 1.0},
  "x0": [1.0, 0.0, -1.0, 0.0],
  "periods": 8,
  "samples_per_period": 40,
  "outputs": {"trajectory_path": "lc_trajectory.csv", "report_path": "lc_report.json"}
})json";
}

} // namespace impsync
