#pragma once

// ============================================================================
// Deterministic output rendering. Reports and trajectories are written with
// %.17g formatting (shortest round-trippable doubles) and a fixed key order,
// so identical runs produce byte-identical files. Writes go through a
// temp-file rename, never a partially written artifact.
// ============================================================================

#include "impsync/errors.hpp"
#include "impsync/runspec.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace impsync {

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// JSON number, or null for non-finite values.
inline std::string j_num(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt_g17(v);
}

inline std::string j_num(std::optional<double> v) {
    return v.has_value() ? j_num(*v) : std::string("null");
}

inline std::string j_bool(bool b) { return b ? "true" : "false"; }

inline std::string j_arr(const std::vector<double>& vals) {
    std::string s = "[";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) s += ", ";
        s += j_num(vals[i]);
    }
    s += "]";
    return s;
}

inline std::string j_complex(cxd z) {
    return "{\"re\": " + j_num(z.real()) + ", \"im\": " + j_num(z.imag()) + "}";
}

inline std::string j_spectrum(const std::vector<cxd>& eigs) {
    std::string s = "[";
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        if (i) s += ", ";
        s += j_complex(eigs[i]);
    }
    s += "]";
    return s;
}

inline std::string mu_mode_name(const MuPolicy& p) {
    switch (p.mode) {
        case MuPolicy::Mode::explicit_value: return "explicit";
        case MuPolicy::Mode::auto_scaled: return "auto";
        case MuPolicy::Mode::infinite: return "infinite";
    }
    return "explicit";
}

inline std::string render_system_section(const AgentSystem& sys) {
    std::string s = "  \"system\": {";
    s += "\"n\": " + std::to_string(sys.n);
    s += ", \"T\": " + j_num(sys.T);
    s += ", \"A\": " + j_arr(sys.A.real_data());
    s += ", \"B\": " + j_arr(sys.B.real_data());
    s += "}";
    return s;
}

inline std::string render_design_section(const DeadbeatDesign& d) {
    std::string s = "  \"design\": {";
    s += "\"K\": " + j_arr(d.K.real_data());
    s += ", \"G\": " + j_arr(d.G.real_data());
    s += ", \"KB\": " + j_num(d.kb);
    s += ", \"M\": " + j_arr(d.M.real_data());
    s += ", \"norm_N\": " + j_num(two_norm(d.N));
    s += ", \"norm_BK_expAT\": " + j_num(two_norm(d.bk_exp_at));
    s += "}";
    return s;
}

inline std::string render_graph_section(const LaplacianSpectrum& g, std::optional<double> bound,
                                        bool time_varying, std::size_t graph_count) {
    std::string s = "  \"graph\": {";
    s += "\"q\": " + std::to_string(g.gamma.rows());
    s += ", \"time_varying\": " + j_bool(time_varying);
    s += ", \"graph_count\": " + std::to_string(graph_count);
    s += ", \"spanning_tree\": " + j_bool(g.spanning_tree);
    s += ", \"lambda2\": " + (g.lambda2 ? j_complex(*g.lambda2) : std::string("null"));
    s += ", \"eigenvalues\": " + j_spectrum(g.spectrum.eigenvalues);
    s += ", \"mu_bound\": " + j_num(bound);
    s += "}";
    return s;
}

} // namespace detail

/// Full run report. For switching runs the graph and analysis sections
/// describe the first graph; the trajectory section always reflects the
/// actual switched simulation.
inline std::string render_report_json(const RunSpec& spec, const RunOutput& out) {
    using namespace detail;
    const Trajectory& tr = out.traj;

    std::string s = "{\n";
    s += "  \"version\": \"v1\",\n";
    s += render_system_section(out.sys) + ",\n";
    s += render_design_section(out.design) + ",\n";
    s += render_graph_section(out.first_graph, out.analysis.mu_bound, out.time_varying,
                              spec.graphs.size()) +
         ",\n";

    s += "  \"mu\": {";
    s += "\"mode\": \"" + mu_mode_name(spec.mu) + "\"";
    s += ", \"resolved\": " + j_num(out.analysis.resolved_mu);
    s += ", \"infinite\": " + j_bool(out.analysis.mu_infinite);
    s += "},\n";

    s += "  \"analysis\": {";
    s += "\"block_radii\": " + j_arr(out.analysis.block_radii);
    s += ", \"phi_radius\": " + j_num(out.analysis.phi_radius);
    s += ", \"synchronous\": " + j_bool(out.analysis.synchronous);
    s += "},\n";

    s += "  \"x0\": " + j_arr(out.x0.real_data()) + ",\n";

    s += "  \"trajectory\": {";
    s += "\"periods\": " + std::to_string(spec.periods);
    s += ", \"samples_per_period\": " + std::to_string(spec.samples_per_period);
    s += ", \"per_period_disagreement\": " + j_arr(tr.per_period_disagreement);
    s += ", \"final_disagreement\": " + j_num(tr.per_period_disagreement.back());
    s += ", \"consensus\": " + (tr.consensus ? j_arr(*tr.consensus) : std::string("null"));
    s += "}\n";
    s += "}\n";
    return s;
}

/// Design-only report: controller, closed-loop pieces and, when a graph is
/// given, its spectrum and the coupling bound. No simulation fields.
inline std::string render_design_json(const RunSpec& spec, const AgentSystem& sys,
                                      const DeadbeatDesign& d,
                                      const LaplacianSpectrum& first_graph) {
    using namespace detail;
    std::optional<double> bound;
    if (first_graph.lambda2) bound = mu_bound(d, *first_graph.lambda2);

    std::string s = "{\n";
    s += "  \"version\": \"v1\",\n";
    s += render_system_section(sys) + ",\n";
    s += render_design_section(d) + ",\n";
    s += render_graph_section(first_graph, bound, spec.time_varying, spec.graphs.size()) + "\n";
    s += "}\n";
    return s;
}

/// CSV layout: one row per agent per sampled time point, in time order.
/// Columns: period index k, time t, tag ("+" after an impulse, "-" just
/// before one, empty inside the flow), agent (1-based), the n state
/// components, and the network disagreement at that time point (repeated on
/// each agent row). A "-"/"+" pair shares the same t; the "+" row is the
/// boundary state x[k].
inline std::string render_trajectory_csv(const Trajectory& tr, std::size_t q, std::size_t n) {
    using detail::fmt_g17;
    std::string s = "k,t,tag,agent";
    for (std::size_t r = 1; r <= n; ++r) s += ",x" + std::to_string(r);
    s += ",d\n";
    for (const TrajectorySample& smp : tr.samples) {
        for (std::size_t i = 0; i < q; ++i) {
            s += std::to_string(smp.k);
            s += ',' + fmt_g17(smp.t);
            s += ',' + smp.tag;
            s += ',' + std::to_string(i + 1);
            for (std::size_t r = 0; r < n; ++r)
                s += ',' + fmt_g17(smp.state(i * n + r, 0).real());
            s += ',' + fmt_g17(smp.disagreement);
            s += '\n';
        }
    }
    return s;
}

/// Writes content to path via a sibling temp file plus rename, so readers
/// never observe a half-written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("failed while writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("failed to move '" + tmp + "' into place");
}

} // namespace impsync
