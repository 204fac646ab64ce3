// ============================================================================
// impsync command-line driver.
//
//   impsync run <spec.json>      design + analyze + simulate, write outputs
//   impsync run --demo lc        the built-in oscillator-pair demonstration
//   impsync design <spec.json>   design + graph analysis only
//
// Exit codes: 0 success, 2 malformed input, 3 controllability failure,
// 4 no spanning tree, 5 numerical failure, 1 anything else.
// ============================================================================

#include <impsync/impsync.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

namespace {

/// Joins an output directory with a (possibly relative) artifact path.
std::string in_dir(const std::string& dir, const std::string& name) {
    if (dir.empty() || name.empty() || name.front() == '/') return name;
    if (dir.back() == '/') return dir + name;
    return dir + "/" + name;
}

/// Creates the directory that will hold `path`, if it does not exist yet.
void ensure_parent_dir(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

struct Options {
    std::string spec_path;
    std::string demo;
    std::string out_dir;
    bool quiet = false;
};

impsync::RunSpec load_spec(const Options& opt) {
    if (!opt.demo.empty()) {
        if (opt.demo != "lc")
            throw impsync::dimension_error("unknown demo '" + opt.demo + "', available: lc");
        return impsync::parse_run_spec_text(impsync::lc_demo_text());
    }
    if (opt.spec_path.empty())
        throw impsync::dimension_error("no spec file given (and no --demo selected)");
    return impsync::load_run_spec(opt.spec_path);
}

int do_run(const Options& opt) {
    const impsync::RunSpec spec = load_spec(opt);
    const impsync::RunOutput out = impsync::execute(spec);

    const std::string report = impsync::render_report_json(spec, out);
    if (spec.report_path) {
        const std::string path = in_dir(opt.out_dir, *spec.report_path);
        ensure_parent_dir(path);
        impsync::write_file_atomic(path, report);
        if (!opt.quiet) std::printf("report written to %s\n", path.c_str());
    } else if (!opt.quiet) {
        std::fputs(report.c_str(), stdout);
    }

    if (spec.trajectory_path) {
        const std::string path = in_dir(opt.out_dir, *spec.trajectory_path);
        ensure_parent_dir(path);
        const std::size_t q = spec.graphs.front().q;
        impsync::write_file_atomic(path,
                                   impsync::render_trajectory_csv(out.traj, q, out.sys.n));
        if (!opt.quiet) std::printf("trajectory written to %s\n", path.c_str());
    }

    if (!opt.quiet)
        std::printf("synchronous: %s (phi_radius %.6g, final disagreement %.6g)\n",
                    out.analysis.synchronous ? "yes" : "no", out.analysis.phi_radius,
                    out.traj.per_period_disagreement.back());
    return 0;
}

int do_design(const Options& opt) {
    const impsync::RunSpec spec = load_spec(opt);
    const impsync::AgentSystem sys = impsync::make_system(spec);
    const impsync::DeadbeatDesign design = impsync::design_deadbeat(sys);
    const impsync::LaplacianSpectrum first =
        impsync::analyze_spectrum(impsync::laplacian(spec.graphs.front()));

    const std::string report = impsync::render_design_json(spec, sys, design, first);
    if (spec.report_path) {
        const std::string path = in_dir(opt.out_dir, *spec.report_path);
        ensure_parent_dir(path);
        impsync::write_file_atomic(path, report);
        if (!opt.quiet) std::printf("design written to %s\n", path.c_str());
    } else if (!opt.quiet) {
        std::fputs(report.c_str(), stdout);
    }
    return 0;
}

int guarded(int (*action)(const Options&), const Options& opt) {
    try {
        return action(opt);
    } catch (const impsync::dimension_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const impsync::controllability_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const impsync::spanning_tree_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const impsync::singular_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const impsync::convergence_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const impsync::numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impulsive deadbeat synchronization of identical linear agents"};
    app.require_subcommand(1);

    Options run_opt;
    CLI::App* run = app.add_subcommand("run", "Design, analyze and simulate a network");
    run->add_option("spec", run_opt.spec_path, "Run specification (JSON)");
    run->add_option("--demo", run_opt.demo, "Use a built-in spec instead of a file (lc)");
    run->add_option("--out-dir", run_opt.out_dir, "Directory for output artifacts");
    run->add_flag("--quiet", run_opt.quiet, "Suppress console chatter");

    Options design_opt;
    CLI::App* design = app.add_subcommand("design", "Design the controller and analyze the graph");
    design->add_option("spec", design_opt.spec_path, "Run specification (JSON)");
    design->add_option("--demo", design_opt.demo, "Use a built-in spec instead of a file (lc)");
    design->add_option("--out-dir", design_opt.out_dir, "Directory for output artifacts");
    design->add_flag("--quiet", design_opt.quiet, "Suppress console chatter");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return guarded(do_run, run_opt);
    return guarded(do_design, design_opt);
}
