// ============================================================================
// End-to-end checks of the command-line driver: artifacts, determinism and
// the exit-code contract. Each test spawns the real binary.
// ============================================================================

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(IMPSYNC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << content;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (const char c : text)
        if (c == '\n') ++n;
    return n;
}

std::string seeded_pair_spec(unsigned seed) {
    std::ostringstream os;
    os << R"({"version": "v1",)"
       << R"( "system": {"A": [0, -1, 1, 0], "B": [1, 0], "T": 1.5707963267948966},)"
       << R"( "graph": {"q": 2, "weights": [0, 1, 1, 0]},)"
       << R"( "mu": {"mode": "explicit", "value": 1.0},)"
       << R"( "x0": {"seed": )" << seed << "},"
       << R"( "periods": 4, "samples_per_period": 3,)"
       << R"( "outputs": {"report_path": "r.json", "trajectory_path": "t.csv"}})";
    return os.str();
}

} // namespace

TEST_CASE("demo run produces the expected artifacts", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_demo_");
    REQUIRE(run_cli("run --demo lc --quiet --out-dir " + dir) == 0);

    const std::string report = slurp(dir + "/lc_report.json");
    REQUIRE(report.find("\"synchronous\": true") != std::string::npos);
    REQUIRE(report.find("\"spanning_tree\": true") != std::string::npos);
    REQUIRE(report.find("\"version\": \"v1\"") != std::string::npos);

    // header plus one row per agent per sampled time point
    const std::string csv = slurp(dir + "/lc_trajectory.csv");
    REQUIRE(count_lines(csv) == 1 + 2 * (1 + 8 * (40 + 1)));
    REQUIRE(csv.rfind("k,t,tag,agent,x1,x2,d\n", 0) == 0);
}

TEST_CASE("identical runs are byte-identical", "[cli]") {
    const std::string d1 = testutil::make_temp_dir("impsync_cli_det1_");
    const std::string d2 = testutil::make_temp_dir("impsync_cli_det2_");
    REQUIRE(run_cli("run --demo lc --quiet --out-dir " + d1) == 0);
    REQUIRE(run_cli("run --demo lc --quiet --out-dir " + d2) == 0);
    REQUIRE(slurp(d1 + "/lc_report.json") == slurp(d2 + "/lc_report.json"));
    REQUIRE(slurp(d1 + "/lc_trajectory.csv") == slurp(d2 + "/lc_trajectory.csv"));
}

TEST_CASE("seeded initial states reproduce and differ across seeds", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_seed_");
    spit(dir + "/s7.json", seeded_pair_spec(7));
    spit(dir + "/s7b.json", seeded_pair_spec(7));
    spit(dir + "/s8.json", seeded_pair_spec(8));

    const std::string da = testutil::make_temp_dir("impsync_cli_seed_a_");
    const std::string db = testutil::make_temp_dir("impsync_cli_seed_b_");
    const std::string dc = testutil::make_temp_dir("impsync_cli_seed_c_");
    REQUIRE(run_cli("run " + dir + "/s7.json --quiet --out-dir " + da) == 0);
    REQUIRE(run_cli("run " + dir + "/s7b.json --quiet --out-dir " + db) == 0);
    REQUIRE(run_cli("run " + dir + "/s8.json --quiet --out-dir " + dc) == 0);

    REQUIRE(slurp(da + "/r.json") == slurp(db + "/r.json"));
    REQUIRE(slurp(da + "/r.json") != slurp(dc + "/r.json"));
    REQUIRE(count_lines(slurp(da + "/t.csv")) == 1 + 2 * (1 + 4 * (3 + 1)));
}

TEST_CASE("design subcommand emits the controller report", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_design_");
    REQUIRE(run_cli("design --demo lc --quiet --out-dir " + dir) == 0);
    const std::string report = slurp(dir + "/lc_report.json");
    REQUIRE(report.find("\"K\": ") != std::string::npos);
    REQUIRE(report.find("\"mu_bound\": ") != std::string::npos);
    REQUIRE(report.find("\"trajectory\"") == std::string::npos);
}

TEST_CASE("malformed input exits with code 2", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_bad_");

    SECTION("missing file") { REQUIRE(run_cli("run " + dir + "/absent.json") == 2); }
    SECTION("no spec and no demo") { REQUIRE(run_cli("run") == 2); }
    SECTION("broken json") {
        spit(dir + "/broken.json", "{nope");
        REQUIRE(run_cli("run " + dir + "/broken.json") == 2);
    }
    SECTION("unknown key") {
        std::string s = seeded_pair_spec(1);
        s.insert(1, "\"mystery\": 1, ");
        spit(dir + "/unknown.json", s);
        REQUIRE(run_cli("run " + dir + "/unknown.json") == 2);
    }
    SECTION("wrong x0 length") {
        std::string s = seeded_pair_spec(1);
        const auto pos = s.find("{\"seed\": 1}");
        s.replace(pos, std::string("{\"seed\": 1}").size(), "[1, 2, 3]");
        spit(dir + "/badx0.json", s);
        REQUIRE(run_cli("run " + dir + "/badx0.json") == 2);
    }
}

TEST_CASE("uncontrollable agents exit with code 3", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_ctrb_");
    spit(dir + "/spec.json", R"({"version": "v1",
        "system": {"A": [0, 0, 0, 0], "B": [1, 0], "T": 1.0},
        "graph": {"q": 2, "weights": [0, 1, 1, 0]},
        "mu": {"mode": "explicit", "value": 1.0},
        "x0": {"seed": 1}, "periods": 2})");
    REQUIRE(run_cli("run " + dir + "/spec.json") == 3);
}

TEST_CASE("graphs without a spanning tree exit with code 4", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_tree_");
    spit(dir + "/spec.json", R"({"version": "v1",
        "system": {"A": [0, -1, 1, 0], "B": [1, 0], "T": 1.5707963267948966},
        "graph": {"q": 2, "weights": [0, 0, 0, 0]},
        "mu": {"mode": "explicit", "value": 1.0},
        "x0": {"seed": 1}, "periods": 2})");
    REQUIRE(run_cli("run " + dir + "/spec.json") == 4);
}

TEST_CASE("numerically unusable requests exit with code 5", "[cli]") {
    // stable scalar agents: the analytic bound is negative, so requesting an
    // automatic strength cannot be honored
    const std::string dir = testutil::make_temp_dir("impsync_cli_num_");
    spit(dir + "/spec.json", R"({"version": "v1",
        "system": {"A": [-1], "B": [1], "T": 1.0},
        "graph": {"q": 2, "weights": [0, 1, 1, 0]},
        "mu": {"mode": "auto"},
        "x0": {"seed": 1}, "periods": 2})");
    REQUIRE(run_cli("run " + dir + "/spec.json") == 5);
}

TEST_CASE("switching specs run through the sequence schema", "[cli]") {
    const std::string dir = testutil::make_temp_dir("impsync_cli_switch_");
    spit(dir + "/spec.json", R"({"version": "v1",
        "system": {"A": [0, -1, 1, 0], "B": [1, 0], "T": 1.5707963267948966},
        "graph_sequence": [
            {"q": 2, "weights": [0, 1, 1, 0]},
            {"q": 2, "weights": [0, 0, 2, 0]}
        ],
        "mu": {"mode": "infinite"},
        "x0": [1, 0, -1, 0], "periods": 4, "samples_per_period": 2,
        "outputs": {"report_path": "r.json"}})");
    REQUIRE(run_cli("run " + dir + "/spec.json --quiet --out-dir " + dir) == 0);
    const std::string report = slurp(dir + "/r.json");
    REQUIRE(report.find("\"time_varying\": true") != std::string::npos);
    REQUIRE(report.find("\"infinite\": true") != std::string::npos);

    // a finite strength with a graph sequence is a contract violation
    spit(dir + "/bad.json", R"({"version": "v1",
        "system": {"A": [0, -1, 1, 0], "B": [1, 0], "T": 1.5707963267948966},
        "graph_sequence": [{"q": 2, "weights": [0, 1, 1, 0]}],
        "mu": {"mode": "explicit", "value": 1.0},
        "x0": [1, 0, -1, 0], "periods": 2})");
    REQUIRE(run_cli("run " + dir + "/bad.json") == 2);
}
