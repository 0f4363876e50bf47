#include <filesystem>
#include <fstream>
#include <sstream>

#include "aoi/cli.hpp"
#include "aoi/exact_solver.hpp"
#include "aoi/policy_io.hpp"
#include "doctest.h"

using namespace aoi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const char* root = std::getenv("AOI_TEST_TMP");
    fs::path p = fs::path(root ? root : fs::temp_directory_path().string()) / ("cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentSpec tiny2() {
    return parse_spec(R"(num_sensors = 2
num_users = 1
budget = 1
delta_max = 3
battery_capacity = 1
request_prob = 1
harvest_set = 1
policies = exact, rtt, greedy
horizon = 5000
episodes = 3
seed = 7
)");
}

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("solve-exact writes a readable joint policy") {
    const auto dir = scratch("exact");
    cli::Options o;
    o.out_dir = dir.string();
    std::ostringstream out;
    CHECK(cli::solve_exact(tiny2(), o, out) == cli::kExitOk);
    CHECK(out.str().find("average_cost 1.5") != std::string::npos);
    std::ifstream in(dir / "exact_policy.csv");
    const auto pol = read_joint_policy(in);
    CHECK(pol.num_sensors == 2);
    CHECK(pol.budget == 1);
}

TEST_CASE("solve-exact refuses big instances with a hint") {
    auto s = tiny2();
    s.num_sensors = 4;
    s.delta_max = 64;
    s.battery_capacity = 7;
    cli::Options o;
    o.out_dir = scratch("big").string();
    std::ostringstream out;
    try {
        cli::solve_exact(s, o, out);
        FAIL("expected JointSizeError");
    } catch (const JointSizeError& e) {
        CHECK(std::string(e.what()).find("solve-relaxed") != std::string::npos);
    }
}

TEST_CASE("simulate is reproducible byte for byte") {
    const auto a = scratch("sim_a"), b = scratch("sim_b");
    cli::Options oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    std::ostringstream out;
    REQUIRE(cli::simulate(tiny2(), oa, out) == cli::kExitOk);
    REQUIRE(cli::simulate(tiny2(), ob, out) == cli::kExitOk);
    const auto rows = slurp(a / "simulate.csv");
    CHECK(rows == slurp(b / "simulate.csv"));
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(rows.rfind(std::string(cli::kResultHeader) + "\n", 0) == 0);
    CHECK(lines(rows) == 4);
    CHECK(lines(slurp(a / "trace.csv")) == 1 + 3 * 100);

    // rerunning into the same directory replaces the files
    REQUIRE(cli::simulate(tiny2(), oa, out) == cli::kExitOk);
    CHECK(slurp(a / "simulate.csv") == rows);

    cli::Options other = oa;
    other.seed = 8;
    REQUIRE(cli::simulate(tiny2(), other, out) == cli::kExitOk);
    CHECK(slurp(a / "simulate.csv") != rows);
}

TEST_CASE("simulate from stored policy files") {
    const auto dir = scratch("files");
    cli::Options o;
    o.out_dir = dir.string();
    std::ostringstream out;
    REQUIRE(cli::solve_exact(tiny2(), o, out) == cli::kExitOk);
    REQUIRE(cli::solve_relaxed(tiny2(), o, out) == cli::kExitOk);
    const auto fresh = scratch("files_fresh");
    cli::Options f;
    f.out_dir = fresh.string();
    REQUIRE(cli::simulate(tiny2(), f, out) == cli::kExitOk);

    o.policy_file = (dir / "exact_policy.csv").string();
    o.mixed_file = (dir / "mixed_policy.csv").string();
    REQUIRE(cli::simulate(tiny2(), o, out) == cli::kExitOk);
    CHECK(slurp(dir / "simulate.csv") == slurp(fresh / "simulate.csv"));

    o.policy_file = (dir / "missing.csv").string();
    CHECK_THROWS(cli::simulate(tiny2(), o, out));
}

TEST_CASE("sweep writes one row per point and policy") {
    auto s = tiny2();
    s.gamma = 0.5;
    s.budget.reset();
    s.sweep_k = {2, 4};
    s.policies = {"rtt", "greedy"};
    s.horizon = 2000;
    cli::Options o;
    o.out_dir = scratch("sweep").string();
    std::ostringstream out;
    REQUIRE(cli::sweep(s, o, out) == cli::kExitOk);
    const auto text = slurp(fs::path(o.out_dir) / "sweep.csv");
    CHECK(lines(text) == 1 + 4);
    CHECK(text.find(",rtt,4,2,0.5,") != std::string::npos);
}

TEST_CASE("analyze passes on the alternating pair") {
    cli::Options o;
    o.out_dir = scratch("analyze").string();
    std::ostringstream out;
    auto s = tiny2();
    s.horizon = 20000;
    CHECK(cli::analyze(s, o, out) == cli::kExitOk);
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(out.str().find("PASS ordering") != std::string::npos);
    const auto csv = slurp(fs::path(o.out_dir) / "analyze.csv");
    CHECK(csv.rfind("check,result,detail\n", 0) == 0);
}

TEST_CASE("region maps") {
    auto s = tiny2();
    s.num_sensors = 4;
    s.num_users = 3;
    s.delta_max = 16;
    s.battery_capacity = 3;
    s.request_probs = {{0.6}};
    s.harvest_set = {0.05, 0.1};
    cli::Options o;
    o.out_dir = scratch("region").string();
    std::ostringstream out;
    REQUIRE(cli::region_map(s, o, out) == cli::kExitOk);
    // two sensor types, four request counts each
    CHECK(lines(out.str()) == 1 + 8);
    const auto csv = slurp(fs::path(o.out_dir) / "region_k1_r2.csv");
    CHECK(lines(csv) == 1 + 4);
    o.sensor = 9;
    CHECK_THROWS_AS(cli::region_map(s, o, out), ConfigError);
    o.sensor = 0;
    o.table = "middle";
    CHECK_THROWS_AS(cli::region_map(s, o, out), ConfigError);
}
