#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& cwd = fs::path()) {
    fs::path out = fs::temp_directory_path() / "ssmi_cli_out.txt";
    fs::path err = fs::temp_directory_path() / "ssmi_cli_err.txt";
    std::string cmd;
    if (!cwd.empty()) cmd += "cd '" + cwd.string() + "' && ";
    cmd += std::string(SSMI_BIN) + " " + args + " > '" + out.string() + "' 2> '" +
           err.string() + "'";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = ssmi_test::read_file(out.string());
    r.err = ssmi_test::read_file(err.string());
    return r;
}

std::string fixture(const std::string& name) {
    return "'" + ssmi_test::fixture_path(name) + "'";
}

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "ssmi_cli_scratch";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("compile writes both outputs and exits 0") {
    fs::path dir = scratch_dir();
    fs::path json = dir / "t1.wbjson";
    fs::path xlsx = dir / "t1.xlsx";
    auto r = run_cli("compile " + fixture("pricing.ssmi") + " --json '" + json.string() +
                     "' --xlsx '" + xlsx.string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(json));
    CHECK(fs::exists(xlsx));
    CHECK(r.err.find("mixes operator kinds") != std::string::npos);  // the A5-style warn

    SUBCASE("output matches the golden workbook byte for byte") {
        CHECK(ssmi_test::read_file(json.string()) ==
              ssmi_test::read_file(ssmi_test::fixture_path("pricing.wbjson")));
    }
    SUBCASE("recompiling is byte-identical") {
        fs::path again = dir / "t1_again.wbjson";
        run_cli("compile " + fixture("pricing.ssmi") + " --json '" + again.string() + "'");
        CHECK(ssmi_test::read_file(json.string()) == ssmi_test::read_file(again.string()));
    }
}

TEST_CASE("compile --strict fails on mixed operators and writes nothing") {
    fs::path dir = scratch_dir();
    fs::path json = dir / "strict.wbjson";
    fs::remove(json);
    auto r = run_cli("compile " + fixture("pricing.ssmi") + " --strict --json '" +
                     json.string() + "'");
    CHECK(r.exit_code == 1);
    CHECK_FALSE(fs::exists(json));
}

TEST_CASE("compile rejects a cyclic model with a witness") {
    fs::path dir = scratch_dir();
    fs::path bad = dir / "cycle.ssmi";
    {
        std::ofstream f(bad);
        f << "calc A = B\ncalc B = A\n";
    }
    auto r = run_cli("compile '" + bad.string() + "' --json '" + (dir / "x.wbjson").string() + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("cycle") != std::string::npos);
    CHECK(r.err.find("A") != std::string::npos);
}

TEST_CASE("missing input file exits 3") {
    auto r = run_cli("compile /no/such/path.ssmi --json /tmp/x.wbjson");
    CHECK(r.exit_code == 3);
}

TEST_CASE("usage errors exit 2") {
    auto r = run_cli("frobnicate");
    CHECK(r.exit_code == 2);
    auto r2 = run_cli("eval " + fixture("pricing.ssmi") + " --report Nothing_Here");
    CHECK(r2.exit_code == 2);
    auto r3 = run_cli("eval " + fixture("pricing.ssmi") + " --set Distribution=1");
    CHECK(r3.exit_code == 2);
}

TEST_CASE("eval prints the golden demand value") {
    auto r = run_cli("eval " + fixture("pricing.ssmi") + " --set Price=375 --report Total_Demand");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("13,062") != std::string::npos);
    CHECK(r.out.find("13061.724102223026") != std::string::npos);
}

TEST_CASE("eval reports vectors with instance labels") {
    auto r = run_cli("eval " + fixture("pricing.ssmi") + " --set Price=375 --report Revenue");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Revenue[South]") != std::string::npos);
    CHECK(r.out.find("Revenue[East]") != std::string::npos);
    CHECK(r.out.find("Revenue[North]") != std::string::npos);
}

TEST_CASE("eval defaults to the model's outputs") {
    auto r = run_cli("eval " + fixture("items.ssmi"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Total_Sales") != std::string::npos);
    CHECK(r.out.find("Total_Delivery_Cost") != std::string::npos);
    CHECK(r.out.find("Number_of_Items_Sold") == std::string::npos);
}

TEST_CASE("audit exit codes follow the verdict") {
    auto pass = run_cli("audit " + fixture("items_conforming.wbjson"));
    CHECK(pass.exit_code == 0);
    CHECK(pass.out.find("verdict: pass") != std::string::npos);

    auto fail = run_cli("audit " + fixture("items_transitive.wbjson"));
    CHECK(fail.exit_code == 1);
    CHECK(fail.out.find("A4 'Model'!B14") != std::string::npos);
}

TEST_CASE("audit --format json emits the documented schema") {
    auto r = run_cli("audit " + fixture("items_transitive.wbjson") + " --format json");
    CHECK(r.exit_code == 1);
    auto parsed = nlohmann::json::parse(r.out);
    CHECK(parsed["verdict"] == "fail");
    for (const auto& f : parsed["findings"]) {
        CHECK(f.contains("check"));
        CHECK(f.contains("severity"));
        CHECK(f.contains("sheet"));
        CHECK(f.contains("cell"));
        CHECK(f.contains("message"));
    }
}

TEST_CASE("audit cross-checks against the model when given") {
    fs::path dir = scratch_dir();
    fs::path json = dir / "items.wbjson";
    run_cli("compile " + fixture("items.ssmi") + " --json '" + json.string() + "'");
    auto r = run_cli("audit '" + json.string() + "' --model " + fixture("items.ssmi"));
    CHECK(r.exit_code == 0);
}

TEST_CASE("decompose writes the golden split") {
    fs::path dir = scratch_dir();
    fs::path out = dir / "cost_decomposed.ssmi";
    auto r = run_cli("decompose " + fixture("cost.ssmi") + " -o '" + out.string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(ssmi_test::read_file(out.string()) ==
          ssmi_test::read_file(ssmi_test::fixture_path("cost_decomposed.ssmi")));
}

TEST_CASE("decompose of a simple model is the identity") {
    fs::path dir = scratch_dir();
    fs::path once = dir / "items_once.ssmi";
    fs::path twice = dir / "items_twice.ssmi";
    run_cli("decompose " + fixture("items.ssmi") + " -o '" + once.string() + "'");
    run_cli("decompose '" + once.string() + "' -o '" + twice.string() + "'");
    CHECK(ssmi_test::read_file(once.string()) == ssmi_test::read_file(twice.string()));
}

TEST_CASE("decompose surfaces name collisions as exit 1") {
    fs::path dir = scratch_dir();
    fs::path bad = dir / "collide.ssmi";
    {
        std::ofstream f(bad);
        f << "input A = 1\ninput B = 2\ninput \"X term 1\" = 3\ncalc X = A + B * X_term_1\n";
    }
    auto r = run_cli("decompose '" + bad.string() + "'");
    CHECK(r.exit_code == 1);
}

TEST_CASE("graph emits DOT with the shape conventions") {
    auto r = run_cli("graph " + fixture("pricing.ssmi"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("digraph model {") != std::string::npos);
    CHECK(r.out.find("subgraph cluster_Region") != std::string::npos);
    CHECK(r.out.find("style=dashed") != std::string::npos);
    CHECK(r.out.find("\"Price\" [shape=box") != std::string::npos);
    CHECK(r.out.find("\"DemParA\" [shape=triangle") != std::string::npos);
    CHECK(r.out.find("\"Total_Demand\" [shape=circle") != std::string::npos);
    CHECK(r.out.find("\"Total_Profit\" [shape=oval") != std::string::npos);
    CHECK(r.out.find("\"Total_Demand\" -> \"Regional_Demand\";") != std::string::npos);

    // braces balance, quotes pair up: parseable by a standard DOT reader
    int depth = 0;
    long quotes = 0;
    for (char c : r.out) {
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (c == '"') ++quotes;
        CHECK(depth >= 0);
    }
    CHECK(depth == 0);
    CHECK(quotes % 2 == 0);
}

TEST_CASE("graph counts: 16 nodes, 9 in the repeating cluster") {
    auto r = run_cli("graph " + fixture("pricing.ssmi"));
    long shapes = 0;
    std::string::size_type pos = 0;
    while ((pos = r.out.find("[shape=", pos)) != std::string::npos) {
        ++shapes;
        ++pos;
    }
    CHECK(shapes == 16);

    auto cluster_start = r.out.find("subgraph");
    auto cluster_end = r.out.find("}", cluster_start);
    std::string cluster = r.out.substr(cluster_start, cluster_end - cluster_start);
    long in_cluster = 0;
    pos = 0;
    while ((pos = cluster.find("[shape=", pos)) != std::string::npos) {
        ++in_cluster;
        ++pos;
    }
    CHECK(in_cluster == 9);
}

TEST_CASE("graph of a calc-free model shows parameters only") {
    fs::path dir = scratch_dir();
    fs::path params = dir / "params.ssmi";
    {
        std::ofstream f(params);
        f << "param A = 1\nparam B = 2\n";
    }
    auto r = run_cli("graph '" + params.string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"A\" [shape=triangle") != std::string::npos);
    CHECK(r.out.find("->") == std::string::npos);
}

TEST_CASE("ssmi.toml supplies defaults") {
    fs::path dir = scratch_dir();
    {
        std::ofstream f(dir / "ssmi.toml");
        f << "[compile]\nstrict = true\n";
    }
    fs::path json = dir / "from_config.wbjson";
    auto r = run_cli("compile " + fixture("pricing.ssmi") + " --json '" + json.string() + "'",
                     dir);
    CHECK(r.exit_code == 1);  // strictness came from the config file
    CHECK_FALSE(fs::exists(json));
    fs::remove(dir / "ssmi.toml");
}
