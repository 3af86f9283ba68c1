#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "twsim/cli.hpp"

using namespace twsim;

namespace {

std::string samples(const std::string& name) { return std::string(TWSIM_SAMPLES_DIR) + "/" + name; }

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l))
        if (l == line) return true;
    return false;
}

double value_of(const std::string& text, const std::string& key) {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l))
        if (l.rfind(key + "=", 0) == 0) return std::stod(l.substr(key.size() + 1));
    throw std::runtime_error("key not found: " + key);
}

}  // namespace

TEST_CASE("simulate subcommand") {
    auto res = run_cli({"--format", "machine", "simulate", samples("bell.qc"), "--input", "00", "--measure",
                        samples("m00.txt"), "--oracle"});
    INFO(res.err);
    CHECK(res.code == 0);
    CHECK(has_line(res.out, "probability=0.5"));
    CHECK(has_line(res.out, "oracle=0.5"));
    CHECK(has_line(res.out, "abs_diff=0"));
}

TEST_CASE("simulate output is byte-identical across runs") {
    std::vector<std::string> args{"--format", "machine", "--seed", "3", "simulate", samples("bell.qc"),
                                  "--input",  "00",      "--measure", samples("m00.txt")};
    auto a = run_cli(args);
    auto b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("treewidth subcommand") {
    SECTION("exact value of the 5-cycle") {
        auto res = run_cli({"--format", "machine", "treewidth", samples("c5.gr"), "--exact"});
        CHECK(res.code == 0);
        CHECK(has_line(res.out, "tw=2"));
    }
    SECTION("heuristic upper bound") {
        auto res = run_cli({"--format", "machine", "treewidth", samples("c5.gr"), "--strategy", "mindeg"});
        CHECK(res.code == 0);
        CHECK(has_line(res.out, "width=2"));
    }
    SECTION("decomposition file round trips") {
        std::string td_path = "cli_test_out.td";
        auto res = run_cli({"treewidth", samples("c5.gr"), "--exact", "-o", td_path});
        CHECK(res.code == 0);
        std::ifstream in(td_path);
        REQUIRE(in.good());
        TreeDecomposition td = read_td(in);
        std::ifstream gin(samples("c5.gr"));
        MultiGraph g = read_pace(gin);
        CHECK(validate_decomposition(td, g).empty());
        CHECK(td.width() == 2);
        std::remove(td_path.c_str());
    }
}

TEST_CASE("cc subcommand") {
    auto res = run_cli({"--format", "machine", "cc", samples("path4.gr"), "--exact"});
    CHECK(res.code == 0);
    CHECK(has_line(res.out, "cc=1"));
}

TEST_CASE("plan subcommand writes a loadable plan") {
    std::string plan_path = "cli_test_out.plan";
    auto res = run_cli({"--format", "machine", "plan", samples("c5.gr"), "-o", plan_path});
    CHECK(res.code == 0);
    std::ifstream in(plan_path);
    REQUIRE(in.good());
    ContractionPlan plan = read_plan(in);
    std::ifstream gin(samples("c5.gr"));
    MultiGraph g = read_pace(gin);
    CHECK(plan.predicted_cc == cc_of_ordering(g, plan.ordering));
    std::remove(plan_path.c_str());
}

TEST_CASE("simulate can store and replay a contraction plan") {
    std::string plan_path = "cli_test_net.plan";
    auto emitted = run_cli({"--format", "machine", "simulate", samples("bell.qc"), "--input", "00", "--measure",
                            samples("m00.txt"), "--emit-plan", plan_path});
    REQUIRE(emitted.code == 0);
    auto replayed = run_cli({"--format", "machine", "simulate", samples("bell.qc"), "--input", "00", "--measure",
                             samples("m00.txt"), "--plan", plan_path});
    INFO(replayed.err);
    CHECK(replayed.code == 0);
    CHECK(has_line(replayed.out, "probability=0.5"));
    std::remove(plan_path.c_str());
}

TEST_CASE("graphstate subcommand") {
    auto res = run_cli({"--format", "machine", "graphstate", samples("path4.gr"), "--measure", samples("gm1.txt"),
                        "--oracle"});
    INFO(res.err);
    CHECK(res.code == 0);
    CHECK(value_of(res.out, "probability") == Catch::Approx(0.5).margin(1e-9));
    CHECK(value_of(res.out, "abs_diff") < 1e-9);
}

TEST_CASE("oneway subcommand") {
    SECTION("seeded randomized run") {
        auto res = run_cli({"--format", "machine", "--seed", "7", "oneway", samples("path4.gr"), "--program",
                            samples("xchain.owp")});
        INFO(res.err);
        CHECK(res.code == 0);
        CHECK(res.out.find("outcomes=") != std::string::npos);
        auto again = run_cli({"--format", "machine", "--seed", "7", "oneway", samples("path4.gr"), "--program",
                              samples("xchain.owp")});
        CHECK(res.out == again.out);
    }
    SECTION("full pipeline on a star") {
        auto res = run_cli({"--format", "machine", "--seed", "1", "oneway", samples("star4.gr"), "--program",
                            samples("leaf_z.owp"), "--full"});
        INFO(res.err);
        CHECK(res.code == 0);
        CHECK(res.out.find("prefix_measurements=2") != std::string::npos);
    }
}

TEST_CASE("exit codes") {
    SECTION("missing file is an input error") {
        auto res = run_cli({"simulate", "no_such_file.qc"});
        CHECK(res.code == 1);
        CHECK(res.err.find("cannot open") != std::string::npos);
    }
    SECTION("exact solver over budget is a resource failure") {
        std::string path = "cli_test_big.gr";
        std::ofstream g(path);
        g << "p tw 20 19\n";
        for (int v = 1; v < 20; ++v) g << "e " << v << ' ' << v + 1 << '\n';
        g.close();
        auto res = run_cli({"treewidth", path, "--exact"});
        CHECK(res.code == 2);
        std::remove(path.c_str());
    }
    SECTION("bad strategy name") {
        auto res = run_cli({"--strategy", "bogus", "treewidth", samples("c5.gr")});
        CHECK(res.code == 1);
    }
    SECTION("rank budget overruns are a resource failure") {
        auto res = run_cli({"--budget-rank", "2", "simulate", samples("bell.qc"), "--input", "00", "--measure",
                            samples("m00.txt")});
        CHECK(res.code == 2);
        CHECK(res.err.find("budget") != std::string::npos);
    }
}
