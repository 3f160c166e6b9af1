#include <doctest.h>

#include <sstream>

#include "tiltbound/cli.hpp"
#include "tiltbound/io.hpp"

using namespace tiltbound;
using nlohmann::json;

namespace {

const std::string kData = TILTBOUND_DATA_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("bound command") {
    const auto r = run({"bound", kData + "/example_pmf.json", "-a", "4"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(j["bound"].get<double>() - 0.8829) <= 5e-4);
    CHECK(j["true_tail"].get<double>() == doctest::Approx(0.35));
    CHECK(j["status"] == "attained");
    CHECK(r.err.find("iterations") != std::string::npos);

    const auto at_mean = json::parse(run({"bound", "builtin:example", "-a", "3.19"}).out);
    CHECK(at_mean["bound"].get<double>() == 1.0);
    CHECK(at_mean["kl"].get<double>() == 0.0);

    const auto g = json::parse(run({"bound", kData + "/gaussian.json", "-a", "1"}).out);
    CHECK(g["bound"].get<double>() == doctest::Approx(0.606531).epsilon(1e-6));
}

TEST_CASE("exit codes") {
    CHECK(run({"bound", "builtin:example", "-a", "2"}).code == cli::kExitHypothesis);
    CHECK(run({"bound", kData + "/missing.json", "-a", "4"}).code == cli::kExitInput);
    CHECK(run({"bound", "builtin:example"}).code == cli::kExitInput);
    CHECK(run({"frobnicate"}).code == cli::kExitInput);
    CHECK(run({"--precision", "40", "reproduce-example"}).code == cli::kExitInput);
    CHECK(run({"--help"}).code == cli::kExitOk);
    CHECK(run({"mle", kData + "/zero_atom_pmf.json", "--sample", kData + "/sample_impossible.json"}).code ==
          cli::kExitHypothesis);
}

TEST_CASE("reproduce-example") {
    const auto r = run({"reproduce-example"});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    const auto lines = csv_lines(r.out);
    CHECK(lines[0] == "a,bound,reference_bound,tolerance,true_tail,reference_tail,status");
    CHECK(lines[1].rfind("4.000000,0.882856,", 0) == 0);
    const auto loose = run({"--tol", "1e-3", "reproduce-example"});
    CHECK(loose.code == 0);
    const auto two = run({"--precision", "2", "reproduce-example"});
    CHECK(csv_lines(two.out)[1].rfind("4.00,0.88,", 0) == 0);
    const auto t = cli::reproduce_example({});
    CHECK(t.all_pass);
    CHECK(t.rows.size() == 4);
}

TEST_CASE("sweep matches single-point calls") {
    const auto r = run({"sweep", "builtin:example", "--from", "4", "--to", "7", "--step", "1"});
    REQUIRE(r.code == 0);
    const auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "a,theta_hat,log_bound,bound,true_tail,kl");
    const auto single = run({"--format", "csv", "--precision", "6", "bound", "builtin:example", "-a", "5"});
    const auto single_row = csv_lines(single.out)[1];
    CHECK(lines[2] == single_row.substr(0, lines[2].size()));

    const auto at_mean = run({"sweep", "builtin:example", "--from", "3.19", "--to", "3.19"});
    CHECK(csv_lines(at_mean.out).size() == 2);
    CHECK(csv_lines(at_mean.out)[1].find(",1.000000,") != std::string::npos);

    const auto empty = run({"sweep", "builtin:example", "--from", "0", "--to", "2"});
    CHECK(empty.code == 0);
    CHECK(csv_lines(empty.out).size() == 1);
    CHECK(empty.err.find("warning") != std::string::npos);
}

TEST_CASE("project command") {
    const auto r = run({"project", "builtin:example", "-a", "4"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["projection"]["pmf"]["prob"][3].get<double>() == doctest::Approx(0.1699).epsilon(5e-4 / 0.1699));
    const auto grid_top = run({"--format", "csv", "project", kData + "/exponential_grid.csv", "-a", "12"});
    CHECK(grid_top.code == 0);
}

TEST_CASE("mle command") {
    const auto at_mean = json::parse(run({"mle", "builtin:example", "--sample", kData + "/sample_at_mean.json"}).out);
    CHECK(at_mean["theta_ml"].get<double>() == 0.0);

    const auto sim = run({"mle", "builtin:example", "--simulate", "-a", "4", "-n", "1000000"});
    REQUIRE(sim.code == 0);
    const auto j = json::parse(sim.out);
    CHECK(std::abs(j["bound_from_likelihood"].get<double>() - 0.8829) <= 2e-3);
    CHECK(j["relative_difference"].get<double>() <= 1e-10);
    CHECK(run({"mle", "builtin:example"}).code == cli::kExitInput);
}

TEST_CASE("experiment command") {
    const auto r = run({"experiment", "builtin:example", "-a", "4", "--n-list", "100,10000,1000000"});
    REQUIRE(r.code == 0);
    const auto lines = csv_lines(r.out);
    REQUIRE(lines.size() == 4);
    std::vector<double> dev;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream ls(lines[i]);
        std::string cell;
        for (int k = 0; k < 4; ++k) std::getline(ls, cell, ',');
        dev.push_back(std::stod(cell));
    }
    CHECK(dev[0] > dev[1]);
    CHECK(dev[1] > dev[2]);
    const auto one = run({"experiment", "builtin:example", "-a", "4", "--n-list", "1"});
    CHECK(one.code == 0);
    CHECK(csv_lines(one.out).size() == 2);
}

TEST_CASE("identical invocations give identical output") {
    const std::vector<std::string> args = {"--seed", "7", "experiment", "builtin:example", "-a", "5", "--n-list",
                                           "10,1000"};
    CHECK(run(args).out == run(args).out);
    const std::vector<std::string> mle = {"mle", "builtin:example", "--simulate", "-a", "5", "-n", "500"};
    CHECK(run(mle).out == run(mle).out);
    CHECK(run({"bound", "builtin:example", "-a", "6"}).out == run({"bound", "builtin:example", "-a", "6"}).out);
}
