#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "tiltbound/errors.hpp"
#include "tiltbound/io.hpp"
#include "tiltbound/projection.hpp"

using namespace tiltbound;
using nlohmann::json;

namespace {

const std::string kData = TILTBOUND_DATA_DIR;

}  // namespace

TEST_CASE("model files load") {
    const auto pmf = std::get<DiscreteModel>(io::load_model(kData + "/example_pmf.json"));
    CHECK(pmf.size() == 8);
    CHECK(pmf.mean() == doctest::Approx(3.19));
    const auto builtin = std::get<DiscreteModel>(io::load_model("builtin:example"));
    CHECK(std::equal(builtin.prob().begin(), builtin.prob().end(), pmf.prob().begin()));
    const auto g = std::get<ContinuousModel>(io::load_model(kData + "/gaussian.json"));
    CHECK(*g.family() == Family::gaussian);
    const auto e = std::get<ContinuousModel>(io::load_model(kData + "/exponential.json"));
    CHECK(e.params()[0] == 1.0);
    const auto grid = std::get<ContinuousModel>(io::load_model(kData + "/exponential_grid.csv"));
    CHECK(grid.is_grid());
}

TEST_CASE("malformed inputs are parse errors") {
    CHECK_THROWS_AS(io::load_model(kData + "/does_not_exist.json"), ParseError);
    CHECK_THROWS_AS(io::model_from_json(json::parse(R"({"family": "cauchy"})")), ParseError);
    CHECK_THROWS_AS(io::model_from_json(json::parse(R"({"support": [1, 2]})")), ParseError);
    CHECK_THROWS_AS(io::model_from_json(json::parse("[1, 2]")), ParseError);
    std::istringstream no_header("0,1\n1,1\n");
    CHECK_THROWS_AS(io::grid_from_csv(no_header), ParseError);
    std::istringstream bad_number("x,density\n0,abc\n");
    CHECK_THROWS_AS(io::grid_from_csv(bad_number), ParseError);
    CHECK_THROWS_AS(io::parse_value_spec("square"), ParseError);
    CHECK_THROWS_AS(io::sample_from_json(json::parse(R"({"counts": [1, -2]})")), ParseError);
}

TEST_CASE("invalid model contents keep their own error") {
    CHECK_THROWS_AS(io::model_from_json(json::parse(R"({"support": [1, 2], "prob": [0.5, 0.6]})")), InvalidModel);
}

TEST_CASE("value specs") {
    CHECK(io::parse_value_spec("identity")(2.5) == 2.5);
    CHECK(io::parse_value_spec("log")(1.0) == 0.0);
    const auto t = io::parse_value_spec("table:" + kData + "/sqrt_table.csv");
    CHECK(t(4.0) == doctest::Approx(2.0));
}

TEST_CASE("samples load") {
    const auto s = io::load_sample(kData + "/sample_at_mean.json");
    CHECK(s.total() == 100);
}

TEST_CASE("non-finite numbers are encoded as strings") {
    CHECK(io::number(INFINITY) == "inf");
    CHECK(io::number(-INFINITY) == "-inf");
    CHECK(io::number(NAN) == "nan");
    CHECK(std::isinf(io::read_number(json("inf"))));
    CHECK(std::isnan(io::read_number(json("nan"))));
    CHECK_THROWS_AS(io::read_number(json("many")), ParseError);
    CHECK(io::fixed(0.88285640110424, 4) == "0.8829");
}

TEST_CASE("reports round-trip exactly through JSON text") {
    const Model m = io::example_pmf();
    for (double a : {3.19, 4.0, 5.5, 7.0, 8.0, 9.0}) {
        const auto r = analyze(m, ValueFunction::identity(), a);
        const auto text = io::report_to_json(r).dump();
        const auto back = io::report_from_json(json::parse(text));
        CHECK(io::report_to_json(back).dump() == text);
        CHECK(std::memcmp(&back.bound, &r.bound, sizeof(double)) == 0);
        CHECK(std::memcmp(&back.tilt.theta_hat, &r.tilt.theta_hat, sizeof(double)) == 0);
        CHECK(back.tilt.status == r.tilt.status);
    }
    const auto g = analyze(ContinuousModel::gaussian(0, 1), ValueFunction::identity(), 1.0);
    const auto text = io::report_to_json(g).dump();
    CHECK(io::report_to_json(io::report_from_json(json::parse(text))).dump() == text);
}

TEST_CASE("model JSON round-trip") {
    const Model m = io::example_pmf();
    const auto back = std::get<DiscreteModel>(io::model_from_json(io::model_to_json(m)));
    CHECK(back.mean() == std::get<DiscreteModel>(m).mean());
    const Model e = ContinuousModel::exponential(3.0);
    CHECK(std::get<ContinuousModel>(io::model_from_json(io::model_to_json(e))).params()[0] == 3.0);
}
