#include "tiltbound/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tiltbound/errors.hpp"

namespace tiltbound::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(t, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == t.size();
}

// Two-column numeric CSV with a mandatory header line.
std::pair<std::vector<double>, std::vector<double>> read_two_columns(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(std::string(what) + ": empty file");
    {
        std::istringstream hs(line);
        std::string first;
        std::getline(hs, first, ',');
        double dummy = 0.0;
        if (parse_double(first, dummy)) {
            throw ParseError(std::string(what) + ": missing header line");
        }
    }
    std::vector<double> a;
    std::vector<double> b;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string c0;
        std::string c1;
        std::string extra;
        std::getline(ls, c0, ',');
        std::getline(ls, c1, ',');
        double x = 0.0;
        double y = 0.0;
        if (std::getline(ls, extra, ',') && !trim(extra).empty()) {
            throw ParseError(std::string(what) + ": expected two columns on line " + std::to_string(line_no));
        }
        if (!parse_double(c0, x) || !parse_double(c1, y)) {
            throw ParseError(std::string(what) + ": bad number on line " + std::to_string(line_no));
        }
        a.push_back(x);
        b.push_back(y);
    }
    return {std::move(a), std::move(b)};
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

json parse_json_file(const std::filesystem::path& path) {
    auto in = open(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<double> number_array(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw ParseError(std::string("expected an array field '") + key + "'");
    }
    std::vector<double> out;
    for (const auto& e : j.at(key)) out.push_back(read_number(e));
    return out;
}

json optional_number(const std::optional<double>& x) {
    return x ? number(*x) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return read_number(j.at(key));
}

json pmf_to_json(const DiscreteModel& d) {
    json s = json::array();
    json p = json::array();
    for (double x : d.support()) s.push_back(number(x));
    for (double x : d.prob()) p.push_back(number(x));
    return {{"support", s}, {"prob", p}};
}

}  // namespace

json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ParseError("expected a number, got " + j.dump());
}

std::string fixed(double x, int precision) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    return buf;
}

DiscreteModel example_pmf() {
    return DiscreteModel({1, 2, 3, 4, 5, 6, 7, 8}, {0.05, 0.4, 0.2, 0.15, 0.10, 0.07, 0.02, 0.01});
}

Model model_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("model must be a JSON object");
    try {
        if (j.contains("support")) {
            return DiscreteModel(number_array(j, "support"), number_array(j, "prob"));
        }
        if (j.contains("family")) {
            const auto fam = j.at("family").get<std::string>();
            const json params = j.value("params", json::object());
            if (fam == "gaussian") {
                return ContinuousModel::gaussian(read_number(params.value("mean", json(0.0))),
                                                 read_number(params.value("stddev", json(1.0))));
            }
            if (fam == "exponential") {
                return ContinuousModel::exponential(read_number(params.value("rate", json(1.0))));
            }
            throw ParseError("unknown family '" + fam + "'");
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    throw ParseError("model JSON needs either 'support'/'prob' or 'family'");
}

json model_to_json(const Model& model) {
    if (const auto* d = std::get_if<DiscreteModel>(&model)) return pmf_to_json(*d);
    const auto& c = std::get<ContinuousModel>(model);
    if (c.is_grid()) {
        json nodes = json::array();
        json dens = json::array();
        for (double x : c.nodes()) nodes.push_back(number(x));
        for (double x : c.node_density()) dens.push_back(number(x));
        return {{"grid", {{"x", nodes}, {"density", dens}}}};
    }
    const auto p = c.params();
    if (*c.family() == Family::gaussian) {
        return {{"family", "gaussian"}, {"params", {{"mean", p[0]}, {"stddev", p[1]}}}};
    }
    return {{"family", "exponential"}, {"params", {{"rate", p[0]}}}};
}

ContinuousModel grid_from_csv(std::istream& in) {
    auto [x, d] = read_two_columns(in, "grid CSV");
    return ContinuousModel::grid(std::move(x), std::move(d));
}

Model load_model(const std::filesystem::path& path) {
    if (path == "builtin:example") return example_pmf();
    if (path.extension() == ".csv") {
        auto in = open(path);
        return grid_from_csv(in);
    }
    return model_from_json(parse_json_file(path));
}

ValueFunction value_table_from_csv(std::istream& in) {
    auto [x, v] = read_two_columns(in, "value table CSV");
    return ValueFunction::table(std::move(x), std::move(v));
}

ValueFunction parse_value_spec(const std::string& spec) {
    if (spec == "identity") return ValueFunction::identity();
    if (spec == "log") return ValueFunction::logarithm();
    const std::string prefix = "table:";
    if (spec.rfind(prefix, 0) == 0) {
        auto in = open(spec.substr(prefix.size()));
        return value_table_from_csv(in);
    }
    throw ParseError("unknown value function '" + spec + "' (expected identity, log or table:<path>)");
}

Sample sample_from_json(const json& j) {
    if (!j.is_object() || !j.contains("counts") || !j.at("counts").is_array()) {
        throw ParseError("sample JSON needs a 'counts' array");
    }
    std::vector<std::uint64_t> counts;
    for (const auto& c : j.at("counts")) {
        if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0)) {
            throw ParseError("counts must be non-negative integers, got " + c.dump());
        }
        counts.push_back(c.get<std::uint64_t>());
    }
    return Sample(std::move(counts));
}

Sample load_sample(const std::filesystem::path& path) {
    return sample_from_json(parse_json_file(path));
}

json projection_to_json(const ProjectionRecord& p) {
    json pj;
    pj["theta_hat"] = number(p.theta_hat);
    pj["log_normalizer"] = number(p.log_normalizer);
    pj["kl"] = number(p.kl);
    if (p.pmf) pj["pmf"] = pmf_to_json(*p.pmf);
    if (p.family) {
        pj["family"] = *p.family;
        json params = json::array();
        for (double x : p.family_params) params.push_back(number(x));
        pj["params"] = params;
    }
    return pj;
}

json report_to_json(const BoundReport& r) {
    json j;
    j["a"] = number(r.a);
    j["v_of_a"] = number(r.v_of_a);
    j["theta_hat"] = number(r.tilt.theta_hat);
    j["residual"] = number(r.tilt.residual);
    j["iterations"] = r.tilt.iterations;
    j["status"] = to_string(r.tilt.status);
    j["log_bound"] = number(r.log_bound);
    j["bound"] = number(r.bound);
    j["true_tail"] = optional_number(r.true_tail);
    j["kl"] = number(r.kl);
    j["product_form"] = optional_number(r.product_form);
    j["ratio_form"] = optional_number(r.ratio_form);
    j["generalized_form"] = optional_number(r.generalized_form);
    j["projection"] = r.projection ? projection_to_json(*r.projection) : json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

BoundReport report_from_json(const json& j) {
    try {
        BoundReport r;
        r.a = read_number(j.at("a"));
        r.v_of_a = read_number(j.at("v_of_a"));
        r.tilt.theta_hat = read_number(j.at("theta_hat"));
        r.tilt.residual = read_number(j.at("residual"));
        r.tilt.iterations = j.at("iterations").get<int>();
        r.tilt.status = tilt_status_from_string(j.at("status").get<std::string>());
        r.log_bound = read_number(j.at("log_bound"));
        r.bound = read_number(j.at("bound"));
        r.true_tail = read_optional(j, "true_tail");
        r.kl = read_number(j.at("kl"));
        r.product_form = read_optional(j, "product_form");
        r.ratio_form = read_optional(j, "ratio_form");
        r.generalized_form = read_optional(j, "generalized_form");
        if (j.contains("projection") && !j.at("projection").is_null()) {
            const json& pj = j.at("projection");
            ProjectionRecord p;
            p.theta_hat = read_number(pj.at("theta_hat"));
            p.log_normalizer = read_number(pj.at("log_normalizer"));
            p.kl = read_number(pj.at("kl"));
            if (pj.contains("pmf")) {
                p.pmf = DiscreteModel(number_array(pj.at("pmf"), "support"), number_array(pj.at("pmf"), "prob"));
            }
            if (pj.contains("family")) {
                p.family = pj.at("family").get<std::string>();
                p.family_params = number_array(pj, "params");
            }
            r.projection = std::move(p);
        }
        if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace tiltbound::io
