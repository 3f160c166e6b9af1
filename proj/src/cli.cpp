#include "tiltbound/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "tiltbound/errors.hpp"
#include "tiltbound/io.hpp"
#include "tiltbound/mle.hpp"
#include "tiltbound/projection.hpp"

namespace tiltbound::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

// Published worked-example values and the tolerance each is checked at.
struct ReferenceRow {
    double a;
    double bound;
    double tolerance;
    double tail;
};
constexpr ReferenceRow kReferenceRows[] = {
    {4.0, 0.8829, 5e-4, 0.35},
    {5.0, 0.5675, 5e-4, 0.2},
    {6.0, 0.27, 5e-3, 0.1},
    {7.0, 0.087, 5e-4, 0.03},
};
constexpr double kReferenceProjection[] = {0.0236, 0.2526, 0.1692, 0.1699, 0.1517, 0.1422, 0.0544, 0.0364};
constexpr double kReferenceMean = 3.19;
constexpr double kProjectionTolerance = 5e-4;
constexpr double kExactTolerance = 1e-12;

OutputFormat format_or(const RunConfig& cfg, OutputFormat fallback) {
    return cfg.output_format.value_or(fallback);
}

double upper_support(const Model& model) {
    if (const auto* d = std::get_if<DiscreteModel>(&model)) return d->support().back();
    const auto& c = std::get<ContinuousModel>(model);
    if (c.is_grid()) return c.nodes().back();
    return std::numeric_limits<double>::infinity();
}

void write_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

struct Bound {
    std::string model;
    std::string v = "identity";
    double a = 0.0;
};

int cmd_bound(const Bound& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Model model = io::load_model(args.model);
    const ValueFunction v = io::parse_value_spec(args.v);
    validate_value_function(model, v);
    const BoundReport r = analyze(model, v, args.a, cfg.solver());
    write_warnings(r.warnings, err);
    err << "iterations: " << r.tilt.iterations << ", residual: " << r.tilt.residual << '\n';

    if (format_or(cfg, OutputFormat::json) == OutputFormat::json) {
        out << io::report_to_json(r).dump(2) << '\n';
        return kExitOk;
    }
    const int p = cfg.precision;
    auto opt = [p](const std::optional<double>& x) { return x ? io::fixed(*x, p) : std::string(); };
    out << "a,theta_hat,log_bound,bound,true_tail,kl,product_form,ratio_form,generalized_form,status\n";
    out << io::fixed(r.a, p) << ',' << io::fixed(r.tilt.theta_hat, p) << ',' << io::fixed(r.log_bound, p) << ','
        << io::fixed(r.bound, p) << ',' << opt(r.true_tail) << ',' << io::fixed(r.kl, p) << ','
        << opt(r.product_form) << ',' << opt(r.ratio_form) << ',' << opt(r.generalized_form) << ','
        << to_string(r.tilt.status) << '\n';
    return kExitOk;
}

int cmd_project(const Bound& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Model model = io::load_model(args.model);
    const ValueFunction v = io::parse_value_spec(args.v);
    validate_value_function(model, v);
    const Projection proj = i_projection(model, v, args.a, cfg.solver());

    double constraint = 0.0;
    if (const auto* p = proj.pmf()) {
        for (std::size_t i = 0; i < p->size(); ++i) {
            if (p->prob()[i] > 0.0) constraint += p->prob()[i] * v(p->support()[i]);
        }
    } else {
        constraint = cgf_prime(model, v, proj.theta_hat);
    }
    const double residual = std::abs(constraint - v(args.a));
    err << "status: " << to_string(proj.status) << ", constraint residual: " << residual << '\n';

    if (format_or(cfg, OutputFormat::json) == OutputFormat::json) {
        json j;
        j["a"] = io::number(args.a);
        j["status"] = to_string(proj.status);
        j["constraint_residual"] = io::number(residual);
        j["projection"] = io::projection_to_json(proj.record());
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    const int p = cfg.precision;
    if (const auto* pmf = proj.pmf()) {
        // Grid bases project onto a pmf on their nodes only in the limit case.
        const auto* base = std::get_if<DiscreteModel>(&model);
        const auto q = base ? base->prob() : std::get<ContinuousModel>(model).node_mass();
        out << "x,q,p_hat\n";
        for (std::size_t i = 0; i < pmf->size(); ++i) {
            out << io::fixed(pmf->support()[i], p) << ',' << io::fixed(q[i], p) << ','
                << io::fixed(pmf->prob()[i], p) << '\n';
        }
    } else {
        out << "theta_hat,log_normalizer,kl\n"
            << io::fixed(proj.theta_hat, p) << ',' << io::fixed(proj.log_normalizer, p) << ','
            << io::fixed(proj.kl, p) << '\n';
    }
    return kExitOk;
}

struct Sweep {
    std::string model;
    std::string v = "identity";
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
};

int cmd_sweep(const Sweep& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(args.step > 0.0)) throw InputError("--step must be positive");
    if (args.to < args.from) throw InputError("--to must not be below --from");
    const Model model = io::load_model(args.model);
    const ValueFunction v = io::parse_value_spec(args.v);
    validate_value_function(model, v);
    const double mean = model_mean(model);
    const double top = upper_support(model);
    const double slack = cfg.tolerance * std::max(1.0, std::abs(mean));

    std::vector<BoundReport> rows;
    const auto count = static_cast<long long>(std::floor((args.to - args.from) / args.step + 1e-9));
    for (long long k = 0; k <= count; ++k) {
        const double a = args.from + static_cast<double>(k) * args.step;
        if (a < mean - slack) {
            err << "warning: skipping a = " << a << " below E[X] = " << mean << '\n';
            continue;
        }
        if (a > top) {
            err << "warning: skipping a = " << a << " above the support maximum " << top << '\n';
            continue;
        }
        rows.push_back(bound(model, v, a, cfg.solver()));
        write_warnings(rows.back().warnings, err);
    }
    if (rows.empty()) err << "warning: no threshold left in range after trimming\n";

    if (format_or(cfg, OutputFormat::csv) == OutputFormat::json) {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(io::report_to_json(r));
        out << arr.dump(2) << '\n';
        return kExitOk;
    }
    const int p = cfg.precision;
    out << "a,theta_hat,log_bound,bound,true_tail,kl\n";
    for (const auto& r : rows) {
        out << io::fixed(r.a, p) << ',' << io::fixed(r.tilt.theta_hat, p) << ',' << io::fixed(r.log_bound, p)
            << ',' << io::fixed(r.bound, p) << ',' << io::fixed(r.true_tail.value_or(NAN), p) << ','
            << io::fixed(r.kl, p) << '\n';
    }
    return kExitOk;
}

struct Mle {
    std::string model;
    std::string v = "identity";
    std::string sample_path;
    bool simulate = false;
    double a = 0.0;
    std::uint64_t n = 0;
};

int cmd_mle(const Mle& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Model loaded = io::load_model(args.model);
    const auto* model = std::get_if<DiscreteModel>(&loaded);
    if (!model) throw UnsupportedCombination("mle needs a discrete model");
    const ValueFunction v = io::parse_value_spec(args.v);
    validate_value_function(loaded, v);

    json j;
    std::optional<Sample> sample;
    if (args.simulate) {
        if (args.n == 0) throw InputError("--simulate needs -n > 0");
        const std::uint64_t seed = cfg.seed.value_or(kDefaultSeed);
        const Projection proj = i_projection(loaded, v, args.a, cfg.solver());
        DeterministicRng rng(seed);
        sample = sample_multinomial(proj.pmf()->prob(), args.n, rng);
        j["simulated"] = {{"a", io::number(args.a)},
                          {"seed", seed},
                          {"rng", DeterministicRng::algorithm},
                          {"theta_hat", io::number(proj.theta_hat)},
                          {"chernoff_bound", io::number(std::exp(-proj.kl))}};
    } else {
        if (args.sample_path.empty()) throw InputError("mle needs --sample FILE or --simulate");
        sample = io::load_sample(args.sample_path);
    }

    const double vbar = sample_mean_v(*model, v, *sample);
    const TiltSolution ml = ml_estimate(*model, v, *sample, cfg.solver());
    const double loglik = log_likelihood(*model, v, ml.theta_hat, *sample);
    const double from_likelihood = chernoff_from_likelihood(*model, *sample, loglik);
    const double direct = std::exp(cgf(loaded, v, ml.theta_hat) - ml.theta_hat * vbar);
    err << "iterations: " << ml.iterations << ", residual: " << ml.residual << '\n';

    j["n"] = sample->total();
    j["sample_mean_v"] = io::number(vbar);
    j["theta_ml"] = io::number(ml.theta_hat);
    j["status"] = to_string(ml.status);
    j["log_likelihood"] = io::number(loglik);
    j["bound_from_likelihood"] = io::number(from_likelihood);
    j["direct_bound"] = io::number(direct);
    j["relative_difference"] = io::number(std::abs(from_likelihood - direct) / direct);

    if (format_or(cfg, OutputFormat::json) == OutputFormat::json) {
        out << j.dump(2) << '\n';
        return kExitOk;
    }
    const int p = cfg.precision;
    out << "n,sample_mean_v,theta_ml,log_likelihood,bound_from_likelihood,direct_bound\n"
        << sample->total() << ',' << io::fixed(vbar, p) << ',' << io::fixed(ml.theta_hat, p) << ','
        << io::fixed(loglik, p) << ',' << io::fixed(from_likelihood, p) << ',' << io::fixed(direct, p) << '\n';
    return kExitOk;
}

struct Experiment {
    std::string model;
    std::string v = "identity";
    double a = 0.0;
    std::vector<std::uint64_t> n_list;
};

int cmd_experiment(const Experiment& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Model loaded = io::load_model(args.model);
    const auto* model = std::get_if<DiscreteModel>(&loaded);
    if (!model) throw UnsupportedCombination("experiment needs a discrete model");
    const ValueFunction v = io::parse_value_spec(args.v);
    validate_value_function(loaded, v);
    const std::uint64_t seed = cfg.seed.value_or(kDefaultSeed);
    err << "seed: " << seed << ", rng: " << DeterministicRng::algorithm << '\n';
    const auto rows = asymptotic_experiment(*model, v, args.a, args.n_list, seed, cfg.solver());

    if (format_or(cfg, OutputFormat::csv) == OutputFormat::json) {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"n", r.n},
                           {"theta_ml", io::number(r.theta_ml)},
                           {"loglik_over_n", io::number(r.loglik_over_n)},
                           {"minus_entropy_target", io::number(r.minus_entropy_target)},
                           {"chernoff_target", io::number(r.chernoff_target)},
                           {"deviation", io::number(r.deviation)},
                           {"empirical_max_dev", io::number(r.empirical_max_dev)}});
        }
        out << arr.dump(2) << '\n';
        return kExitOk;
    }
    const int p = cfg.precision;
    out << "n,loglik_over_n,minus_entropy_target,deviation,empirical_max_dev\n";
    for (const auto& r : rows) {
        out << r.n << ',' << io::fixed(r.loglik_over_n, p) << ',' << io::fixed(r.minus_entropy_target, p) << ','
            << io::fixed(r.deviation, p) << ',' << io::fixed(r.empirical_max_dev, p) << '\n';
    }
    return kExitOk;
}

int cmd_reproduce(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ExampleTable t = reproduce_example(cfg);
    err << "E[X] = " << io::fixed(t.mean, 17) << (t.mean_pass ? " (PASS)" : " (FAIL)") << '\n';
    const auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

    if (format_or(cfg, OutputFormat::csv) == OutputFormat::json) {
        json j;
        j["mean"] = io::number(t.mean);
        j["mean_pass"] = t.mean_pass;
        j["rows"] = json::array();
        for (const auto& r : t.rows) {
            j["rows"].push_back({{"a", r.a},
                                 {"bound", r.bound},
                                 {"reference_bound", r.reference_bound},
                                 {"tolerance", r.tolerance},
                                 {"true_tail", r.true_tail},
                                 {"reference_tail", r.reference_tail},
                                 {"status", verdict(r.pass)}});
        }
        j["projection"] = json::array();
        for (const auto& r : t.projection) {
            j["projection"].push_back({{"x", r.atom},
                                       {"q", r.q},
                                       {"p_hat", r.p_hat},
                                       {"reference_p_hat", r.reference_p_hat},
                                       {"status", verdict(r.pass)}});
        }
        j["all_pass"] = t.all_pass;
        out << j.dump(2) << '\n';
    } else {
        const int p = cfg.precision;
        out << "a,bound,reference_bound,tolerance,true_tail,reference_tail,status\n";
        for (const auto& r : t.rows) {
            out << io::fixed(r.a, p) << ',' << io::fixed(r.bound, p) << ',' << io::fixed(r.reference_bound, p)
                << ',' << r.tolerance << ',' << io::fixed(r.true_tail, p) << ',' << io::fixed(r.reference_tail, p)
                << ',' << verdict(r.pass) << '\n';
        }
        out << '\n' << "x,q,p_hat,reference_p_hat,status\n";
        for (const auto& r : t.projection) {
            out << io::fixed(r.atom, p) << ',' << io::fixed(r.q, p) << ',' << io::fixed(r.p_hat, p) << ','
                << io::fixed(r.reference_p_hat, p) << ',' << verdict(r.pass) << '\n';
        }
    }
    return t.all_pass ? kExitOk : kExitHypothesis;
}

}  // namespace

void RunConfig::validate() const {
    if (!(tolerance > 0.0)) throw InputError("--tol must be positive");
    if (max_iterations < 1) throw InputError("--max-iter must be at least 1");
    if (precision < 1 || precision > 17) throw InputError("--precision must be in [1, 17]");
}

ExampleTable reproduce_example(const RunConfig& config) {
    const Model model = io::example_pmf();
    const ValueFunction v = ValueFunction::identity();
    const auto opts = config.solver();

    ExampleTable t{};
    t.mean = model_mean(model);
    t.mean_pass = std::abs(t.mean - kReferenceMean) <= kExactTolerance;
    t.all_pass = t.mean_pass;
    for (const auto& ref : kReferenceRows) {
        const BoundReport r = bound(model, v, ref.a, opts);
        ExampleRow row{ref.a, r.bound, ref.bound, ref.tolerance, *r.true_tail, ref.tail, false};
        row.pass = std::abs(row.bound - ref.bound) <= ref.tolerance &&
                   std::abs(row.true_tail - ref.tail) <= kExactTolerance;
        t.all_pass = t.all_pass && row.pass;
        t.rows.push_back(row);
    }
    const Projection proj = i_projection(model, v, 4.0, opts);
    const auto& base = std::get<DiscreteModel>(model);
    for (std::size_t i = 0; i < base.size(); ++i) {
        ExampleProjectionRow row{base.support()[i], base.prob()[i], proj.pmf()->prob()[i], kReferenceProjection[i],
                                 false};
        row.pass = std::abs(row.p_hat - row.reference_p_hat) <= kProjectionTolerance;
        t.all_pass = t.all_pass && row.pass;
        t.projection.push_back(row);
    }
    return t;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tiltbound: Chernoff bounds, I-projections and exponential tilting"};
    app.name("tiltbound");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string format;
    std::uint64_t seed = 0;
    app.add_option("--tol", cfg.tolerance, "Solver residual tolerance (scaled by max(1,|v(a)|))")
        ->capture_default_str();
    app.add_option("--max-iter", cfg.max_iterations, "Solver iteration limit")->capture_default_str();
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    auto* seed_opt = app.add_option("--seed", seed, "Seed for sampling commands (default 42)");
    app.add_option("--precision", cfg.precision, "Decimal places in CSV output")->capture_default_str();

    Bound bound_args;
    auto* bound_cmd = app.add_subcommand("bound", "Chernoff bound report for P(X >= a)");
    bound_cmd->add_option("model", bound_args.model, "Model file (JSON pmf/family, CSV grid, builtin:example)")
        ->required();
    bound_cmd->add_option("-a,--threshold", bound_args.a, "Threshold a")->required();
    bound_cmd->add_option("--v", bound_args.v, "identity | log | table:<path>")->capture_default_str();

    Bound project_args;
    auto* project_cmd = app.add_subcommand("project", "I-projection onto {P : E_P v(X) = v(a)}");
    project_cmd->add_option("model", project_args.model, "Model file")->required();
    project_cmd->add_option("-a,--threshold", project_args.a, "Threshold a")->required();
    project_cmd->add_option("--v", project_args.v, "identity | log | table:<path>")->capture_default_str();

    Sweep sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Bounds over a range of thresholds (CSV)");
    sweep_cmd->add_option("model", sweep_args.model, "Model file")->required();
    sweep_cmd->add_option("--from", sweep_args.from, "First threshold")->required();
    sweep_cmd->add_option("--to", sweep_args.to, "Last threshold")->required();
    sweep_cmd->add_option("--step", sweep_args.step, "Threshold step")->capture_default_str();
    sweep_cmd->add_option("--v", sweep_args.v, "identity | log | table:<path>")->capture_default_str();

    Mle mle_args;
    auto* mle_cmd = app.add_subcommand("mle", "Exponential-family ML estimate and the bound it implies");
    mle_cmd->add_option("model", mle_args.model, "Discrete model file")->required();
    mle_cmd->add_option("--v", mle_args.v, "identity | log | table:<path>")->capture_default_str();
    auto* sample_opt = mle_cmd->add_option("--sample", mle_args.sample_path, "Sample JSON {\"counts\": [...]}");
    auto* sim_flag = mle_cmd->add_flag("--simulate", mle_args.simulate, "Draw the sample from the projection at a");
    mle_cmd->add_option("-a,--threshold", mle_args.a, "Threshold used with --simulate");
    mle_cmd->add_option("-n,--size", mle_args.n, "Sample size used with --simulate");
    sample_opt->excludes(sim_flag);

    Experiment exp_args;
    auto* exp_cmd = app.add_subcommand("experiment", "Convergence of l(theta_ML)/n towards -H(p_hat) (CSV)");
    exp_cmd->add_option("model", exp_args.model, "Discrete model file")->required();
    exp_cmd->add_option("-a,--threshold", exp_args.a, "Threshold a")->required();
    exp_cmd->add_option("--n-list", exp_args.n_list, "Increasing sample sizes, comma separated")
        ->required()
        ->delimiter(',');
    exp_cmd->add_option("--v", exp_args.v, "identity | log | table:<path>")->capture_default_str();

    auto* repro_cmd = app.add_subcommand("reproduce-example", "Recompute the eight-atom worked example");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (!format.empty()) cfg.output_format = format == "json" ? OutputFormat::json : OutputFormat::csv;
        if (seed_opt->count() > 0) cfg.seed = seed;
        cfg.validate();

        if (bound_cmd->parsed()) return cmd_bound(bound_args, cfg, out, err);
        if (project_cmd->parsed()) return cmd_project(project_args, cfg, out, err);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, cfg, out, err);
        if (mle_cmd->parsed()) return cmd_mle(mle_args, cfg, out, err);
        if (exp_cmd->parsed()) return cmd_experiment(exp_args, cfg, out, err);
        if (repro_cmd->parsed()) return cmd_reproduce(cfg, out, err);
    } catch (const HypothesisError& e) {
        err << "error: hypothesis violated: " << e.what() << '\n';
        return kExitHypothesis;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace tiltbound::cli
