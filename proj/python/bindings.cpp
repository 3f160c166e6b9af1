#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tiltbound/chernoff.hpp"
#include "tiltbound/errors.hpp"
#include "tiltbound/io.hpp"
#include "tiltbound/measures.hpp"
#include "tiltbound/mle.hpp"
#include "tiltbound/projection.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace tiltbound;

namespace {

std::vector<double> to_vector(std::span<const double> s) {
    return {s.begin(), s.end()};
}

// Accepts either model class from Python.
Model as_model(const py::object& obj) {
    if (py::isinstance<DiscreteModel>(obj)) return obj.cast<DiscreteModel>();
    if (py::isinstance<ContinuousModel>(obj)) return obj.cast<ContinuousModel>();
    throw py::type_error("expected a DiscreteModel or ContinuousModel");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Chernoff bounds and I-projections
        ---------------------------------
        .. currentmodule:: tiltbound

        .. autosummary::
           :toctree: _generate

           bound
           analyze
           i_projection
           ml_estimate
           asymptotic_experiment
    )pbdoc";

    auto error = py::register_exception<Error>(m, "Error");
    auto input_error = py::register_exception<InputError>(m, "InputError", error.ptr());
    auto hypothesis_error = py::register_exception<HypothesisError>(m, "HypothesisError", error.ptr());
    py::register_exception<BelowMeanError>(m, "BelowMeanError", hypothesis_error.ptr());
    py::register_exception<InfeasibleTarget>(m, "InfeasibleTarget", hypothesis_error.ptr());
    py::register_exception<ImpossibleSample>(m, "ImpossibleSample", hypothesis_error.ptr());
    py::register_exception<MLBoundary>(m, "MLBoundary", hypothesis_error.ptr());
    py::register_exception<NotAnAtom>(m, "NotAnAtom", hypothesis_error.ptr());
    py::register_exception<RatioUndefined>(m, "RatioUndefined", hypothesis_error.ptr());
    (void)input_error;

    py::class_<ValueFunction>(m, "ValueFunction")
        .def_static("identity", &ValueFunction::identity)
        .def_static("logarithm", &ValueFunction::logarithm)
        .def_static("affine", &ValueFunction::affine, py::arg("intercept"), py::arg("slope"))
        .def_static("table", &ValueFunction::table, py::arg("x"), py::arg("v"))
        .def("__call__", &ValueFunction::operator())
        .def("__repr__", [](const ValueFunction& v) { return "ValueFunction(" + v.describe() + ")"; });

    py::class_<DiscreteModel>(m, "DiscreteModel")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("support"), py::arg("prob"))
        .def_property_readonly("support", [](const DiscreteModel& d) { return to_vector(d.support()); })
        .def_property_readonly("prob", [](const DiscreteModel& d) { return to_vector(d.prob()); })
        .def("mean", &DiscreteModel::mean)
        .def("atom_index", &DiscreteModel::atom_index)
        .def("has_zero_mass_atoms", &DiscreteModel::has_zero_mass_atoms)
        .def("__len__", &DiscreteModel::size);

    py::class_<ContinuousModel>(m, "ContinuousModel")
        .def_static("gaussian", &ContinuousModel::gaussian, py::arg("mean") = 0.0, py::arg("stddev") = 1.0)
        .def_static("exponential", &ContinuousModel::exponential, py::arg("rate") = 1.0)
        .def_static("grid", &ContinuousModel::grid, py::arg("nodes"), py::arg("density"))
        .def_property_readonly("family",
                               [](const ContinuousModel& c) -> std::optional<std::string> {
                                   if (auto f = c.family()) return family_name(*f);
                                   return std::nullopt;
                               })
        .def_property_readonly("params", [](const ContinuousModel& c) { return to_vector(c.params()); })
        .def("density", &ContinuousModel::density)
        .def("mean", &ContinuousModel::mean)
        .def("survival", &ContinuousModel::survival);

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init([](double tol, int max_iter) { return SolverOptions{tol, max_iter}; }),
             py::arg("tolerance") = 1e-12, py::arg("max_iterations") = 200)
        .def_readwrite("tolerance", &SolverOptions::tolerance)
        .def_readwrite("max_iterations", &SolverOptions::max_iterations);

    py::enum_<TiltStatus>(m, "TiltStatus")
        .value("attained", TiltStatus::attained)
        .value("infimum_at_infinity", TiltStatus::infimum_at_infinity)
        .value("trivial_zero", TiltStatus::trivial_zero)
        .value("infeasible", TiltStatus::infeasible)
        .value("degenerate", TiltStatus::degenerate);

    py::class_<TiltSolution>(m, "TiltSolution")
        .def_readonly("theta_hat", &TiltSolution::theta_hat)
        .def_readonly("residual", &TiltSolution::residual)
        .def_readonly("iterations", &TiltSolution::iterations)
        .def_readonly("status", &TiltSolution::status);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("a", &BoundReport::a)
        .def_readonly("v_of_a", &BoundReport::v_of_a)
        .def_readonly("tilt", &BoundReport::tilt)
        .def_readonly("log_bound", &BoundReport::log_bound)
        .def_readonly("bound", &BoundReport::bound)
        .def_readonly("true_tail", &BoundReport::true_tail)
        .def_readonly("kl", &BoundReport::kl)
        .def_readonly("product_form", &BoundReport::product_form)
        .def_readonly("ratio_form", &BoundReport::ratio_form)
        .def_readonly("generalized_form", &BoundReport::generalized_form)
        .def_readonly("warnings", &BoundReport::warnings)
        .def("to_json", [](const BoundReport& r) { return io::report_to_json(r).dump(); });

    py::class_<Projection>(m, "Projection")
        .def_readonly("theta_hat", &Projection::theta_hat)
        .def_readonly("log_normalizer", &Projection::log_normalizer)
        .def_readonly("kl", &Projection::kl)
        .def_readonly("status", &Projection::status)
        .def_property_readonly("pmf",
                               [](const Projection& p) -> std::optional<DiscreteModel> {
                                   if (const auto* d = p.pmf()) return *d;
                                   return std::nullopt;
                               })
        .def("density", [](const Projection& p, double x) {
            if (const auto* td = std::get_if<TiltedDensity>(&p.tilted)) return td->density(x);
            throw UnsupportedCombination("discrete projections have no density; use pmf");
        });

    py::class_<GeneralizedBound>(m, "GeneralizedBound")
        .def_readonly("value", &GeneralizedBound::value)
        .def_readonly("limit_only", &GeneralizedBound::limit_only);

    py::class_<Sample>(m, "Sample")
        .def(py::init<std::vector<std::uint64_t>>(), py::arg("counts"))
        .def_property_readonly("counts",
                               [](const Sample& s) {
                                   return std::vector<std::uint64_t>(s.counts().begin(), s.counts().end());
                               })
        .def_property_readonly("total", &Sample::total);

    py::class_<ExperimentRow>(m, "ExperimentRow")
        .def_readonly("n", &ExperimentRow::n)
        .def_readonly("theta_ml", &ExperimentRow::theta_ml)
        .def_readonly("loglik_over_n", &ExperimentRow::loglik_over_n)
        .def_readonly("minus_entropy_target", &ExperimentRow::minus_entropy_target)
        .def_readonly("chernoff_target", &ExperimentRow::chernoff_target)
        .def_readonly("deviation", &ExperimentRow::deviation)
        .def_readonly("empirical_max_dev", &ExperimentRow::empirical_max_dev);

    const SolverOptions defaults{};

    m.def("example_pmf", &io::example_pmf, "The eight-atom worked-example pmf on 1..8.");
    m.def("validate_value_function", [](const py::object& model, const ValueFunction& v) { validate_value_function(as_model(model), v); }, py::arg("model"), py::arg("v"));
    m.def("mean_v", [](const py::object& model, const ValueFunction& v) { return mean_v(as_model(model), v); }, py::arg("model"), py::arg("v"));
    m.def("cgf", [](const py::object& model, const ValueFunction& v, double theta) { return cgf(as_model(model), v, theta); }, py::arg("model"), py::arg("v"), py::arg("theta"), "log E exp(theta v(X))");
    m.def("cgf_prime", [](const py::object& model, const ValueFunction& v, double theta) { return cgf_prime(as_model(model), v, theta); }, py::arg("model"), py::arg("v"), py::arg("theta"));
    m.def("tail_prob", [](const py::object& model, double a) { return tail_prob(as_model(model), a); }, py::arg("model"), py::arg("a"));

    m.def("optimize_theta", [](const py::object& model, const ValueFunction& v, double a, const SolverOptions& o) { return optimize_theta(as_model(model), v, a, o); }, py::arg("model"), py::arg("v"), py::arg("a"),
          py::arg("options") = defaults);
    m.def("bound_log", [](const py::object& model, const ValueFunction& v, double a, const SolverOptions& o) { return bound_log(as_model(model), v, a, o); }, py::arg("model"), py::arg("v"), py::arg("a"), py::arg("options") = defaults);
    m.def("bound", [](const py::object& model, const ValueFunction& v, double a, const SolverOptions& o) { return bound(as_model(model), v, a, o); }, py::arg("model"), py::arg("v"), py::arg("a"), py::arg("options") = defaults);
    m.def("analyze", [](const py::object& model, const ValueFunction& v, double a, const SolverOptions& o) { return analyze(as_model(model), v, a, o); }, py::arg("model"), py::arg("v"), py::arg("a"), py::arg("options") = defaults,
          "bound() plus the projection and every bound form that applies.");

    m.def("tilt", [](const py::object& model, const ValueFunction& v, double theta) { return tilt(as_model(model), v, theta); }, py::arg("model"), py::arg("v"), py::arg("theta"));
    m.def("i_projection", [](const py::object& model, const ValueFunction& v, double a, const SolverOptions& o) { return i_projection(as_model(model), v, a, o); }, py::arg("model"), py::arg("v"), py::arg("a"),
          py::arg("options") = defaults);
    m.def("kl_divergence", &kl_divergence, py::arg("p"), py::arg("q"));
    m.def("product_form_bound", &product_form_bound, py::arg("projection"), py::arg("model"));
    m.def("ratio_form_bound", [](const py::object& model, const Projection& p, double a) { return ratio_form_bound(as_model(model), p, a); }, py::arg("model"), py::arg("projection"), py::arg("a"));
    m.def("generalized_projection_bound", [](const py::object& model, const ValueFunction& v, double a, const SolverOptions& o) { return generalized_projection_bound(as_model(model), v, a, o); }, py::arg("model"), py::arg("v"),
          py::arg("a"), py::arg("options") = defaults);

    m.def("log_likelihood", &log_likelihood, py::arg("model"), py::arg("v"), py::arg("theta"), py::arg("sample"));
    m.def("ml_estimate", &ml_estimate, py::arg("model"), py::arg("v"), py::arg("sample"),
          py::arg("options") = defaults);
    m.def("chernoff_from_likelihood", &chernoff_from_likelihood, py::arg("model"), py::arg("sample"),
          py::arg("log_likelihood_max"));
    m.def(
        "asymptotic_experiment",
        [](const DiscreteModel& model, const ValueFunction& v, double a, const std::vector<std::uint64_t>& n_list,
           std::uint64_t seed, const SolverOptions& opts) {
            return asymptotic_experiment(model, v, a, n_list, seed, opts);
        },
        py::arg("model"), py::arg("v"), py::arg("a"), py::arg("n_list"), py::arg("seed") = 42,
        py::arg("options") = defaults);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
