#include "tiltbound/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "tiltbound/errors.hpp"

namespace tiltbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Points carrying probability mass: DiscreteModel atoms or grid nodes.
struct AtomView {
    std::span<const double> x;
    std::span<const double> mass;
};

std::optional<AtomView> atoms_of(const Model& model) {
    if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        return AtomView{d->support(), d->prob()};
    }
    const auto& c = std::get<ContinuousModel>(model);
    if (c.is_grid()) return AtomView{c.nodes(), c.node_mass()};
    return std::nullopt;
}

TiltMoments atomic_moments(const AtomView& atoms, const ValueFunction& v, double theta) {
    const std::size_t n = atoms.x.size();
    std::vector<double> vals(n, 0.0);
    std::vector<double> expo(n, -kInf);
    double shift = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(atoms.mass[i] > 0.0)) continue;
        const double vi = v(atoms.x[i]);
        if (!std::isfinite(vi)) {
            throw EvaluationError("v(" + fmt(atoms.x[i]) + ") is not finite on a positive-mass atom");
        }
        vals[i] = vi;
        expo[i] = std::log(atoms.mass[i]) + theta * vi;
        shift = std::max(shift, expo[i]);
    }
    double s0 = 0.0;
    double s1 = 0.0;
    double base_shift = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (expo[i] == -kInf) continue;
        const double w = std::exp(expo[i] - shift);
        s0 += w;
        s1 += w * vals[i];
        base_shift = std::max(base_shift, std::log(atoms.mass[i]));
    }
    // Total mass summed the same way, so that K(0) is exactly zero even when
    // the masses add up to one only within rounding.
    double base = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (expo[i] != -kInf) base += std::exp(std::log(atoms.mass[i]) - base_shift);
    }
    const double mean = s1 / s0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (expo[i] == -kInf) continue;
        const double d = vals[i] - mean;
        s2 += std::exp(expo[i] - shift) * d * d;
    }
    return {(shift - base_shift) + (std::log(s0) - std::log(base)), mean, s2 / s0};
}

TiltMoments closed_form_moments(const ContinuousModel& c, const ValueFunction& v, double theta) {
    const Family fam = *c.family();
    const auto p = c.params();
    if (v.kind() == ValueFunction::Kind::table) {
        throw UnsupportedCombination("table value functions need a discrete or grid model");
    }
    if (v.kind() == ValueFunction::Kind::logarithm) {
        if (fam != Family::exponential) {
            throw InvalidValueFunction("log value function requires a strictly positive support");
        }
        // E X^theta = Gamma(1 + theta) / rate^theta for theta > -1.
        if (!(theta > -1.0)) {
            throw DivergentMGF("E X^theta diverges for theta <= -1 under the exponential family");
        }
        const double log_rate = std::log(p[0]);
        return {std::lgamma(1.0 + theta) - theta * log_rate,
                boost::math::digamma(1.0 + theta) - log_rate,
                boost::math::trigamma(1.0 + theta)};
    }
    const auto [c0, c1] = *v.affine_form();
    const double s = theta * c1;
    if (fam == Family::gaussian) {
        const double mu = p[0];
        const double var = p[1] * p[1];
        return {theta * c0 + s * mu + 0.5 * s * s * var, c0 + c1 * (mu + var * s), c1 * c1 * var};
    }
    const double rate = p[0];
    if (!(s < rate)) {
        throw DivergentMGF("theta = " + fmt(theta) + " outside the exponential family's convergence region");
    }
    const double gap = rate - s;
    return {theta * c0 - std::log1p(-s / rate), c0 + c1 / gap, c1 * c1 / (gap * gap)};
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteModel

DiscreteModel::DiscreteModel(std::vector<double> support, std::vector<double> prob)
    : support_(std::move(support)), prob_(std::move(prob)) {
    if (support_.empty()) throw InvalidModel("empty support");
    if (support_.size() != prob_.size()) {
        throw InvalidModel("support and prob lengths differ");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (!std::isfinite(support_[i])) throw InvalidModel("support points must be finite");
        if (i > 0 && !(support_[i] > support_[i - 1])) {
            throw InvalidModel("support must be strictly increasing");
        }
        if (!(prob_[i] >= 0.0) || !std::isfinite(prob_[i])) {
            throw InvalidModel("probabilities must be finite and non-negative");
        }
        total += prob_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidModel("probabilities sum to " + fmt(total) + ", not 1");
    }
}

bool DiscreteModel::has_zero_mass_atoms() const {
    return std::any_of(prob_.begin(), prob_.end(), [](double q) { return q == 0.0; });
}

std::optional<std::size_t> DiscreteModel::atom_index(double x) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
}

double DiscreteModel::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) m += prob_[i] * support_[i];
    return m;
}

// ---------------------------------------------------------------------------
// ContinuousModel

std::string family_name(Family f) {
    return f == Family::gaussian ? "gaussian" : "exponential";
}

ContinuousModel ContinuousModel::gaussian(double mean, double stddev) {
    if (!std::isfinite(mean) || !(stddev > 0.0) || !std::isfinite(stddev)) {
        throw InvalidModel("gaussian needs finite mean and positive finite stddev");
    }
    ContinuousModel m;
    m.family_ = Family::gaussian;
    m.params_ = {mean, stddev};
    return m;
}

ContinuousModel ContinuousModel::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw InvalidModel("exponential needs a positive finite rate");
    }
    ContinuousModel m;
    m.family_ = Family::exponential;
    m.params_ = {rate};
    return m;
}

ContinuousModel ContinuousModel::grid(std::vector<double> nodes, std::vector<double> density) {
    if (nodes.size() < 2 || nodes.size() != density.size()) {
        throw InvalidModel("grid needs at least two nodes and one density value per node");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i]) || !std::isfinite(density[i])) {
            throw InvalidModel("grid values must be finite");
        }
        if (i > 0 && !(nodes[i] > nodes[i - 1])) {
            throw InvalidModel("grid nodes must be strictly increasing");
        }
        if (density[i] < 0.0) throw InvalidModel("grid density must be non-negative");
    }
    const std::size_t n = nodes.size();
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? nodes[i] - nodes[i - 1] : 0.0;
        const double right = i + 1 < n ? nodes[i + 1] - nodes[i] : 0.0;
        weight[i] = 0.5 * (left + right) * density[i];
    }
    const double integral = std::accumulate(weight.begin(), weight.end(), 0.0);
    if (!(std::abs(integral - 1.0) <= 1e-6)) {
        throw InvalidModel("grid density integrates to " + fmt(integral) + ", not 1 within 1e-6");
    }
    for (double& w : weight) w /= integral;

    ContinuousModel m;
    m.nodes_ = std::move(nodes);
    m.density_ = std::move(density);
    m.mass_ = std::move(weight);
    m.integral_ = integral;
    return m;
}

double ContinuousModel::density(double x) const {
    if (family_ == Family::gaussian) {
        const double z = (x - params_[0]) / params_[1];
        return std::exp(-0.5 * z * z) / (params_[1] * std::sqrt(2.0 * M_PI));
    }
    if (family_ == Family::exponential) {
        return x < 0.0 ? 0.0 : params_[0] * std::exp(-params_[0] * x);
    }
    if (x < nodes_.front() || x > nodes_.back()) return 0.0;
    auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    if (hi == nodes_.end()) return density_.back() / integral_;
    const auto k = static_cast<std::size_t>(hi - nodes_.begin());
    const double t = (x - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
    return (density_[k - 1] + t * (density_[k] - density_[k - 1])) / integral_;
}

double ContinuousModel::mean() const {
    if (family_ == Family::gaussian) return params_[0];
    if (family_ == Family::exponential) return 1.0 / params_[0];
    double m = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) m += mass_[i] * nodes_[i];
    return m;
}

double ContinuousModel::survival(double a) const {
    if (family_ == Family::gaussian) {
        return 0.5 * std::erfc((a - params_[0]) / (params_[1] * std::sqrt(2.0)));
    }
    if (family_ == Family::exponential) {
        return a <= 0.0 ? 1.0 : std::exp(-params_[0] * a);
    }
    if (a <= nodes_.front()) return 1.0;
    if (a >= nodes_.back()) return 0.0;
    // Exact integral of the piecewise-linear interpolant over [a, last node].
    auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), a);
    const auto k = static_cast<std::size_t>(hi - nodes_.begin());
    const double g_a = density(a) * integral_;
    double area = 0.5 * (nodes_[k] - a) * (g_a + density_[k]);
    for (std::size_t j = k; j + 1 < nodes_.size(); ++j) {
        area += 0.5 * (nodes_[j + 1] - nodes_[j]) * (density_[j] + density_[j + 1]);
    }
    return std::clamp(area / integral_, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Moment functionals

TiltMoments tilt_moments(const Model& model, const ValueFunction& v, double theta) {
    if (!std::isfinite(theta)) throw DivergentMGF("theta must be finite");
    if (auto atoms = atoms_of(model)) return atomic_moments(*atoms, v, theta);
    return closed_form_moments(std::get<ContinuousModel>(model), v, theta);
}

double mean_v(const Model& model, const ValueFunction& v) {
    if (auto atoms = atoms_of(model)) {
        double m = 0.0;
        for (std::size_t i = 0; i < atoms->x.size(); ++i) {
            if (!(atoms->mass[i] > 0.0)) continue;
            const double vi = v(atoms->x[i]);
            if (!std::isfinite(vi)) {
                throw EvaluationError("v(" + fmt(atoms->x[i]) + ") is not finite on a positive-mass atom");
            }
            m += atoms->mass[i] * vi;
        }
        return m;
    }
    return closed_form_moments(std::get<ContinuousModel>(model), v, 0.0).mean;
}

double cgf(const Model& model, const ValueFunction& v, double theta) {
    return tilt_moments(model, v, theta).log_mgf;
}

double cgf_prime(const Model& model, const ValueFunction& v, double theta) {
    return tilt_moments(model, v, theta).mean;
}

double cgf_second(const Model& model, const ValueFunction& v, double theta) {
    return tilt_moments(model, v, theta).variance;
}

double tail_prob(const Model& model, double a) {
    if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        const auto x = d->support();
        const auto q = d->prob();
        double t = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] >= a) t += q[i];
        }
        return std::min(t, 1.0);
    }
    return std::get<ContinuousModel>(model).survival(a);
}

double model_mean(const Model& model) {
    return std::visit([](const auto& m) { return m.mean(); }, model);
}

double point_weight(const Model& model, double x) {
    if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        auto idx = d->atom_index(x);
        return idx ? d->prob()[*idx] : 0.0;
    }
    return std::get<ContinuousModel>(model).density(x);
}

ValueRange value_range(const Model& model, const ValueFunction& v) {
    if (auto atoms = atoms_of(model)) {
        ValueRange r{kInf, -kInf};
        for (std::size_t i = 0; i < atoms->x.size(); ++i) {
            if (!(atoms->mass[i] > 0.0)) continue;
            const double vi = v(atoms->x[i]);
            r.lo = std::min(r.lo, vi);
            r.hi = std::max(r.hi, vi);
        }
        return r;
    }
    const auto& c = std::get<ContinuousModel>(model);
    if (v.kind() == ValueFunction::Kind::logarithm) return {-kInf, kInf};
    if (v.kind() == ValueFunction::Kind::table) {
        throw UnsupportedCombination("table value functions need a discrete or grid model");
    }
    const auto [c0, c1] = *v.affine_form();
    if (c1 == 0.0) return {c0, c0};
    if (*c.family() == Family::gaussian) return {-kInf, kInf};
    return c1 > 0.0 ? ValueRange{c0, kInf} : ValueRange{-kInf, c0};
}

std::pair<double, double> convergence_interval(const Model& model, const ValueFunction& v) {
    if (atoms_of(model)) return {-kInf, kInf};
    const auto& c = std::get<ContinuousModel>(model);
    if (*c.family() == Family::gaussian) return {-kInf, kInf};
    if (v.kind() == ValueFunction::Kind::logarithm) return {-1.0, kInf};
    if (v.kind() == ValueFunction::Kind::table) {
        throw UnsupportedCombination("table value functions need a discrete or grid model");
    }
    const double c1 = v.affine_form()->second;
    const double rate = c.params()[0];
    if (c1 > 0.0) return {-kInf, rate / c1};
    if (c1 < 0.0) return {rate / c1, kInf};
    return {-kInf, kInf};
}

ExtremeLevel extreme_level(const Model& model, const ValueFunction& v, bool upper) {
    auto atoms = atoms_of(model);
    if (!atoms) return {0.0, std::numeric_limits<double>::quiet_NaN()};
    const auto range = value_range(model, v);
    const double edge = upper ? range.hi : range.lo;
    ExtremeLevel level{0.0, upper ? -kInf : kInf};
    for (std::size_t i = 0; i < atoms->x.size(); ++i) {
        if (!(atoms->mass[i] > 0.0)) continue;
        const double vi = v(atoms->x[i]);
        if (vi == edge) {
            level.mass += atoms->mass[i];
        } else {
            level.next_value = upper ? std::max(level.next_value, vi) : std::min(level.next_value, vi);
        }
    }
    return level;
}

void validate_value_function(const Model& model, const ValueFunction& v) {
    auto atoms = atoms_of(model);
    if (!atoms) {
        const auto& c = std::get<ContinuousModel>(model);
        if (v.kind() == ValueFunction::Kind::table) {
            throw UnsupportedCombination("table value functions need a discrete or grid model");
        }
        if (v.kind() == ValueFunction::Kind::logarithm && *c.family() != Family::exponential) {
            throw InvalidValueFunction("log value function requires a strictly positive support");
        }
        if (auto af = v.affine_form(); af && af->second < 0.0) {
            throw InvalidValueFunction("v must be non-decreasing (negative slope)");
        }
        return;
    }

    std::vector<double> xs;
    std::vector<double> vs;
    for (std::size_t i = 0; i < atoms->x.size(); ++i) {
        if (!(atoms->mass[i] > 0.0)) continue;
        const double x = atoms->x[i];
        if (v.kind() == ValueFunction::Kind::logarithm && !(x > 0.0)) {
            throw InvalidValueFunction("log value function requires a strictly positive support, found " + fmt(x));
        }
        const double vx = v(x);
        if (!std::isfinite(vx)) {
            throw InvalidValueFunction("v(" + fmt(x) + ") is not finite");
        }
        xs.push_back(x);
        vs.push_back(vx);
    }
    auto slack = [](double a, double b) {
        return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (vs[i] < vs[i - 1] - slack(vs[i], vs[i - 1])) {
            throw InvalidValueFunction("v must be non-decreasing: v(" + fmt(xs[i - 1]) + ") > v(" + fmt(xs[i]) + ")");
        }
    }
    auto check_pair = [&](std::size_t i, std::size_t j) {
        const double mid = v(0.5 * (xs[i] + xs[j]));
        const double chord = 0.5 * (vs[i] + vs[j]);
        if (mid < chord - slack(vs[i], vs[j])) {
            throw InvalidValueFunction("v must be concave: midpoint of [" + fmt(xs[i]) + ", " + fmt(xs[j]) +
                                       "] lies below the chord");
        }
    };
    const std::size_t n = xs.size();
    if (n <= 256) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) check_pair(i, j);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t step = 1; i + step < n; step *= 2) check_pair(i, i + step);
    }
}

}  // namespace tiltbound
