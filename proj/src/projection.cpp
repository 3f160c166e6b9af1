#include "tiltbound/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

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

DiscreteModel tilt_pmf(const DiscreteModel& d, const ValueFunction& v, double theta, double log_normalizer) {
    const auto x = d.support();
    const auto q = d.prob();
    std::vector<double> p(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] > 0.0)) continue;
        // Multiplying keeps p == q exactly at theta = 0; the log form avoids
        // overflow when the tilt factor alone is out of range.
        const double e = theta * v(x[i]) - log_normalizer;
        p[i] = std::abs(e) < 700.0 ? q[i] * std::exp(e) : std::exp(std::log(q[i]) + e);
    }
    return DiscreteModel({x.begin(), x.end()}, std::move(p));
}

// Limit of the tilted law as theta -> +/-inf: the model conditioned on the
// extreme level set of v.
DiscreteModel extreme_pmf(std::span<const double> x, std::span<const double> mass, const ValueFunction& v,
                          double edge) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (mass[i] > 0.0 && v(x[i]) == edge) total += mass[i];
    }
    std::vector<double> p(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (mass[i] > 0.0 && v(x[i]) == edge) p[i] = mass[i] / total;
    }
    return DiscreteModel({x.begin(), x.end()}, std::move(p));
}

}  // namespace

// ---------------------------------------------------------------------------
// TiltedDensity

TiltedDensity::TiltedDensity(ContinuousModel base, ValueFunction v, double theta, double log_normalizer)
    : base_(std::move(base)), v_(std::move(v)), theta_(theta), log_normalizer_(log_normalizer) {
    if (base_.is_grid()) {
        const auto nodes = base_.nodes();
        const auto dens = base_.node_density();
        node_density_.resize(nodes.size(), 0.0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (dens[i] > 0.0) {
                node_density_[i] = dens[i] / base_.grid_integral() *
                                   std::exp(theta_ * v_(nodes[i]) - log_normalizer_);
            }
        }
    }
}

double TiltedDensity::log_likelihood_ratio(double x) const {
    return theta_ * v_(x) - log_normalizer_;
}

double TiltedDensity::density(double x) const {
    if (!base_.is_grid()) {
        const double q = base_.density(x);
        return q > 0.0 ? q * std::exp(log_likelihood_ratio(x)) : 0.0;
    }
    const auto nodes = base_.nodes();
    if (x < nodes.front() || x > nodes.back()) return 0.0;
    auto hi = std::upper_bound(nodes.begin(), nodes.end(), x);
    if (hi == nodes.end()) return node_density_.back();
    const auto k = static_cast<std::size_t>(hi - nodes.begin());
    const double t = (x - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
    return node_density_[k - 1] + t * (node_density_[k] - node_density_[k - 1]);
}

std::optional<ContinuousModel> TiltedDensity::closed_form() const {
    const auto fam = base_.family();
    const auto af = v_.affine_form();
    if (!fam || !af) return std::nullopt;
    const double s = theta_ * af->second;
    const auto p = base_.params();
    if (*fam == Family::gaussian) {
        return ContinuousModel::gaussian(p[0] + p[1] * p[1] * s, p[1]);
    }
    return ContinuousModel::exponential(p[0] - s);
}

// ---------------------------------------------------------------------------
// Projection

ProjectionRecord Projection::record() const {
    ProjectionRecord rec;
    rec.theta_hat = theta_hat;
    rec.log_normalizer = log_normalizer;
    rec.kl = kl;
    if (const auto* d = pmf()) {
        rec.pmf = *d;
    } else if (auto cf = std::get<TiltedDensity>(tilted).closed_form()) {
        rec.family = family_name(*cf->family());
        rec.family_params.assign(cf->params().begin(), cf->params().end());
    }
    return rec;
}

Projection tilt(const Model& model, const ValueFunction& v, double theta) {
    const TiltMoments m = tilt_moments(model, v, theta);
    const double kl = std::max(0.0, theta * m.mean - m.log_mgf);
    const TiltStatus status = theta == 0.0 ? TiltStatus::trivial_zero : TiltStatus::attained;
    if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        return {tilt_pmf(*d, v, theta, m.log_mgf), theta, m.log_mgf, kl, status};
    }
    return {TiltedDensity(std::get<ContinuousModel>(model), v, theta, m.log_mgf), theta, m.log_mgf, kl, status};
}

Projection projection_from_tilt(const Model& model, const ValueFunction& v, double a, const TiltSolution& sol) {
    switch (sol.status) {
        case TiltStatus::trivial_zero: {
            Projection p = tilt(model, v, 0.0);
            p.kl = 0.0;
            return p;
        }
        case TiltStatus::attained: {
            Projection p = tilt(model, v, sol.theta_hat);
            p.kl = std::max(0.0, sol.theta_hat * v(a) - p.log_normalizer);
            return p;
        }
        case TiltStatus::infimum_at_infinity: {
            const bool upper = sol.theta_hat > 0.0;
            const auto range = value_range(model, v);
            const double edge = upper ? range.hi : range.lo;
            const double mass = extreme_level(model, v, upper).mass;
            Projection p{DiscreteModel({0.0}, {1.0}), sol.theta_hat, kInf, -std::log(mass), sol.status};
            if (const auto* d = std::get_if<DiscreteModel>(&model)) {
                p.tilted = extreme_pmf(d->support(), d->prob(), v, edge);
            } else {
                const auto& c = std::get<ContinuousModel>(model);
                p.tilted = extreme_pmf(c.nodes(), c.node_mass(), v, edge);
            }
            return p;
        }
        case TiltStatus::infeasible:
            throw InfeasibleTarget("v(a) = " + fmt(v(a)) + " exceeds the range of v; no projection exists");
        case TiltStatus::degenerate:
            throw DegenerateValueFunction("v is constant on the support");
    }
    throw InternalInvariantViolation("unknown tilt status");
}

Projection i_projection(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts) {
    return projection_from_tilt(model, v, a, optimize_theta(model, v, a, opts));
}

double kl_divergence(const DiscreteModel& p, const DiscreteModel& q) {
    const auto xp = p.support();
    const auto xq = q.support();
    if (!std::equal(xp.begin(), xp.end(), xq.begin(), xq.end())) {
        throw SupportMismatch("kl_divergence needs identical support lists");
    }
    const auto pp = p.prob();
    const auto qq = q.prob();
    double kl = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
        if (pp[i] == 0.0) continue;
        if (qq[i] == 0.0) return kInf;
        kl += pp[i] * (std::log(pp[i]) - std::log(qq[i]));
    }
    return kl;
}

double product_form_bound(const Projection& projection, const DiscreteModel& model) {
    const DiscreteModel* p = projection.pmf();
    if (!p) throw UnsupportedCombination("product form needs a discrete projection");
    const auto xs = model.support();
    if (!std::equal(xs.begin(), xs.end(), p->support().begin(), p->support().end())) {
        throw SupportMismatch("projection and model supports differ");
    }
    const auto q = model.prob();
    const auto ph = p->prob();
    const bool limit = projection.status == TiltStatus::infimum_at_infinity;
    double log_value = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (ph[i] > 0.0 && q[i] == 0.0) {
            throw InternalInvariantViolation("projection puts mass on a zero-mass atom");
        }
        if (ph[i] == 0.0) {
            if (q[i] > 0.0 && !limit) {
                throw InternalInvariantViolation("tilted pmf vanishes on a positive-mass atom");
            }
            continue;
        }
        log_value += ph[i] * (std::log(q[i]) - std::log(ph[i]));
    }
    return std::exp(log_value);
}

double ratio_form_bound(const Model& model, const Projection& projection, double a) {
    if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        const DiscreteModel* p = projection.pmf();
        if (!p) throw UnsupportedCombination("discrete model needs a discrete projection");
        const auto idx = d->atom_index(a);
        if (!idx) throw NotAnAtom("a = " + fmt(a) + " is not an atom of the support");
        const double qa = d->prob()[*idx];
        const double pa = p->prob()[*idx];
        if (qa == 0.0 || pa == 0.0) {
            throw RatioUndefined("Q(a) = " + fmt(qa) + ", P(a) = " + fmt(pa));
        }
        return qa / pa;
    }
    const auto& c = std::get<ContinuousModel>(model);
    const auto* td = std::get_if<TiltedDensity>(&projection.tilted);
    if (!td) throw RatioUndefined("the limiting projection has no density at a");
    const double qa = c.density(a);
    const auto closed = td->closed_form();
    const double pa = closed ? closed->density(a) : td->density(a);
    if (qa == 0.0 || pa == 0.0) {
        throw RatioUndefined("q(a) = " + fmt(qa) + ", p(a) = " + fmt(pa));
    }
    return qa / pa;
}

GeneralizedBound generalized_projection_bound(const Model& model, const ValueFunction& v, double a,
                                              const SolverOptions& opts) {
    const TiltSolution sol = optimize_theta(model, v, a, opts);
    switch (sol.status) {
        case TiltStatus::trivial_zero:
            return {1.0, false};
        case TiltStatus::infimum_at_infinity:
            return {std::exp(log_bound_at(model, v, a, sol)), true};
        default:
            break;
    }
    const double log_rn = sol.theta_hat * v(a) - cgf(model, v, sol.theta_hat);
    if (!(std::exp(log_rn) > 0.0)) throw RatioUndefined("dP/dQ vanishes at a = " + fmt(a));
    return {std::exp(-log_rn), false};
}

BoundReport analyze(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts) {
    BoundReport r = bound(model, v, a, opts);
    const auto st = r.tilt.status;
    if (st == TiltStatus::infeasible || st == TiltStatus::degenerate) return r;

    const Projection proj = projection_from_tilt(model, v, a, r.tilt);
    r.projection = proj.record();
    if (const auto* d = std::get_if<DiscreteModel>(&model)) {
        r.product_form = product_form_bound(proj, *d);
    }
    try {
        r.ratio_form = ratio_form_bound(model, proj, a);
    } catch (const NotAnAtom&) {
    } catch (const RatioUndefined&) {
    } catch (const UnsupportedCombination&) {
    }
    if (st == TiltStatus::attained) {
        r.generalized_form = std::exp(proj.log_normalizer - proj.theta_hat * v(a));
    } else {
        r.generalized_form = r.bound;
    }
    return r;
}

}  // namespace tiltbound
