#include "tiltbound/chernoff.hpp"

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

void check_options(const SolverOptions& opts) {
    if (!(opts.tolerance > 0.0)) throw InputError("solver tolerance must be positive");
    if (opts.max_iterations < 1) throw InputError("max_iterations must be at least 1");
}

double tolerance_for(const SolverOptions& opts, double target) {
    return opts.tolerance * std::max(1.0, std::abs(target));
}

}  // namespace

std::string to_string(TiltStatus s) {
    switch (s) {
        case TiltStatus::attained: return "attained";
        case TiltStatus::infimum_at_infinity: return "infimum-at-infinity";
        case TiltStatus::trivial_zero: return "trivial-zero";
        case TiltStatus::infeasible: return "infeasible";
        case TiltStatus::degenerate: return "degenerate";
    }
    return "unknown";
}

TiltStatus tilt_status_from_string(const std::string& s) {
    for (auto st : {TiltStatus::attained, TiltStatus::infimum_at_infinity, TiltStatus::trivial_zero,
                    TiltStatus::infeasible, TiltStatus::degenerate}) {
        if (to_string(st) == s) return st;
    }
    throw ParseError("unknown tilt status '" + s + "'");
}

TiltSolution solve_tilted_mean(const Model& model, const ValueFunction& v, double target,
                               const SolverOptions& opts) {
    check_options(opts);
    if (!std::isfinite(target)) throw InfeasibleTarget("target value " + fmt(target) + " is not finite");

    const ValueRange range = value_range(model, v);
    if (range.lo == range.hi) {
        throw DegenerateValueFunction("v is constant (" + fmt(range.lo) + ") on the support");
    }
    if (target > range.hi || target < range.lo) {
        throw InfeasibleTarget("target " + fmt(target) + " outside the range of v [" + fmt(range.lo) + ", " +
                               fmt(range.hi) + "]");
    }

    const double thr = tolerance_for(opts, target);
    const TiltMoments at_zero = tilt_moments(model, v, 0.0);
    if (std::abs(at_zero.mean - target) <= thr) {
        return {0.0, std::abs(at_zero.mean - target), 1, TiltStatus::trivial_zero};
    }

    // Work in phi = dir * theta so that g(phi) = dir * (K'(dir * phi) - target)
    // is increasing and negative at phi = 0.
    const double dir = target > at_zero.mean ? 1.0 : -1.0;
    const bool upper = dir > 0.0;
    if (target == (upper ? range.hi : range.lo)) {
        return {dir * kInf, 0.0, 1, TiltStatus::infimum_at_infinity};
    }

    const auto conv = convergence_interval(model, v);
    const double edge = upper ? conv.second : -conv.first;

    // Beyond cap the atoms below the extreme level carry relative weight under
    // e^-745, so K' equals the extreme value to double precision.
    double cap = kInf;
    const ExtremeLevel level = extreme_level(model, v, upper);
    if (level.mass > 0.0) {
        const double gap = std::abs((upper ? range.hi : range.lo) - level.next_value);
        cap = (745.0 + std::max(0.0, -std::log(level.mass))) / gap;
    }

    int iterations = 1;
    auto g_at = [&](double phi, TiltMoments& m) {
        m = tilt_moments(model, v, dir * phi);
        ++iterations;
        return dir * (m.mean - target);
    };
    auto fail = [&](const std::string& why, double residual) {
        throw ConvergenceError(why + " after " + std::to_string(iterations) + " evaluations (residual " +
                               fmt(residual) + ", target " + fmt(target) + ")");
    };

    double lo = 0.0;
    double g_lo = dir * (at_zero.mean - target);
    TiltMoments m_lo = at_zero;
    double hi = std::isfinite(edge) ? std::min(1.0, 0.5 * edge) : 1.0;
    hi = std::min(hi, cap);
    TiltMoments m_hi{};
    double g_hi = 0.0;
    for (;;) {
        g_hi = g_at(hi, m_hi);
        if (std::abs(g_hi) <= thr) {
            return {dir * hi, std::abs(g_hi), iterations, TiltStatus::attained};
        }
        if (g_hi > 0.0) break;
        lo = hi;
        g_lo = g_hi;
        m_lo = m_hi;
        if (hi >= cap) {
            return {dir * kInf, std::abs(g_hi), iterations, TiltStatus::infimum_at_infinity};
        }
        double next = std::min(2.0 * hi, cap);
        if (std::isfinite(edge)) next = std::min(next, 0.5 * (hi + edge));
        if (!(next > hi)) fail("bracket expansion stalled", std::abs(g_hi));
        hi = next;
        if (iterations >= opts.max_iterations) fail("bracket not found", std::abs(g_hi));
    }

    // Safeguarded Newton: fall back to bisection when the Newton point leaves
    // the bracket or the residual fails to halve.
    double phi = std::abs(g_hi) < std::abs(g_lo) ? hi : lo;
    TiltMoments m = std::abs(g_hi) < std::abs(g_lo) ? m_hi : m_lo;
    double g = std::abs(g_hi) < std::abs(g_lo) ? g_hi : g_lo;
    bool bisect = false;
    for (;;) {
        double next = 0.5 * (lo + hi);
        if (!bisect && m.variance > 0.0) {
            const double newton = phi - g / m.variance;
            if (std::isfinite(newton) && newton > lo && newton < hi) next = newton;
        }
        if (!(next > lo && next < hi)) {
            // Bracket collapsed to adjacent doubles.
            const bool lo_better = std::abs(g_lo) <= std::abs(g_hi);
            const double best = lo_better ? lo : hi;
            const double res = std::abs(lo_better ? g_lo : g_hi);
            if (res <= thr) return {dir * best, res, iterations, TiltStatus::attained};
            fail("bracket collapsed", res);
        }
        TiltMoments m_next{};
        const double g_next = g_at(next, m_next);
        if (std::abs(g_next) <= thr) {
            return {dir * next, std::abs(g_next), iterations, TiltStatus::attained};
        }
        bisect = std::abs(g_next) > 0.5 * std::abs(g);
        if (g_next < 0.0) {
            lo = next;
            g_lo = g_next;
        } else {
            hi = next;
            g_hi = g_next;
        }
        phi = next;
        g = g_next;
        m = m_next;
        if (iterations >= opts.max_iterations) fail("iteration limit reached", std::abs(g));
    }
}

TiltSolution optimize_theta(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts) {
    check_options(opts);
    if (!std::isfinite(a)) throw InputError("threshold a must be finite");
    const double mean = model_mean(model);
    if (a < mean - opts.tolerance * std::max(1.0, std::abs(mean))) {
        throw BelowMeanError("hypothesis a >= E[X] violated (a = " + fmt(a) + ", E[X] = " + fmt(mean) + ")");
    }
    const double target = v(a);
    if (!std::isfinite(target)) throw EvaluationError("v(a) is not finite at a = " + fmt(a));

    const ValueRange range = value_range(model, v);
    if (range.lo == range.hi) {
        throw DegenerateValueFunction("v is constant (" + fmt(range.lo) + ") on the support");
    }
    // With v concave and non-decreasing, a >= E X implies v(a) >= E v(X); the
    // minimum over theta >= 0 then sits at theta = 0 only when they coincide.
    const double ev = mean_v(model, v);
    if (target <= ev + tolerance_for(opts, target)) {
        return {0.0, std::abs(ev - target), 1, TiltStatus::trivial_zero};
    }
    return solve_tilted_mean(model, v, target, opts);
}

double log_bound_at(const Model& model, const ValueFunction& v, double a, const TiltSolution& tilt) {
    switch (tilt.status) {
        case TiltStatus::trivial_zero:
            return 0.0;
        case TiltStatus::infimum_at_infinity:
            return std::log(extreme_level(model, v, tilt.theta_hat > 0.0).mass);
        case TiltStatus::infeasible:
            return -kInf;
        case TiltStatus::degenerate:
            return 0.0;
        case TiltStatus::attained:
            break;
    }
    // theta = 0 is always admissible, so the minimum never exceeds 0.
    const double c = cgf(model, v, tilt.theta_hat) - tilt.theta_hat * v(a);
    return std::min(c, 0.0);
}

double bound_log(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts) {
    return log_bound_at(model, v, a, optimize_theta(model, v, a, opts));
}

BoundReport bound(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts) {
    BoundReport r;
    r.a = a;
    r.v_of_a = v(a);
    try {
        r.tilt = optimize_theta(model, v, a, opts);
        r.log_bound = log_bound_at(model, v, a, r.tilt);
        if (r.tilt.status == TiltStatus::infimum_at_infinity) {
            r.warnings.push_back("v(a) is the maximum of v on the support; the minimum is approached as theta -> inf");
        }
    } catch (const InfeasibleTarget& e) {
        r.tilt = {kInf, kInf, 0, TiltStatus::infeasible};
        r.log_bound = -kInf;
        r.warnings.push_back(std::string(e.what()) + "; the tail probability is 0");
    } catch (const DegenerateValueFunction& e) {
        const double constant = value_range(model, v).lo;
        const bool covered = r.v_of_a <= constant;
        r.tilt = {0.0, 0.0, 0, TiltStatus::degenerate};
        r.log_bound = covered ? 0.0 : -kInf;
        r.warnings.push_back(e.what());
    }
    r.bound = std::exp(r.log_bound);
    r.kl = r.log_bound == 0.0 ? 0.0 : -r.log_bound;
    r.true_tail = tail_prob(model, a);
    return r;
}

}  // namespace tiltbound
