#include "tiltbound/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tiltbound/errors.hpp"
#include "tiltbound/projection.hpp"

namespace tiltbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sample(const DiscreteModel& model, const Sample& sample) {
    if (sample.counts().size() != model.size()) {
        throw SupportMismatch("sample has " + std::to_string(sample.counts().size()) + " counts for " +
                              std::to_string(model.size()) + " atoms");
    }
    const auto q = model.prob();
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (sample.counts()[i] > 0 && q[i] == 0.0) {
            std::ostringstream os;
            os.precision(17);
            os << "observations at x = " << model.support()[i] << ", an atom with zero probability";
            throw ImpossibleSample(os.str());
        }
    }
}

// Which extreme level of v (if any) holds every observation.
enum class Concentration { interior, upper, lower };

Concentration concentration(const DiscreteModel& model, const ValueFunction& v, const Sample& sample) {
    const ValueRange range = value_range(Model{model}, v);
    bool all_top = true;
    bool all_bottom = true;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (sample.counts()[i] == 0) continue;
        const double vi = v(model.support()[i]);
        all_top = all_top && vi == range.hi;
        all_bottom = all_bottom && vi == range.lo;
    }
    if (all_top) return Concentration::upper;
    if (all_bottom) return Concentration::lower;
    return Concentration::interior;
}

}  // namespace

Sample::Sample(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
    if (total_ == 0) throw InputError("sample must contain at least one observation");
}

std::vector<double> Sample::frequencies() const {
    std::vector<double> f(counts_.size());
    const double n = static_cast<double>(total_);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(counts_[i]) / n;
    return f;
}

double log_likelihood(const DiscreteModel& model, const ValueFunction& v, double theta, const Sample& sample) {
    check_sample(model, sample);
    const double k = cgf(Model{model}, v, theta);
    const auto x = model.support();
    const auto q = model.prob();
    double l = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto n_i = sample.counts()[i];
        if (n_i == 0) continue;
        l += static_cast<double>(n_i) * (std::log(q[i]) + theta * v(x[i]) - k);
    }
    return l;
}

double mean_log_likelihood(const DiscreteModel& model, const ValueFunction& v, double theta,
                           std::span<const double> freq) {
    if (freq.size() != model.size()) throw SupportMismatch("frequency vector length differs from the support");
    const double k = cgf(Model{model}, v, theta);
    const auto x = model.support();
    const auto q = model.prob();
    double l = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (freq[i] == 0.0) continue;
        if (q[i] == 0.0) throw ImpossibleSample("positive frequency on a zero-probability atom");
        l += freq[i] * (std::log(q[i]) + theta * v(x[i]) - k);
    }
    return l;
}

double sample_mean_v(const DiscreteModel& model, const ValueFunction& v, const Sample& sample) {
    check_sample(model, sample);
    double s = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (sample.counts()[i] == 0) continue;
        s += static_cast<double>(sample.counts()[i]) * v(model.support()[i]);
    }
    return s / static_cast<double>(sample.total());
}

TiltSolution ml_estimate(const DiscreteModel& model, const ValueFunction& v, const Sample& sample,
                         const SolverOptions& opts) {
    const double vbar = sample_mean_v(model, v, sample);
    const ValueRange range = value_range(Model{model}, v);
    if (concentration(model, v, sample) != Concentration::interior || !(vbar > range.lo && vbar < range.hi)) {
        std::ostringstream os;
        os.precision(17);
        os << "sample mean of v (" << vbar << ") is not inside (" << range.lo << ", " << range.hi
           << "); the likelihood has no finite maximizer";
        throw MLBoundary(os.str());
    }
    return solve_tilted_mean(Model{model}, v, vbar, opts);
}

double chernoff_from_likelihood(const DiscreteModel& model, const Sample& sample, double log_likelihood_max) {
    check_sample(model, sample);
    const auto q = model.prob();
    double base = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (sample.counts()[i] == 0) continue;
        base += static_cast<double>(sample.counts()[i]) * std::log(q[i]);
    }
    return std::exp((base - log_likelihood_max) / static_cast<double>(sample.total()));
}

MaxLikelihood max_log_likelihood(const DiscreteModel& model, const ValueFunction& v, const Sample& sample,
                                 const SolverOptions& opts) {
    check_sample(model, sample);
    const Concentration where = concentration(model, v, sample);
    if (where == Concentration::interior) {
        const TiltSolution sol = ml_estimate(model, v, sample, opts);
        return {sol.theta_hat, log_likelihood(model, v, sol.theta_hat, sample), false};
    }
    // As theta -> +/-inf the tilted pmf becomes q conditioned on the extreme level.
    const bool upper = where == Concentration::upper;
    const double level_mass = extreme_level(Model{model}, v, upper).mass;
    const auto q = model.prob();
    double l = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (sample.counts()[i] == 0) continue;
        l += static_cast<double>(sample.counts()[i]) * (std::log(q[i]) - std::log(level_mass));
    }
    return {upper ? kInf : -kInf, l, true};
}

Sample sample_multinomial(std::span<const double> prob, std::uint64_t n, DeterministicRng& rng) {
    if (prob.empty()) throw InputError("cannot sample from an empty pmf");
    std::vector<double> cdf(prob.size());
    std::partial_sum(prob.begin(), prob.end(), cdf.begin());
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        if (prob[i] > 0.0) last_positive = i;
    }
    std::vector<std::uint64_t> counts(prob.size(), 0);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
        if (idx > last_positive) idx = last_positive;
        ++counts[idx];
    }
    return Sample(std::move(counts));
}

std::vector<ExperimentRow> asymptotic_experiment(const DiscreteModel& model, const ValueFunction& v, double a,
                                                 std::span<const std::uint64_t> n_list, std::uint64_t seed,
                                                 const SolverOptions& opts) {
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] == 0) throw InputError("sample sizes must be positive");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw InputError("sample sizes must be increasing");
    }
    const Projection proj = i_projection(Model{model}, v, a, opts);
    const auto p = proj.pmf()->prob();
    const auto q = model.prob();
    const double log_bound = -proj.kl;

    double minus_entropy = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        minus_entropy += p[i] * std::log(p[i]);
        cross += p[i] * std::log(q[i]);
    }

    DeterministicRng rng(seed);
    std::vector<ExperimentRow> rows;
    rows.reserve(n_list.size());
    for (const std::uint64_t n : n_list) {
        const Sample sample = sample_multinomial(p, n, rng);
        const MaxLikelihood ml = max_log_likelihood(model, v, sample, opts);
        ExperimentRow row{};
        row.n = n;
        row.theta_ml = ml.theta;
        row.loglik_over_n = ml.log_likelihood / static_cast<double>(n);
        row.minus_entropy_target = minus_entropy;
        row.chernoff_target = cross - log_bound;
        row.deviation = std::abs(row.loglik_over_n - minus_entropy);
        const auto freq = sample.frequencies();
        for (std::size_t i = 0; i < p.size(); ++i) {
            row.empirical_max_dev = std::max(row.empirical_max_dev, std::abs(freq[i] - p[i]));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tiltbound
