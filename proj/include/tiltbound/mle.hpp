#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tiltbound/chernoff.hpp"
#include "tiltbound/measures.hpp"
#include "tiltbound/rng.hpp"

namespace tiltbound {

/// Occurrence counts per support atom of a DiscreteModel.
class Sample {
public:
    explicit Sample(std::vector<std::uint64_t> counts);

    std::span<const std::uint64_t> counts() const { return counts_; }
    std::uint64_t total() const { return total_; }
    std::vector<double> frequencies() const;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// l(theta) = sum n_i (log q_i + theta v(x_i) - K(theta)).
double log_likelihood(const DiscreteModel& model, const ValueFunction& v, double theta, const Sample& sample);

/// l(theta) / n written in terms of relative frequencies, which need not be
/// multiples of 1/n.
double mean_log_likelihood(const DiscreteModel& model, const ValueFunction& v, double theta,
                           std::span<const double> freq);

double sample_mean_v(const DiscreteModel& model, const ValueFunction& v, const Sample& sample);

/// Root of the likelihood equation K'(theta) = sample mean of v. Negative
/// theta is allowed. Throws MLBoundary when the sample mean sits at or beyond
/// an extreme of v on the positive-mass atoms.
TiltSolution ml_estimate(const DiscreteModel& model, const ValueFunction& v, const Sample& sample,
                         const SolverOptions& opts = {});

/// exp((sum n_i log q_i - l_max) / n), the bound recovered from the maximized
/// log-likelihood.
double chernoff_from_likelihood(const DiscreteModel& model, const Sample& sample, double log_likelihood_max);

/// Supremum of l over theta. Samples concentrated on an extreme level of v
/// have no finite maximizer; theta is then +/-inf and the value is the limit.
struct MaxLikelihood {
    double theta;
    double log_likelihood;
    bool boundary;
};
MaxLikelihood max_log_likelihood(const DiscreteModel& model, const ValueFunction& v, const Sample& sample,
                                 const SolverOptions& opts = {});

/// n draws from prob by inverse-CDF sampling.
Sample sample_multinomial(std::span<const double> prob, std::uint64_t n, DeterministicRng& rng);

struct ExperimentRow {
    std::uint64_t n;
    double theta_ml;
    double loglik_over_n;
    /// sum p_i log p_i for the projection p.
    double minus_entropy_target;
    /// sum p_i log q_i - C; algebraically the same number as the entropy target.
    double chernoff_target;
    /// |loglik_over_n - minus_entropy_target|
    double deviation;
    /// max_i |n_i / n - p_i|
    double empirical_max_dev;
};

/// Draws samples of each size from the I-projection for threshold a and
/// tracks how l(theta_ML)/n approaches -H(p). One generator seeded with
/// seed is shared across the n_list in order.
std::vector<ExperimentRow> asymptotic_experiment(const DiscreteModel& model, const ValueFunction& v, double a,
                                                 std::span<const std::uint64_t> n_list, std::uint64_t seed,
                                                 const SolverOptions& opts = {});

}  // namespace tiltbound
