#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tiltbound/value_function.hpp"

namespace tiltbound {

/// Finite-support pmf. Support strictly increasing, masses non-negative and
/// summing to one within 1e-12. Zero-mass atoms are allowed.
class DiscreteModel {
public:
    DiscreteModel(std::vector<double> support, std::vector<double> prob);

    std::span<const double> support() const { return support_; }
    std::span<const double> prob() const { return prob_; }
    std::size_t size() const { return support_.size(); }

    bool has_zero_mass_atoms() const;
    /// Index of the atom located exactly at x, if any.
    std::optional<std::size_t> atom_index(double x) const;
    double mean() const;

private:
    std::vector<double> support_;
    std::vector<double> prob_;
};

enum class Family { gaussian, exponential };

std::string family_name(Family f);

/// A continuous distribution: either a closed-form family with exact
/// density, survival function and CGF, or a density tabulated on a grid and
/// integrated with the trapezoid rule.
class ContinuousModel {
public:
    static ContinuousModel gaussian(double mean, double stddev);
    static ContinuousModel exponential(double rate);
    /// Node densities are normalized by their trapezoid integral, which must
    /// lie within 1e-6 of one.
    static ContinuousModel grid(std::vector<double> nodes, std::vector<double> density);

    bool is_grid() const { return !family_.has_value(); }
    std::optional<Family> family() const { return family_; }
    /// gaussian: {mean, stddev}; exponential: {rate}; grid: empty.
    std::span<const double> params() const { return params_; }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> node_density() const { return density_; }
    /// Trapezoid masses at the nodes, normalized to sum to one.
    std::span<const double> node_mass() const { return mass_; }
    /// Trapezoid integral of the raw grid density before normalization.
    double grid_integral() const { return integral_; }

    double density(double x) const;
    double mean() const;
    /// P(X >= a).
    double survival(double a) const;

private:
    ContinuousModel() = default;

    std::optional<Family> family_;
    std::vector<double> params_;
    std::vector<double> nodes_;
    std::vector<double> density_;
    std::vector<double> mass_;
    double integral_ = 1.0;
};

using Model = std::variant<DiscreteModel, ContinuousModel>;

/// log E e^{theta v(X)} together with the mean and variance of v(X) under the
/// tilted law, i.e. K(theta), K'(theta) and K''(theta).
struct TiltMoments {
    double log_mgf;
    double mean;
    double variance;
};

TiltMoments tilt_moments(const Model& model, const ValueFunction& v, double theta);

double mean_v(const Model& model, const ValueFunction& v);
double cgf(const Model& model, const ValueFunction& v, double theta);
double cgf_prime(const Model& model, const ValueFunction& v, double theta);
double cgf_second(const Model& model, const ValueFunction& v, double theta);
double tail_prob(const Model& model, double a);
double model_mean(const Model& model);

/// Infimum and supremum of v over the positive-mass part of the support.
/// Unbounded closed-form families report +/-infinity.
struct ValueRange {
    double lo;
    double hi;
};
ValueRange value_range(const Model& model, const ValueFunction& v);

/// Open interval of theta on which E e^{theta v(X)} is finite.
std::pair<double, double> convergence_interval(const Model& model, const ValueFunction& v);

/// Total mass on atoms (or grid nodes) where v attains the upper (or lower)
/// end of value_range(), and the nearest v value strictly inside the range
/// (+/-inf when v takes a single value). Only meaningful for atomic models;
/// closed-form families return {0, nan}.
struct ExtremeLevel {
    double mass;
    double next_value;
};
ExtremeLevel extreme_level(const Model& model, const ValueFunction& v, bool upper);

/// Checks that v is finite, non-decreasing and midpoint-concave on the
/// model's support. Throws InvalidValueFunction or UnsupportedCombination.
void validate_value_function(const Model& model, const ValueFunction& v);

/// Density (continuous) or mass (discrete) of the model at x.
double point_weight(const Model& model, double x);

}  // namespace tiltbound
