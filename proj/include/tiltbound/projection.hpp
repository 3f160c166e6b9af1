#pragma once

#include <optional>
#include <variant>

#include "tiltbound/chernoff.hpp"
#include "tiltbound/measures.hpp"

namespace tiltbound {

/// Exponentially tilted continuous density
///   p(x) = q(x) exp(theta v(x) - log E_q e^{theta v(X)}).
/// Grid bases are tilted node by node and interpolated linearly.
class TiltedDensity {
public:
    TiltedDensity(ContinuousModel base, ValueFunction v, double theta, double log_normalizer);

    double density(double x) const;
    /// log dP/dQ at x.
    double log_likelihood_ratio(double x) const;
    /// Gaussian and exponential bases tilted along an affine v stay in their
    /// family; returns that member.
    std::optional<ContinuousModel> closed_form() const;

    const ContinuousModel& base() const { return base_; }
    double theta() const { return theta_; }
    double log_normalizer() const { return log_normalizer_; }

private:
    ContinuousModel base_;
    ValueFunction v_;
    double theta_;
    double log_normalizer_;
    std::vector<double> node_density_;
};

struct Projection {
    /// Discrete models (and the theta -> inf limit of grid models) give a pmf.
    std::variant<DiscreteModel, TiltedDensity> tilted;
    double theta_hat = 0.0;
    double log_normalizer = 0.0;
    /// I(P || Q)
    double kl = 0.0;
    TiltStatus status = TiltStatus::trivial_zero;

    const DiscreteModel* pmf() const { return std::get_if<DiscreteModel>(&tilted); }
    ProjectionRecord record() const;
};

/// Exponential tilt of the model at a fixed theta (no constraint solved);
/// kl is I(P_theta || Q) = theta K'(theta) - K(theta).
Projection tilt(const Model& model, const ValueFunction& v, double theta);

/// I-projection of the model onto { P : E_P v(X) = v(a) }.
Projection i_projection(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts = {});

/// Projection for an already solved tilt; see i_projection().
Projection projection_from_tilt(const Model& model, const ValueFunction& v, double a, const TiltSolution& tilt);

/// sum p_i log(p_i / q_i) with 0 log 0 = 0; +inf when p puts mass where q has none.
double kl_divergence(const DiscreteModel& p, const DiscreteModel& q);

/// prod (q_i / p_i)^{p_i}, evaluated in the log domain.
double product_form_bound(const Projection& projection, const DiscreteModel& model);

/// Q(a) / P(a): atom masses for discrete models, densities for continuous ones.
double ratio_form_bound(const Model& model, const Projection& projection, double a);

struct GeneralizedBound {
    double value;
    /// The minimizing theta is at infinity; value is the limit.
    bool limit_only;
};

/// 1 / (dP/dQ)(a) for the (generalized) I-projection P.
GeneralizedBound generalized_projection_bound(const Model& model, const ValueFunction& v, double a,
                                              const SolverOptions& opts = {});

/// bound() plus the projection and every bound form that applies.
BoundReport analyze(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts = {});

}  // namespace tiltbound
