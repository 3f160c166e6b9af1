#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tiltbound/measures.hpp"

namespace tiltbound {

struct SolverOptions {
    /// Stationarity residual tolerance, scaled by max(1, |target|).
    double tolerance = 1e-12;
    int max_iterations = 200;
};

enum class TiltStatus {
    attained,
    /// Target equals the top of v's range; the minimum is only approached as theta -> inf.
    infimum_at_infinity,
    /// Target equals E v(X); theta = 0 and the bound is 1.
    trivial_zero,
    /// Reported by bound() only: target above the range of v, bound 0.
    infeasible,
    /// Reported by bound() only: v constant on the support.
    degenerate,
};

std::string to_string(TiltStatus s);
TiltStatus tilt_status_from_string(const std::string& s);

struct TiltSolution {
    double theta_hat = 0.0;
    /// |K'(theta_hat) - target|
    double residual = 0.0;
    int iterations = 0;
    TiltStatus status = TiltStatus::trivial_zero;
};

/// Plain-data summary of an I-projection, kept in reports so they can be
/// serialized and read back without the originating model.
struct ProjectionRecord {
    double theta_hat = 0.0;
    double log_normalizer = 0.0;
    double kl = 0.0;
    /// Tilted pmf (discrete models only).
    std::optional<DiscreteModel> pmf;
    /// Closed-form family of the tilted density, when one exists.
    std::optional<std::string> family;
    std::vector<double> family_params;
};

struct BoundReport {
    double a = 0.0;
    double v_of_a = 0.0;
    TiltSolution tilt;
    double log_bound = 0.0;
    double bound = 1.0;
    std::optional<double> true_tail;
    double kl = 0.0;
    std::optional<double> product_form;
    std::optional<double> ratio_form;
    std::optional<double> generalized_form;
    std::optional<ProjectionRecord> projection;
    std::vector<std::string> warnings;
};

/// Solves K'(theta) = target with a safeguarded Newton iteration on an
/// expanding bracket. The search runs towards positive theta when target
/// exceeds E v(X) and towards negative theta otherwise.
///
/// Throws InfeasibleTarget when target lies outside the closure of v's
/// range and DegenerateValueFunction when v is constant on the support.
/// A target on the edge of the range gives status infimum_at_infinity with
/// theta_hat = +/-inf.
TiltSolution solve_tilted_mean(const Model& model, const ValueFunction& v, double target,
                               const SolverOptions& opts = {});

/// Minimizer over theta >= 0 of K(theta) - theta v(a). Requires a >= E X.
TiltSolution optimize_theta(const Model& model, const ValueFunction& v, double a,
                            const SolverOptions& opts = {});

/// Log-bound C = K(theta_hat) - theta_hat v(a) for an already solved tilt.
/// Handles the limit and trivial cases.
double log_bound_at(const Model& model, const ValueFunction& v, double a, const TiltSolution& tilt);

double bound_log(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts = {});

/// Chernoff bound report with the log and plain bound, the true tail and the
/// KL value. Infeasible targets and constant v are reported with a status and
/// a warning instead of an exception.
BoundReport bound(const Model& model, const ValueFunction& v, double a, const SolverOptions& opts = {});

}  // namespace tiltbound
