#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tiltbound {

/// The function v(.) whose tilted mean is constrained. Bounds are only valid
/// for v concave and non-decreasing on the model's support; that is checked
/// once per (model, v) pair by validate_value_function().
class ValueFunction {
public:
    enum class Kind { identity, logarithm, affine, table };

    static ValueFunction identity();
    static ValueFunction logarithm();
    static ValueFunction affine(double intercept, double slope);
    /// Piecewise-linear through the knots, clamped to the end values outside.
    static ValueFunction table(std::vector<double> x, std::vector<double> v);

    double operator()(double x) const;

    Kind kind() const { return kind_; }

    /// (intercept, slope) when v is affine in x (identity included).
    std::optional<std::pair<double, double>> affine_form() const;

    const std::vector<double>& knots_x() const { return knots_x_; }
    const std::vector<double>& knots_v() const { return knots_v_; }

    std::string describe() const;

private:
    ValueFunction() = default;

    Kind kind_ = Kind::identity;
    double intercept_ = 0.0;
    double slope_ = 1.0;
    std::vector<double> knots_x_;
    std::vector<double> knots_v_;
};

}  // namespace tiltbound
