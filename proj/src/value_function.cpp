#include "tiltbound/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tiltbound/errors.hpp"

namespace tiltbound {

ValueFunction ValueFunction::identity() {
    return ValueFunction{};
}

ValueFunction ValueFunction::logarithm() {
    ValueFunction v;
    v.kind_ = Kind::logarithm;
    return v;
}

ValueFunction ValueFunction::affine(double intercept, double slope) {
    if (!std::isfinite(intercept) || !std::isfinite(slope)) {
        throw InvalidValueFunction("affine coefficients must be finite");
    }
    ValueFunction v;
    v.kind_ = Kind::affine;
    v.intercept_ = intercept;
    v.slope_ = slope;
    return v;
}

ValueFunction ValueFunction::table(std::vector<double> x, std::vector<double> v) {
    if (x.empty() || x.size() != v.size()) {
        throw InvalidValueFunction("table needs at least one knot and matching x/v lengths");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(v[i])) {
            throw InvalidValueFunction("table knots must be finite");
        }
        if (i > 0 && !(x[i] > x[i - 1])) {
            throw InvalidValueFunction("table knots must be strictly increasing in x");
        }
    }
    ValueFunction f;
    f.kind_ = Kind::table;
    f.knots_x_ = std::move(x);
    f.knots_v_ = std::move(v);
    return f;
}

double ValueFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::identity:
            return x;
        case Kind::logarithm:
            if (x > 0.0) return std::log(x);
            if (x == 0.0) return -std::numeric_limits<double>::infinity();
            return std::numeric_limits<double>::quiet_NaN();
        case Kind::affine:
            return intercept_ + slope_ * x;
        case Kind::table: {
            if (x <= knots_x_.front()) return knots_v_.front();
            if (x >= knots_x_.back()) return knots_v_.back();
            auto hi = std::upper_bound(knots_x_.begin(), knots_x_.end(), x);
            const auto k = static_cast<std::size_t>(hi - knots_x_.begin());
            const double x0 = knots_x_[k - 1];
            const double x1 = knots_x_[k];
            const double t = (x - x0) / (x1 - x0);
            return knots_v_[k - 1] + t * (knots_v_[k] - knots_v_[k - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::optional<std::pair<double, double>> ValueFunction::affine_form() const {
    if (kind_ == Kind::identity) return std::make_pair(0.0, 1.0);
    if (kind_ == Kind::affine) return std::make_pair(intercept_, slope_);
    return std::nullopt;
}

std::string ValueFunction::describe() const {
    switch (kind_) {
        case Kind::identity:
            return "identity";
        case Kind::logarithm:
            return "log";
        case Kind::affine: {
            std::ostringstream os;
            os.precision(17);
            os << "affine(" << intercept_ << "," << slope_ << ")";
            return os.str();
        }
        case Kind::table:
            return "table(" + std::to_string(knots_x_.size()) + " knots)";
    }
    return "unknown";
}

}  // namespace tiltbound
