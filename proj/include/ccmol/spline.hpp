#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ccmol {

/// Cubic interpolating spline on strictly increasing knots. Each end is
/// either natural (zero second derivative) or clamped to a given slope.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y,
                std::optional<double> left_slope = std::nullopt,
                std::optional<double> right_slope = std::nullopt);

    double operator()(double x) const;
    double derivative(double x) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    std::span<const double> knots() const { return x_; }
    std::span<const double> values() const { return y_; }

private:
    std::size_t interval(double x) const;

    std::vector<double> x_, y_;
    std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace ccmol
