#include "ccmol/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccmol {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y,
                         std::optional<double> left_slope, std::optional<double> right_slope)
    : x_(std::move(x))
    , y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("spline needs >= 2 matching points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline knots must be strictly increasing");

    // Tridiagonal system for the knot second derivatives (Thomas algorithm).
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        r[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    if (left_slope) {
        const double h = x_[1] - x_[0];
        b[0] = h / 3.0;
        c[0] = h / 6.0;
        r[0] = (y_[1] - y_[0]) / h - *left_slope;
    } else {
        b[0] = 1.0;
    }
    if (right_slope) {
        const double h = x_[n - 1] - x_[n - 2];
        a[n - 1] = h / 6.0;
        b[n - 1] = h / 3.0;
        r[n - 1] = *right_slope - (y_[n - 1] - y_[n - 2]) / h;
    } else {
        b[n - 1] = 1.0;
    }

    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    m_.assign(n, 0.0);
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t CubicSpline::interval(double x) const
{
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const
{
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double t = x - x_[i];
    const double slope = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    return y_[i] + t * (slope + t * (0.5 * m_[i] + t * (m_[i + 1] - m_[i]) / (6.0 * h)));
}

double CubicSpline::derivative(double x) const
{
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double t = x - x_[i];
    const double slope = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    return slope + t * (m_[i] + t * (m_[i + 1] - m_[i]) / (2.0 * h));
}

}  // namespace ccmol
