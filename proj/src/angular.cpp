#include "ccmol/angular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ccmol {

HalfInt HalfInt::from_double(double x)
{
    const double t = 2.0 * x;
    if (!std::isfinite(t) || std::abs(t - std::round(t)) > 1e-9)
        throw std::invalid_argument("not a half-integer: " + std::to_string(x));
    return from_twice(static_cast<int>(std::lround(t)));
}

std::string to_string(HalfInt h)
{
    if (h.is_integer()) return std::to_string(h.twice / 2);
    return std::to_string(h.twice) + "/2";
}

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

bool triangle(int tj1, int tj2, int tj3)
{
    return tj3 >= std::abs(tj1 - tj2) && tj3 <= tj1 + tj2 && (tj1 + tj2 + tj3) % 2 == 0;
}

bool projection_ok(int tj, int tm) { return tj >= 0 && std::abs(tm) <= tj && (tj + tm) % 2 == 0; }

}  // namespace

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j, HalfInt m)
{
    const int a = j1.twice, b = j2.twice, c = j.twice;
    if (!projection_ok(a, m1.twice) || !projection_ok(b, m2.twice) || !projection_ok(c, m.twice)) return 0.0;
    if (m1.twice + m2.twice != m.twice || !triangle(a, b, c)) return 0.0;

    // Racah's closed form with all arguments converted from the doubled representation.
    const int j1pj2mj = (a + b - c) / 2;
    const int j1mj2pj = (a - b + c) / 2;
    const int mj1pj2pj = (-a + b + c) / 2;
    const int jsum1 = (a + b + c) / 2 + 1;
    const int j1pm1 = (a + m1.twice) / 2, j1mm1 = (a - m1.twice) / 2;
    const int j2pm2 = (b + m2.twice) / 2, j2mm2 = (b - m2.twice) / 2;
    const int jpm = (c + m.twice) / 2, jmm = (c - m.twice) / 2;

    const double log_pref = 0.5 * (std::log(c + 1.0) + log_factorial(j1pj2mj) + log_factorial(j1mj2pj) +
                                   log_factorial(mj1pj2pj) - log_factorial(jsum1) + log_factorial(j1pm1) +
                                   log_factorial(j1mm1) + log_factorial(j2pm2) + log_factorial(j2mm2) +
                                   log_factorial(jpm) + log_factorial(jmm));

    // k runs over values keeping every factorial argument non-negative
    const int kmin = std::max({0, (b - c - m1.twice) / 2, (a - c + m2.twice) / 2});
    const int kmax = std::min({j1pj2mj, j1mm1, j2pm2});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double term = -(log_factorial(k) + log_factorial(j1pj2mj - k) + log_factorial(j1mm1 - k) +
                              log_factorial(j2pm2 - k) + log_factorial((c - b + m1.twice) / 2 + k) +
                              log_factorial((c - a - m2.twice) / 2 + k));
        sum += (k % 2 == 0 ? 1.0 : -1.0) * std::exp(term + log_pref);
    }
    return sum;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double j, double m)
{
    return clebsch_gordan(HalfInt::from_double(j1), HalfInt::from_double(m1), HalfInt::from_double(j2),
                          HalfInt::from_double(m2), HalfInt::from_double(j), HalfInt::from_double(m));
}

double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3)
{
    if (m1.twice + m2.twice + m3.twice != 0) return 0.0;
    const int phase_twice = j1.twice - j2.twice - m3.twice;  // (-1)^(j1 - j2 - m3), always integer
    const double phase = (phase_twice / 2) % 2 == 0 ? 1.0 : -1.0;
    return phase / std::sqrt(j3.twice + 1.0) * clebsch_gordan(j1, m1, j2, m2, j3, -m3);
}

double orbital_c_diagonal(int l, int m, int k)
{
    const auto L = HalfInt::from_twice(2 * l), K = HalfInt::from_twice(2 * k);
    const auto M = HalfInt::from_twice(2 * m), zero = HalfInt::from_twice(0);
    const double phase = (m % 2 == 0) ? 1.0 : -1.0;
    return phase * (2 * l + 1) * wigner_3j(L, K, L, zero, zero, zero) * wigner_3j(L, K, L, -M, zero, M);
}

}  // namespace ccmol
