#pragma once

#include <stdexcept>
#include <string>

namespace ccmol {

/// Half-integer angular momentum stored as twice its value.
struct HalfInt {
    int twice = 0;

    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(int t) { HalfInt h; h.twice = t; return h; }
    /// Throws std::invalid_argument unless 2x is an integer.
    static HalfInt from_double(double x);

    constexpr double value() const { return 0.5 * twice; }
    constexpr bool is_integer() const { return twice % 2 == 0; }
    friend constexpr bool operator==(HalfInt, HalfInt) = default;
    friend constexpr auto operator<=>(HalfInt a, HalfInt b) { return a.twice <=> b.twice; }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice + b.twice); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice - b.twice); }
    constexpr HalfInt operator-() const { return from_twice(-twice); }
};

std::string to_string(HalfInt h);

/// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention. Zero when the
/// triangle rule, the projection ranges or M = m1 + m2 fail.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j, HalfInt m);
double clebsch_gordan(double j1, double m1, double j2, double m2, double j, double m);

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// <l m | C^k_0 | l m> for the Racah-normalised spherical harmonic.
double orbital_c_diagonal(int l, int m, int k);

}  // namespace ccmol
