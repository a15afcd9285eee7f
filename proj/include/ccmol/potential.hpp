#pragma once

// Born-Oppenheimer potential curves and R-dependent coupling functions.
//
// A curve is a table of (R, value) points joined to analytic pieces:
//
//   R < R_first            inner extrapolation (repulsive wall or constant)
//   R_first <= R < R_s     cubic spline through the table
//   R >= R_s               asymptote - sum_n C_n / R^n
//
// The spline is clamped to the slopes of both analytic pieces and carries a
// final knot at the splice radius R_s with the tail value, so the evaluated
// function is C1 everywhere.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccmol/spline.hpp"

namespace ccmol {

struct CurvePoint {
    double r;      ///< a0
    double value;  ///< hartree for potentials, atomic units for functions
};

enum class InnerExtrapolation {
    exponential_wall,  ///< asymptote + A exp(-b R) through the two innermost points
    constant,          ///< innermost value
};

class CurveFormatError : public std::runtime_error {
public:
    CurveFormatError(const std::string& file, int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

/// Shared representation of tabulated radial functions.
class SplicedTable {
public:
    SplicedTable() = default;
    SplicedTable(std::string label, std::vector<CurvePoint> points, double splice_r, double asymptote,
                 std::map<int, double> tail, InnerExtrapolation inner);

    double operator()(double r) const;
    double derivative(double r) const;
    double tail_value(double r) const;

    const std::string& label() const { return label_; }
    const std::vector<CurvePoint>& points() const { return points_; }
    double splice_radius() const { return splice_r_; }
    double asymptote() const { return asymptote_; }
    const std::map<int, double>& tail_coefficients() const { return tail_; }
    InnerExtrapolation inner() const { return inner_; }
    /// Wall parameters (A, b); zero for constant extrapolation.
    double wall_amplitude() const { return wall_a_; }
    double wall_exponent() const { return wall_b_; }

private:
    std::string label_;
    std::vector<CurvePoint> points_;
    double splice_r_ = 0.0;
    double asymptote_ = 0.0;
    std::map<int, double> tail_;
    InnerExtrapolation inner_ = InnerExtrapolation::exponential_wall;
    double wall_a_ = 0.0, wall_b_ = 0.0;
    CubicSpline spline_;
};

/// Potential energy curve V(R) in hartree; the tail needs at least C6.
class PotentialCurve : public SplicedTable {
public:
    PotentialCurve() = default;
    PotentialCurve(std::string label, std::vector<CurvePoint> points, double splice_r, double asymptote,
                   double c6, double c8 = 0.0, double c10 = 0.0);

    double c6() const { return coefficient(6); }
    double c8() const { return coefficient(8); }
    double c10() const { return coefficient(10); }
    double coefficient(int n) const;
};

/// R-dependent coupling (spin-orbit) or transition dipole function.
class RFunction : public SplicedTable {
public:
    RFunction() = default;
    RFunction(std::string label, std::vector<CurvePoint> points, double splice_r, double asymptote,
              std::map<int, double> tail = {}, InnerExtrapolation inner = InnerExtrapolation::constant);
    /// Identically constant function.
    static RFunction constant(std::string label, double value);
    /// Identically zero function.
    static RFunction zero(std::string label = "zero") { return constant(std::move(label), 0.0); }
    bool is_zero() const { return zero_; }

private:
    bool zero_ = false;
};

PotentialCurve load_curve(const std::filesystem::path& path);
RFunction load_function(const std::filesystem::path& path);
void write_curve(const PotentialCurve& curve, const std::filesystem::path& path);
void write_function(const RFunction& f, const std::filesystem::path& path);

/// Largest relative jump of the finite-difference derivative across the
/// inner and splice junctions, |dV+ - dV-| / max(|dV|, |V - V_inf| / R).
double splice_derivative_jump(const SplicedTable& curve, double step = 1e-4);

// Desk-scale analytic stand-ins for the KRb curves.

/// Morse well smoothly switched onto asymptote - C6/R^6 - C8/R^8.
struct MorseLongRange {
    double depth;       ///< hartree
    double r_eq;        ///< a0
    double beta;        ///< a0^-1
    double asymptote;   ///< hartree
    double c6, c8;
    double switch_r;    ///< centre of the tanh switch, a0
    double switch_width;

    double operator()(double r) const;
    double morse(double r) const;
    double long_range(double r) const;
    PotentialCurve tabulate(std::string label, double r_lo, double r_hi, double step, double splice_r) const;
};

/// Shape s * asymptote * (1 + A exp(-beta (R - R0))) for the spin-orbit couplings.
struct ExponentialCoupling {
    double asymptote;
    double amplitude;
    double beta;
    double r0;

    double operator()(double r) const;
    RFunction tabulate(std::string label, double r_lo, double r_hi, double step, double splice_r) const;
};

struct ModelCurves {
    PotentialCurve x1sigma, a3sigma;              ///< ground pair, shared asymptote and C6
    PotentialCurve sigma3, pi3, pi1;              ///< 2 3Sigma+, 1 3Pi, 1 1Pi on the photon-energy axis
    RFunction xi_sigma_pi3, xi_sigma_pi1, xi_pi1_pi3;
    RFunction dipole_x_pi1;                       ///< X - 1Pi transition dipole, e a0
    RFunction dipole_x_x;                         ///< X permanent dipole, e a0
    RFunction dipole_a_sigma3, dipole_a_pi3;      ///< a 3Sigma+ to the triplet channels
    double fine_structure;                        ///< Rb 5p splitting, hartree
    std::map<std::string, MorseLongRange> parameters;
};

/// Builds the model set; deterministic, cached after the first call.
const ModelCurves& builtin_model_curves();

}  // namespace ccmol
