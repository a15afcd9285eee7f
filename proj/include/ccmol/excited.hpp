#pragma once

// Spin-orbit coupled Omega = 1 excited states: three channels in the fixed
// order (3Sigma+, 3Pi, 1Pi). Curves share one energy axis whose zero is the
// ground-state dissociation limit, so level energies are photon energies.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ccmol/potential.hpp"
#include "ccmol/radial.hpp"

namespace ccmol {

enum ExcitedChannel : int { kSigma3 = 0, kPi3 = 1, kPi1 = 2 };

struct ExcitedModel {
    PotentialCurve sigma3, pi3, pi1;
    RFunction xi_sigma_pi3, xi_sigma_pi1, xi_pi1_pi3;
    double fine_structure = 0.0;  ///< Delta, hartree
    int J = 1;
    double mass = 0.0;            ///< reduced mass, electron masses

    /// The built-in model curves with the 40K87Rb reduced mass.
    static ExcitedModel builtin();
    static ExcitedModel from_curves(const ModelCurves& curves, double mass);
    /// Same model with every spin-orbit coupling removed.
    ExcitedModel uncoupled() const;
};

/// Diagonal: curves plus J(J+1)/(2 mu R^2); off-diagonal: the couplings.
Eigen::Matrix3d assemble_excited_W(const ExcitedModel& model, double r);

CoupledChannelProblem excited_problem(const ExcitedModel& model);

/// Minimum over R of each adiabatic (eigen)potential, ascending order.
std::array<double, 3> adiabatic_minima(const ExcitedModel& model, double r_lo, double r_hi, double step = 1e-3);

struct ChannelFractions {
    double sigma3 = 0.0, pi3 = 0.0, pi1 = 0.0;
    double sum() const { return sigma3 + pi3 + pi1; }
};

ChannelFractions channel_fractions(const BoundState& state);

struct ExcitedLevel {
    BoundState state;
    ChannelFractions fractions;
};

struct ExcitedLevels {
    std::vector<ExcitedLevel> levels;
    std::vector<std::string> warnings;
};

ExcitedLevels excited_levels(const ExcitedModel& model, const RadialGrid& grid, EnergyWindow window,
                             const SolverSettings& settings = {});

/// Transition dipole functions from one ground electronic state to each
/// excited channel. An absent entry is an exactly zero dipole.
struct ChannelDipoles {
    std::optional<RFunction> sigma3, pi3, pi1;

    static ChannelDipoles singlet(RFunction d_pi1)
    {
        ChannelDipoles d;
        d.pi1 = std::move(d_pi1);
        return d;
    }
};

/// |<ground| d |excited>| with a single-channel ground level. When the
/// grids differ the ground state is interpolated onto the excited grid
/// without renormalisation.
double transition_dipole(const BoundState& ground, const BoundState& excited, const ChannelDipoles& d);

struct SpectrumRow {
    double energy;  ///< hartree, photon-energy axis
    ChannelFractions fractions;
    double dipole;  ///< |TDM|, e a0
};

std::vector<SpectrumRow> spectrum_report(const ExcitedLevels& levels, const ChannelDipoles& d, const BoundState& ground);

}  // namespace ccmol
