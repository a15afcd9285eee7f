#pragma once

// Ground-state coupled-channel model for a pair of 2S atoms: singlet and
// triplet potentials, Fermi contact and Zeeman terms, rotation, and the
// first-order electron spin-spin dipole interaction.

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ccmol/potential.hpp"
#include "ccmol/radial.hpp"
#include "ccmol/spin_basis.hpp"
#include "ccmol/units.hpp"

namespace ccmol {

struct GroundModel {
    AtomSpecies atom_a, atom_b;
    PotentialCurve v_x;  ///< singlet
    PotentialCurve v_a;  ///< triplet
    ChannelBasis basis;
    FieldConfig field;

    /// Throws std::invalid_argument unless both curves share one asymptote
    /// and the basis spins match the species.
    GroundModel(AtomSpecies a, AtomSpecies b, PotentialCurve singlet, PotentialCurve triplet, ChannelBasis basis,
                FieldConfig field);

    double reduced_mass_au() const;
};

/// H_int split into its pieces, all in hartree over the model basis.
struct SpinHamiltonian {
    Eigen::MatrixXd contact_a, contact_b;
    Eigen::MatrixXd zeeman_electron, zeeman_nuclear;
    Eigen::MatrixXd field_derivative;  ///< dH/dB, hartree per gauss

    Eigen::MatrixXd total() const { return contact_a + contact_b + zeeman_electron + zeeman_nuclear; }
};

SpinHamiltonian assemble_spin_hamiltonian(const ChannelBasis& basis, const AtomSpecies& a, const AtomSpecies& b,
                                          FieldConfig field);
inline SpinHamiltonian assemble_spin_hamiltonian(const GroundModel& m)
{
    return assemble_spin_hamiltonian(m.basis, m.atom_a, m.atom_b, m.field);
}

/// Lowest two-atom threshold over every M_F block (unshifted, hartree).
double lowest_threshold(const AtomSpecies& a, const AtomSpecies& b, FieldConfig field);

struct Thresholds {
    std::vector<double> energies;  ///< ascending, relative to `reference`
    double reference = 0.0;        ///< lowest threshold of the atom pair
};
Thresholds atomic_thresholds(const GroundModel& model);

/// V_X P_S + V_a P_T plus the centrifugal term, relative to the shared asymptote.
Eigen::MatrixXd potential_matrix(const GroundModel& model, double r);

/// Full radial problem W(R) = potential_matrix + H_int - E0. With
/// `shift_to_threshold` E0 is the lowest atom-pair threshold, otherwise 0.
CoupledChannelProblem coupled_channel_problem(const GroundModel& model, bool shift_to_threshold = true);

/// -(g_IA m_A + g_IB m_B) mu_N B, hartree.
double nuclear_zeeman_energy(HalfInt m_a, HalfInt m_b, FieldConfig field, const AtomSpecies& a, const AtomSpecies& b);

/// Integrated density on S = 1 channels; throws for an unnormalised state.
double triplet_fraction(const BoundState& state, const ChannelBasis& basis);
double singlet_fraction(const BoundState& state, const ChannelBasis& basis);

/// First-order spin-spin dipole shift of each state (hartree), using the
/// m_l-diagonal part of the rank-2 interaction and each channel's <1/R^3>.
std::vector<double> dipole_dipole_shifts(const std::vector<BoundState>& states, const ChannelBasis& basis,
                                         const AtomSpecies& a, const AtomSpecies& b);

}  // namespace ccmol
