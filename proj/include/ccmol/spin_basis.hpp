#pragma once

// Hyperfine/Zeeman channel bases for two 2S atoms.
//
// A channel is |S m_S, m_iA, m_iB; l m_l> with the electron spins coupled to
// total S. Only M_F = m_S + m_iA + m_iB is conserved by the spin Hamiltonian;
// m_l is carried as a label and does not enter M_F.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccmol/angular.hpp"

namespace ccmol {

struct Channel {
    int S = 0;
    int m_S = 0;
    HalfInt m_iA, m_iB;
    int l = 0;
    int m_l = 0;

    HalfInt M_F() const { return HalfInt::from_twice(2 * m_S) + m_iA + m_iB; }
    std::string label() const;
};

inline constexpr std::size_t kElectronStates = 4;

/// Electron-spin product states |m_sA, m_sB> in the order (+,+), (+,-), (-,+), (-,-)
/// and coupled states |S, m_S> in the order (0,0), (1,1), (1,0), (1,-1).
struct ElectronSpinState {
    int two_m_a, two_m_b;
};
struct CoupledSpinState {
    int S, m_S;
};
const std::vector<ElectronSpinState>& electron_product_states();
const std::vector<CoupledSpinState>& electron_coupled_states();

/// U(p, c) = <product p | coupled c>, built from Clebsch-Gordan coefficients.
Eigen::Matrix4d electron_spin_transform();

class EmptyBasisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ChannelBasis {
    HalfInt i_a, i_b;
    int l = 0;
    int m_l = 0;
    HalfInt M_F;
    std::vector<Channel> channels;
    Eigen::Matrix4d electron_transform;

    std::size_t size() const { return channels.size(); }
    std::size_t singlet_count() const;
    /// Index of the channel, or -1.
    int find(int S, int m_S, HalfInt m_iA, HalfInt m_iB) const;
};

/// All channels with m_S + m_iA + m_iB = M_F, ordered by S ascending, then m_S
/// descending, then m_iA descending. Throws EmptyBasisError for an empty set.
ChannelBasis enumerate_channels(HalfInt i_a, HalfInt i_b, int l, int m_l, HalfInt M_F);

/// All allowed M_F values for the spins, ascending.
std::vector<HalfInt> allowed_mf(HalfInt i_a, HalfInt i_b);

}  // namespace ccmol
