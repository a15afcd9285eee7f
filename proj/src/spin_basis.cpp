#include "ccmol/spin_basis.hpp"

#include <cstdlib>

namespace ccmol {

std::string Channel::label() const
{
    return "S=" + std::to_string(S) + " mS=" + std::to_string(m_S) + " miA=" + to_string(m_iA) +
           " miB=" + to_string(m_iB) + " l=" + std::to_string(l) + " ml=" + std::to_string(m_l);
}

const std::vector<ElectronSpinState>& electron_product_states()
{
    static const std::vector<ElectronSpinState> states{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    return states;
}

const std::vector<CoupledSpinState>& electron_coupled_states()
{
    static const std::vector<CoupledSpinState> states{{0, 0}, {1, 1}, {1, 0}, {1, -1}};
    return states;
}

Eigen::Matrix4d electron_spin_transform()
{
    const auto half = HalfInt::from_twice(1);
    Eigen::Matrix4d u = Eigen::Matrix4d::Zero();
    const auto& prod = electron_product_states();
    const auto& coup = electron_coupled_states();
    for (std::size_t p = 0; p < prod.size(); ++p)
        for (std::size_t c = 0; c < coup.size(); ++c)
            u(p, c) = clebsch_gordan(half, HalfInt::from_twice(prod[p].two_m_a), half, HalfInt::from_twice(prod[p].two_m_b),
                                     HalfInt::from_twice(2 * coup[c].S), HalfInt::from_twice(2 * coup[c].m_S));
    return u;
}

std::size_t ChannelBasis::singlet_count() const
{
    std::size_t n = 0;
    for (const auto& c : channels) n += c.S == 0;
    return n;
}

int ChannelBasis::find(int S, int m_S, HalfInt m_iA, HalfInt m_iB) const
{
    for (std::size_t k = 0; k < channels.size(); ++k) {
        const auto& c = channels[k];
        if (c.S == S && c.m_S == m_S && c.m_iA == m_iA && c.m_iB == m_iB) return static_cast<int>(k);
    }
    return -1;
}

ChannelBasis enumerate_channels(HalfInt i_a, HalfInt i_b, int l, int m_l, HalfInt M_F)
{
    if (i_a.twice < 0 || i_b.twice < 0) throw std::invalid_argument("nuclear spins must be non-negative");
    if (l < 0 || std::abs(m_l) > l) throw std::invalid_argument("need |m_l| <= l");

    ChannelBasis basis;
    basis.i_a = i_a;
    basis.i_b = i_b;
    basis.l = l;
    basis.m_l = m_l;
    basis.M_F = M_F;
    basis.electron_transform = electron_spin_transform();

    for (int S = 0; S <= 1; ++S) {
        for (int m_S = S; m_S >= -S; --m_S) {
            for (int ta = i_a.twice; ta >= -i_a.twice; ta -= 2) {
                const int tb = M_F.twice - 2 * m_S - ta;
                if (std::abs(tb) > i_b.twice || (i_b.twice - tb) % 2 != 0) continue;
                basis.channels.push_back(Channel{S, m_S, HalfInt::from_twice(ta), HalfInt::from_twice(tb), l, m_l});
            }
        }
    }
    if (basis.channels.empty())
        throw EmptyBasisError("no channels with M_F = " + to_string(M_F) + " for nuclear spins (" + to_string(i_a) +
                              ", " + to_string(i_b) + ")");
    return basis;
}

std::vector<HalfInt> allowed_mf(HalfInt i_a, HalfInt i_b)
{
    std::vector<HalfInt> out;
    const int top = 2 + i_a.twice + i_b.twice;
    for (int t = -top; t <= top; t += 2) out.push_back(HalfInt::from_twice(t));
    return out;
}

}  // namespace ccmol
