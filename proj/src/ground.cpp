#include "ccmol/ground.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <tuple>

namespace ccmol {

GroundModel::GroundModel(AtomSpecies a, AtomSpecies b, PotentialCurve singlet, PotentialCurve triplet,
                         ChannelBasis basis_, FieldConfig field_)
    : atom_a(std::move(a)), atom_b(std::move(b)), v_x(std::move(singlet)), v_a(std::move(triplet)),
      basis(std::move(basis_)), field(field_)
{
    atom_a.validate();
    atom_b.validate();
    if (v_x.asymptote() != v_a.asymptote())
        throw std::invalid_argument("singlet and triplet curves must share one asymptote (" + v_x.label() + ", " +
                                    v_a.label() + ")");
    if (basis.i_a.twice != atom_a.two_nuclear_spin || basis.i_b.twice != atom_b.two_nuclear_spin)
        throw std::invalid_argument("channel basis nuclear spins do not match the species");
    if (basis.channels.empty()) throw EmptyBasisError("empty channel basis");
}

double GroundModel::reduced_mass_au() const
{
    return reduced_mass(atom_a, atom_b) * PhysicalConstants::amu_in_me;
}

namespace {

struct ProductState {
    int tsa, tsb, tia, tib;  // doubled projections
    auto operator<=>(const ProductState&) const = default;
};

// <m+1| j_+ |m> with everything doubled.
double raise(int tj, int tm) { return 0.5 * std::sqrt(double(tj - tm) * double(tj + tm + 2)); }
double lower(int tj, int tm) { return 0.5 * std::sqrt(double(tj + tm) * double(tj - tm + 2)); }

// Matrix of s.i for one atom (electron projection ts, nuclear ti, nuclear spin twice ti_max)
// between product states, as a list of (target, coefficient) from a source state.
template <class Emit>
void contact_terms(int ts, int ti, int tI, Emit&& emit)
{
    emit(ts, ti, 0.25 * ts * ti);
    // s_+ i_- and s_- i_+
    if (ts == -1 && ti > -tI) emit(1, ti - 2, 0.5 * raise(1, -1) * lower(tI, ti));
    if (ts == 1 && ti < tI) emit(-1, ti + 2, 0.5 * lower(1, 1) * raise(tI, ti));
}

}  // namespace

SpinHamiltonian assemble_spin_hamiltonian(const ChannelBasis& basis, const AtomSpecies& a, const AtomSpecies& b,
                                          FieldConfig field)
{
    if (basis.channels.empty()) throw EmptyBasisError("empty channel basis");
    const std::size_t n = basis.size();
    const int tIa = basis.i_a.twice, tIb = basis.i_b.twice;

    // Product states spanning the same space, and C(p, k) = <product p | channel k>.
    std::vector<ProductState> prod;
    std::map<ProductState, std::size_t> index;
    const auto& eprod = electron_product_states();
    const auto& ecoup = electron_coupled_states();
    for (const auto& e : eprod)
        for (int ta = tIa; ta >= -tIa; ta -= 2) {
            const int tb = basis.M_F.twice - (e.two_m_a + e.two_m_b) - ta;
            if (std::abs(tb) > tIb || (tIb - tb) % 2 != 0) continue;
            ProductState p{e.two_m_a, e.two_m_b, ta, tb};
            index[p] = prod.size();
            prod.push_back(p);
        }
    if (prod.size() != n) throw std::logic_error("product and coupled bases differ in size");

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ch = basis.channels[k];
        std::size_t c = 0;
        while (c < ecoup.size() && !(ecoup[c].S == ch.S && ecoup[c].m_S == ch.m_S)) ++c;
        if (c == ecoup.size()) throw std::invalid_argument("channel with invalid electron spin: " + ch.label());
        for (std::size_t ep = 0; ep < eprod.size(); ++ep) {
            const double u = basis.electron_transform(ep, c);
            if (u == 0.0) continue;
            auto it = index.find(ProductState{eprod[ep].two_m_a, eprod[ep].two_m_b, ch.m_iA.twice, ch.m_iB.twice});
            if (it == index.end()) throw std::invalid_argument("channel outside the M_F block: " + ch.label());
            C(it->second, k) = u;
        }
    }

    Eigen::MatrixXd ca = Eigen::MatrixXd::Zero(n, n), cb = ca, ze = ca, zn = ca;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& p = prod[j];
        contact_terms(p.tsa, p.tia, tIa, [&](int ts, int ti, double v) {
            ca(index.at(ProductState{ts, p.tsb, ti, p.tib}), j) += a.a_hf * v;
        });
        contact_terms(p.tsb, p.tib, tIb, [&](int ts, int ti, double v) {
            cb(index.at(ProductState{p.tsa, ts, p.tia, ti}), j) += b.a_hf * v;
        });
        ze(j, j) = PhysicalConstants::bohr_magneton_au_per_gauss * 0.5 * (a.g_s * p.tsa + b.g_s * p.tsb);
        zn(j, j) = -PhysicalConstants::nuclear_magneton_au_per_gauss * 0.5 * (a.g_i * p.tia + b.g_i * p.tib);
    }

    auto to_coupled = [&](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd out = C.transpose() * m * C;
        return Eigen::MatrixXd(0.5 * (out + out.transpose()));
    };
    SpinHamiltonian h;
    h.contact_a = to_coupled(ca);
    h.contact_b = to_coupled(cb);
    h.field_derivative = to_coupled(ze + zn);
    h.zeeman_electron = to_coupled(ze) * field.gauss;
    h.zeeman_nuclear = to_coupled(zn) * field.gauss;
    return h;
}

double lowest_threshold(const AtomSpecies& a, const AtomSpecies& b, FieldConfig field)
{
    const auto ia = HalfInt::from_twice(a.two_nuclear_spin), ib = HalfInt::from_twice(b.two_nuclear_spin);
    double lowest = std::numeric_limits<double>::infinity();
    for (HalfInt mf : allowed_mf(ia, ib)) {
        const auto basis = enumerate_channels(ia, ib, 0, 0, mf);
        const Eigen::MatrixXd h = assemble_spin_hamiltonian(basis, a, b, field).total();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
        lowest = std::min(lowest, es.eigenvalues()(0));
    }
    return lowest;
}

Thresholds atomic_thresholds(const GroundModel& model)
{
    Thresholds t;
    t.reference = lowest_threshold(model.atom_a, model.atom_b, model.field);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_spin_hamiltonian(model).total(),
                                                      Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) t.energies.push_back(es.eigenvalues()(i) - t.reference);
    return t;
}

Eigen::MatrixXd potential_matrix(const GroundModel& model, double r)
{
    if (!(r > 0.0)) throw std::domain_error("potential_matrix needs R > 0");
    const double asym = model.v_x.asymptote();
    const double vs = model.v_x(r) - asym, vt = model.v_a(r) - asym;
    const int l = model.basis.l;
    const double centrifugal = l * (l + 1.0) / (2.0 * model.reduced_mass_au() * r * r);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(model.basis.size(), model.basis.size());
    for (std::size_t k = 0; k < model.basis.size(); ++k)
        w(k, k) = (model.basis.channels[k].S == 0 ? vs : vt) + centrifugal;
    return w;
}

CoupledChannelProblem coupled_channel_problem(const GroundModel& model, bool shift_to_threshold)
{
    auto shared = std::make_shared<GroundModel>(model);
    Eigen::MatrixXd spin = assemble_spin_hamiltonian(model).total();
    if (shift_to_threshold)
        spin -= lowest_threshold(model.atom_a, model.atom_b, model.field) *
                Eigen::MatrixXd::Identity(spin.rows(), spin.cols());
    CoupledChannelProblem p;
    p.channels = model.basis.size();
    p.mass = model.reduced_mass_au();
    p.potential = [shared, spin](double r) -> Eigen::MatrixXd { return potential_matrix(*shared, r) + spin; };
    return p;
}

double nuclear_zeeman_energy(HalfInt m_a, HalfInt m_b, FieldConfig field, const AtomSpecies& a, const AtomSpecies& b)
{
    auto check = [](HalfInt m, int two_i, const std::string& who) {
        if (std::abs(m.twice) > two_i || (two_i - m.twice) % 2 != 0)
            throw std::out_of_range("nuclear projection " + to_string(m) + " outside the spin of " + who);
    };
    check(m_a, a.two_nuclear_spin, a.name);
    check(m_b, b.two_nuclear_spin, b.name);
    return -(a.g_i * m_a.value() + b.g_i * m_b.value()) * PhysicalConstants::nuclear_magneton_au_per_gauss *
           field.gauss;
}

namespace {

void require_normalized(const BoundState& state, const ChannelBasis& basis)
{
    if (state.channels() != basis.size()) throw std::invalid_argument("state and basis differ in channel count");
    const double n = state.norm();
    if (!(std::abs(n - 1.0) < 1e-8))
        throw std::invalid_argument("state is not normalised (norm " + std::to_string(n) + ")");
}

}  // namespace

double triplet_fraction(const BoundState& state, const ChannelBasis& basis)
{
    require_normalized(state, basis);
    const Eigen::VectorXd w = state.channel_weights();
    double f = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis.channels[k].S == 1) f += w(k);
    return f;
}

double singlet_fraction(const BoundState& state, const ChannelBasis& basis)
{
    require_normalized(state, basis);
    const Eigen::VectorXd w = state.channel_weights();
    double f = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (basis.channels[k].S == 0) f += w(k);
    return f;
}

std::vector<double> dipole_dipole_shifts(const std::vector<BoundState>& states, const ChannelBasis& basis,
                                         const AtomSpecies& a, const AtomSpecies& b)
{
    const double alpha = PhysicalConstants::fine_structure;
    const double orbital = orbital_c_diagonal(basis.l, basis.m_l, 2);
    const double pref = -alpha * alpha * a.g_s * b.g_s / 4.0 * orbital;

    std::vector<double> factor(basis.size(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& c = basis.channels[k];
        if (c.S == 1) factor[k] = pref * (3.0 * c.m_S * c.m_S - 2.0) / 2.0;
    }

    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) {
        if (s.channels() != basis.size()) throw std::invalid_argument("state and basis differ in channel count");
        double shift = 0.0;
        if (orbital != 0.0) {
            const double h = s.grid.spacing();
            for (std::size_t k = 0; k < basis.size(); ++k) {
                if (factor[k] == 0.0) continue;
                double inv_r3 = 0.0;
                for (std::size_t i = 0; i < s.grid.points; ++i) {
                    const double r = s.grid.r(i);
                    inv_r3 += s.psi(i, k) * s.psi(i, k) / (r * r * r);
                }
                shift += factor[k] * inv_r3 * h;
            }
        }
        out.push_back(shift);
    }
    return out;
}

}  // namespace ccmol
