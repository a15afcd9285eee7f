// Acceptance suite: one PASS/FAIL line per criterion, with timings.
//
//   ccmol_acceptance [--only N] [--expect-fail N,M,...]
//
// The exit status is 0 when every criterion passes, or, with --expect-fail,
// when exactly the listed criteria fail and every other one passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccmol/config.hpp"
#include "ccmol/excited.hpp"
#include "ccmol/ground.hpp"
#include "ccmol/polarizability.hpp"
#include "ccmol/radial.hpp"
#include "ccmol/spin_basis.hpp"
#include "ccmol/units.hpp"
#include "oracles.hpp"

using namespace ccmol;

namespace {

// Pinned tolerances and budgets.
constexpr double kAnalyticRel = 1e-8;
constexpr double kBackendRel = 1e-8, kBackendAbs = 1e-12;
constexpr double kSeparabilityAbs = 1e-9;
constexpr double kBreitRabiRel = 1e-12;
constexpr double kZeemanHz = 1e3;
constexpr double kScaleRatioRel = 0.15;
constexpr double kDistinctRel = 1e-9;
constexpr double kPureFraction = 1e-10;
constexpr double kFractionSum = 1e-10;
constexpr double kOffDiagonalRel = 1e-3;
constexpr double kZeroPi1Fraction = 1e-20;
constexpr double kZeroDipole = 1e-12;
constexpr double kMixingRel = 1e-8;
constexpr double kStaticRel = 1e-12;
constexpr double kFwhmRel = 0.01;
constexpr double kAdditivityRel = 1e-14;
constexpr double kTrapRel = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const AtomSpecies& potassium()
{
    static const AtomSpecies s = find_species(load_species_file(default_species_file()), "K40");
    return s;
}
const AtomSpecies& rubidium()
{
    static const AtomSpecies s = find_species(load_species_file(default_species_file()), "Rb87");
    return s;
}

const HalfInt kIK = HalfInt::from_twice(8), kIRb = HalfInt::from_twice(3);

CoupledChannelProblem one_channel(double mass, std::function<double(double)> v)
{
    CoupledChannelProblem p;
    p.channels = 1;
    p.mass = mass;
    p.potential = [v](double r) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = v(r);
        return m;
    };
    return p;
}

Outcome channel_counting()
{
    const auto basis = enumerate_channels(kIK, kIRb, 0, 0, HalfInt::from_twice(-7));
    std::size_t total = 0;
    for (HalfInt mf : allowed_mf(kIK, kIRb)) total += enumerate_channels(kIK, kIRb, 0, 0, mf).size();
    const std::size_t singlets = basis.singlet_count();
    Outcome o;
    o.pass = basis.size() == 12 && singlets == 3 && basis.size() - singlets == 9 && total == 144;
    o.detail = "M_F=-7/2: " + std::to_string(basis.size()) + " channels (" + std::to_string(singlets) + " singlet, " +
               std::to_string(basis.size() - singlets) + " triplet); all M_F: " + std::to_string(total);
    return o;
}

Outcome solver_correctness()
{
    double worst_h = 0.0, worst_m = 0.0, worst_toy = 0.0;
    bool ok = true;
    std::string counts;
    for (Backend b : {Backend::dvr, Backend::propagation}) {
        SolverSettings s;
        s.backend = b;
        s.refine_tol = 1e-13;

        const double mu = 1000.0, w = 0.01, re = 5.0;
        const auto harmonic = one_channel(mu, [=](double r) { return 0.5 * mu * w * w * (r - re) * (r - re); });
        const auto h = solve(harmonic, RadialGrid(1.5, 8.5, 100), {0.0, 10.0 * w}, s);
        if (h.states.size() != 10) ok = false;
        for (std::size_t n = 0; n < h.states.size() && n < 10; ++n) {
            const double exact = w * (n + 0.5);
            worst_h = std::max(worst_h, std::abs(h.states[n].energy / exact - 1.0));
        }

        const double d = 0.1, alpha = 1.0;
        const auto morse = one_channel(mu, [=](double r) {
            const double e = std::exp(-alpha * (r - re));
            return d * (1.0 - e) * (1.0 - e) - d;
        });
        const double hi = 0.5 * (oracle::morse_level(d, alpha, mu, 9) + oracle::morse_level(d, alpha, mu, 10));
        const auto m = solve(morse, RadialGrid(3.0, 14.0, 150), {-d, hi}, s);
        if (m.states.size() != 10) ok = false;
        counts += " " + backend_name(b) + " " + std::to_string(h.states.size()) + "+" + std::to_string(m.states.size());
        for (std::size_t n = 0; n < m.states.size() && n < 10; ++n) {
            const double exact = oracle::morse_level(d, alpha, mu, static_cast<int>(n));
            worst_m = std::max(worst_m, std::abs(m.states[n].energy / exact - 1.0));
        }
    }
    ok = ok && worst_h <= kAnalyticRel && worst_m <= kAnalyticRel;

    // three diabatic wells with two crossings and smooth couplings
    CoupledChannelProblem toy;
    toy.channels = 3;
    toy.mass = 1000.0;
    toy.potential = [](double r) {
        Eigen::MatrixXd m(3, 3);
        const double k = 1000.0 * 0.01 * 0.01;
        m(0, 0) = 0.5 * k * (r - 5.0) * (r - 5.0);
        m(1, 1) = 0.5 * k * (r - 5.6) * (r - 5.6) + 0.004;
        m(2, 2) = 0.5 * 1.44 * k * (r - 4.7) * (r - 4.7) + 0.008;
        m(0, 1) = m(1, 0) = 0.001 * std::exp(-(r - 5.3) * (r - 5.3));
        m(0, 2) = m(2, 0) = 0.0005;
        m(1, 2) = m(2, 1) = 0.0008 * std::exp(-0.5 * (r - 5.0) * (r - 5.0));
        return m;
    };
    SolverSettings sd, sp;
    sd.refine_tol = sp.refine_tol = 1e-13;
    sp.backend = Backend::propagation;
    const RadialGrid g(2.5, 8.0, 120);
    const EnergyWindow win{0.0, 0.0452};
    const auto a = solve(toy, g, win, sd), b = solve(toy, g, win, sp);
    if (a.states.size() != b.states.size() || a.states.empty()) ok = false;
    for (std::size_t i = 0; i < std::min(a.states.size(), b.states.size()); ++i) {
        const double e = a.states[i].energy, f = b.states[i].energy;
        worst_toy = std::max(worst_toy, std::abs(e - f) / (kBackendRel * std::abs(e) + kBackendAbs));
    }
    ok = ok && worst_toy <= 1.0;
    Outcome o;
    o.pass = ok;
    o.detail = "levels" + counts + "; harmonic max rel " + fmt("%.2e", worst_h) + ", Morse max rel " + fmt("%.2e", worst_m) +
               "; 3-channel toy " + std::to_string(a.states.size()) + "/" + std::to_string(b.states.size()) +
               " levels, max |dE|/(1e-8|E|+1e-12) = " + fmt("%.3f", worst_toy);
    return o;
}

double reduced_mass_au() { return reduced_mass(potassium(), rubidium()) * PhysicalConstants::amu_in_me; }

Outcome separability()
{
    const auto& curves = builtin_model_curves();
    const double field = 545.9;
    const auto basis = enumerate_channels(kIK, kIRb, 0, 0, HalfInt::from_twice(-7));
    const GroundModel model(potassium(), rubidium(), curves.x1sigma, curves.x1sigma, basis, FieldConfig{field});
    const RadialGrid grid(6.0, 10.0, 120);

    const auto single = solve_dvr(single_curve_problem(curves.x1sigma, model.reduced_mass_au(), 0), grid, {-1.0, 0.0});
    const auto spin = oracle::pair_thresholds(potassium(), rubidium(), field, -7);
    const double zero = oracle::lowest_pair_threshold(potassium(), rubidium(), field);
    const double e0 = single.states.at(0).energy, e1 = single.states.at(1).energy, e2 = single.states.at(2).energy;

    std::vector<double> expected;
    for (double ev : {e0, e1})
        for (double t : spin) expected.push_back(ev + t - zero);
    std::sort(expected.begin(), expected.end());
    const EnergyWindow win{expected.front() - 1e-4, 0.5 * (e1 + e2) + (spin.front() - zero)};

    const auto coupled = solve_dvr(coupled_channel_problem(model), grid, win);
    Outcome o;
    double worst = 0.0;
    bool ok = coupled.states.size() == expected.size();
    for (std::size_t i = 0; i < std::min(expected.size(), coupled.states.size()); ++i)
        worst = std::max(worst, std::abs(coupled.states[i].energy - expected[i]));
    o.pass = ok && worst <= kSeparabilityAbs;
    o.detail = std::to_string(coupled.states.size()) + " coupled levels vs " + std::to_string(expected.size()) +
               " separable sums (v=0,1 x 12 thresholds), max |dE| = " + fmt("%.2e", worst) + " hartree";
    return o;
}

Outcome breit_rabi()
{
    double worst = 0.0;
    std::size_t compared = 0;
    bool ok = true;
    for (double field : {0.0, 100.0, 545.9, 1000.0}) {
        for (HalfInt mf : allowed_mf(kIK, kIRb)) {
            const auto basis = enumerate_channels(kIK, kIRb, 0, 0, mf);
            const auto& c = builtin_model_curves();
            const GroundModel model(potassium(), rubidium(), c.x1sigma, c.a3sigma, basis, FieldConfig{field});
            const Thresholds t = atomic_thresholds(model);
            const auto ref = oracle::pair_thresholds(potassium(), rubidium(), field, mf.twice);
            if (ref.size() != t.energies.size()) {
                ok = false;
                continue;
            }
            for (std::size_t i = 0; i < ref.size(); ++i) {
                worst = std::max(worst, std::abs(t.energies[i] + t.reference - ref[i]) / std::abs(ref[i]));
                ++compared;
            }
        }
    }
    Outcome o;
    o.pass = ok && compared == 4 * 144 && worst <= kBreitRabiRel;
    o.detail = std::to_string(compared) + " thresholds at B = 0, 100, 545.9, 1000 G, max rel dev " + fmt("%.2e", worst);
    return o;
}

struct Sublevel {
    int two_mk, two_mrb;
    double energy;
};

// Singlet sublevels of the deepest X level in the three lowest M_F blocks.
std::vector<Sublevel> deep_singlet_sublevels(double field)
{
    const auto& c = builtin_model_curves();
    const RadialGrid grid(6.5, 9.0, 100);
    const double mass = reduced_mass_au();
    const auto single = solve_dvr(single_curve_problem(c.x1sigma, mass, 0), grid, {-1.0, 0.0});
    const double zero = lowest_threshold(potassium(), rubidium(), FieldConfig{field});
    const double centre = single.states.at(0).energy - zero;

    std::vector<Sublevel> out;
    for (int two_mf : {-11, -9, -7}) {
        const auto basis = enumerate_channels(kIK, kIRb, 0, 0, HalfInt::from_twice(two_mf));
        const GroundModel model(potassium(), rubidium(), c.x1sigma, c.a3sigma, basis, FieldConfig{field});
        const auto res = solve_dvr(coupled_channel_problem(model), grid, {centre - 1e-6, centre + 1e-6});
        for (const auto& s : res.states) {
            const auto& ch = basis.channels[static_cast<std::size_t>(s.dominant_channel())];
            out.push_back({ch.m_iA.twice, ch.m_iB.twice, s.energy});
        }
    }
    return out;
}

Outcome nuclear_zeeman()
{
    const double field = 545.9;
    const auto levels = deep_singlet_sublevels(field);
    const AtomSpecies &k = potassium(), &rb = rubidium();
    Outcome o;
    if (levels.size() != 6) {
        o.detail = "expected 6 singlet sublevels, found " + std::to_string(levels.size());
        return o;
    }
    const double hz = PhysicalConstants::hartree_in_hz;
    const auto& ref = levels.front();
    const double ez_ref =
        nuclear_zeeman_energy(HalfInt::from_twice(ref.two_mk), HalfInt::from_twice(ref.two_mrb), FieldConfig{field}, k, rb);
    double worst = 0.0;
    for (const auto& l : levels) {
        const double ez =
            nuclear_zeeman_energy(HalfInt::from_twice(l.two_mk), HalfInt::from_twice(l.two_mrb), FieldConfig{field}, k, rb);
        worst = std::max(worst, std::abs((l.energy - ref.energy) - (ez - ez_ref)) * hz);
    }

    // least-squares E = c + s_K m_K + s_Rb m_Rb
    Eigen::MatrixXd a(static_cast<Eigen::Index>(levels.size()), 3);
    Eigen::VectorXd y(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const auto& l = levels[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = 0.5 * l.two_mk;
        a(i, 2) = 0.5 * l.two_mrb;
        y(i) = (l.energy - ref.energy) * hz;
    }
    const Eigen::Vector3d fit = a.colPivHouseholderQr().solve(y);
    const double ratio = fit(1) / fit(2), input = k.g_i / rb.g_i;
    const double ratio_dev = std::abs(ratio / input - 1.0);
    o.pass = worst <= kZeemanHz && ratio_dev <= kScaleRatioRel;
    o.detail = "max splitting deviation from -(gK mK + gRb mRb) muN B = " + fmt("%.1f", worst) +
               " Hz; scales s_K = " + fmt("%.1f", fit(1)) + " Hz, s_Rb = " + fmt("%.1f", fit(2)) +
               " Hz, ratio " + fmt("%.4f", ratio) + " vs g-ratio " + fmt("%.4f", input);
    return o;
}

Outcome dipole_dipole()
{
    const auto& c = builtin_model_curves();
    const double field = 545.9, mass = reduced_mass_au();
    const HalfInt mf = HalfInt::from_twice(-7);
    Outcome o;
    bool ok = true;

    // l = 0 coupled levels near the bottom of the triplet well
    const RadialGrid grid(8.0, 16.0, 100);
    const auto single0 = solve_dvr(single_curve_problem(c.a3sigma, mass, 0), grid, {-1.0, 0.0});
    const double zero = lowest_threshold(potassium(), rubidium(), FieldConfig{field});
    const double ea0 = single0.states.at(0).energy - zero;
    const double span = ghz_to_hartree(15.0);
    const auto b0 = enumerate_channels(kIK, kIRb, 0, 0, mf);
    const GroundModel m0(potassium(), rubidium(), c.x1sigma, c.a3sigma, b0, FieldConfig{field});
    const auto s0 = solve_dvr(coupled_channel_problem(m0), grid, {ea0 - span, ea0 + span});
    double max_l0 = 0.0;
    for (double x : dipole_dipole_shifts(s0.states, b0, potassium(), rubidium())) max_l0 = std::max(max_l0, std::abs(x));
    ok = ok && !s0.states.empty() && max_l0 == 0.0;

    // a pure-singlet l = 2 state
    const auto b2 = enumerate_channels(kIK, kIRb, 2, 0, mf);
    BoundState singlet = s0.states.at(0);
    singlet.psi.setZero();
    for (std::size_t k = 0; k < b2.size(); ++k)
        if (b2.channels[k].S == 0) singlet.psi.col(static_cast<Eigen::Index>(k)).setConstant(1.0);
    singlet.psi /= std::sqrt(singlet.norm());
    double max_singlet = 0.0;
    for (int ml = -2; ml <= 2; ++ml) {
        const auto b = enumerate_channels(kIK, kIRb, 2, ml, mf);
        max_singlet = std::max(max_singlet, std::abs(dipole_dipole_shifts({singlet}, b, potassium(), rubidium())[0]));
    }
    ok = ok && max_singlet == 0.0;

    // l = 2 triplet features: the radial-spin states do not depend on m_l
    const auto single2 = solve_dvr(single_curve_problem(c.a3sigma, mass, 2), grid, {-1.0, 0.0});
    const double ea2 = single2.states.at(0).energy - zero;
    const GroundModel m2(potassium(), rubidium(), c.x1sigma, c.a3sigma, b2, FieldConfig{field});
    const auto s2 = solve_dvr(coupled_channel_problem(m2), grid, {ea2 - span, ea2 + span});
    int features = 0, three = 0;
    for (const auto& s : s2.states) {
        if (triplet_fraction(s, b2) < 0.9) continue;
        ++features;
        std::vector<double> shifts;
        for (int ml = -2; ml <= 2; ++ml)
            shifts.push_back(
                dipole_dipole_shifts({s}, enumerate_channels(kIK, kIRb, 2, ml, mf), potassium(), rubidium())[0]);
        std::sort(shifts.begin(), shifts.end());
        int distinct = 1;
        for (std::size_t i = 1; i < shifts.size(); ++i)
            if (std::abs(shifts[i] - shifts[i - 1]) > kDistinctRel * std::abs(shifts[i])) ++distinct;
        three += distinct == 3;
    }
    ok = ok && features > 0 && three == features;
    o.pass = ok;
    o.detail = "l=0: " + std::to_string(s0.states.size()) + " levels, max |shift| " + fmt("%.1e", max_l0) +
               "; pure singlet l=2 max |shift| " + fmt("%.1e", max_singlet) + "; l=2 triplet features with 3 values: " +
               std::to_string(three) + "/" + std::to_string(features);
    return o;
}

Outcome excited_structure()
{
    const ExcitedModel model = ExcitedModel::builtin();
    const RadialGrid grid(5.0, 16.0, 601);
    const EnergyWindow win{cm1_to_hartree(7900.0), cm1_to_hartree(11200.0)};
    const auto pure = excited_levels(model.uncoupled(), grid, win);
    double worst_pure = 0.0;
    for (const auto& l : pure.levels) {
        const auto& f = l.fractions;
        worst_pure = std::max(worst_pure, 1.0 - std::max({f.sigma3, f.pi3, f.pi1}));
    }
    const auto mixed = excited_levels(model, grid, win);
    double worst_sum = 0.0;
    for (const auto& l : mixed.levels) worst_sum = std::max(worst_sum, std::abs(l.fractions.sum() - 1.0));

    const Eigen::Matrix3d w = assemble_excited_W(model, 100.0);
    const double third = model.fine_structure / 3.0;
    double worst_off = 0.0;
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
        worst_off = std::max(worst_off, std::abs(std::abs(w(i, j)) / third - 1.0));

    Outcome o;
    o.pass = !pure.levels.empty() && !mixed.levels.empty() && worst_pure <= kPureFraction &&
             worst_sum <= kFractionSum && worst_off <= kOffDiagonalRel;
    o.detail = std::to_string(pure.levels.size()) + " uncoupled levels, max 1 - f_max " + fmt("%.1e", worst_pure) + "; " +
               std::to_string(mixed.levels.size()) + " coupled levels, max |sum f - 1| " + fmt("%.1e", worst_sum) +
               "; |W_ij(100 a0)|/(Delta/3) max dev " + fmt("%.1e", worst_off);
    return o;
}

// Same potential with a constant offset, so both curves share every vibrational function.
PotentialCurve shifted(const PotentialCurve& c, const std::string& label, double delta)
{
    std::vector<CurvePoint> pts = c.points();
    for (auto& p : pts) p.value += delta;
    return PotentialCurve(label, pts, c.splice_radius(), c.asymptote() + delta, c.c6(), c.c8(), c.c10());
}

Outcome transition_dipoles()
{
    const auto& curves = builtin_model_curves();
    const ExcitedModel model = ExcitedModel::builtin();
    const RadialGrid grid(5.0, 16.0, 601);
    const double mass = reduced_mass_au();
    const auto ground = solve_dvr(single_curve_problem(curves.x1sigma, mass, 0), grid, {-1.0, 0.0}).states.at(0);
    const auto d = ChannelDipoles::singlet(curves.dipole_x_pi1);

    const auto pure = excited_levels(model.uncoupled(), grid, {cm1_to_hartree(7900.0), cm1_to_hartree(11200.0)});
    int zero_levels = 0;
    double worst_zero = 0.0;
    for (const auto& l : pure.levels) {
        if (l.fractions.pi1 > kZeroPi1Fraction) continue;
        ++zero_levels;
        worst_zero = std::max(worst_zero, transition_dipole(ground, l.state, d));
    }

    // two-level toy: 3Sigma+ = 1Pi + delta with a constant coupling c; 3Pi far away
    ExcitedModel toy = model.uncoupled();
    const double delta = cm1_to_hartree(50.0), c = cm1_to_hartree(20.0);
    toy.sigma3 = shifted(model.pi1, "toy_sigma", delta);
    toy.pi3 = shifted(model.pi1, "toy_pi3", cm1_to_hartree(5000.0));
    toy.xi_sigma_pi1 = RFunction::constant("toy_xi", c);
    const double bottom = adiabatic_minima(toy, 5.0, 16.0)[0];
    const EnergyWindow win{bottom, bottom + cm1_to_hartree(400.0)};
    const auto mixed = excited_levels(toy, grid, win);
    ExcitedModel bare = toy.uncoupled();
    bare.sigma3 = shifted(model.pi1, "toy_sigma", cm1_to_hartree(5000.0));
    const auto reference = excited_levels(bare, grid, {bottom - cm1_to_hartree(100.0), bottom + cm1_to_hartree(500.0)});

    // eigenvalues lambda_-/+ of [[delta, c], [c, 0]] and the 1Pi amplitudes
    const double root = std::hypot(0.5 * delta, c);
    const double lambda[2] = {0.5 * delta - root, 0.5 * delta + root};
    double worst_mix = 0.0;
    int matched = 0;
    for (const auto& l : mixed.levels) {
        for (int k = 0; k < 2; ++k) {
            const double amp = std::abs(c) / std::hypot(c, lambda[k]);
            for (const auto& r : reference.levels) {
                if (std::abs(l.state.energy - lambda[k] - r.state.energy) > 1e-9) continue;
                const double want = amp * transition_dipole(ground, r.state, d);
                const double got = transition_dipole(ground, l.state, d);
                if (want > 1e-6) {
                    worst_mix = std::max(worst_mix, std::abs(got / want - 1.0));
                    ++matched;
                }
            }
        }
    }
    Outcome o;
    o.pass = zero_levels > 0 && worst_zero < kZeroDipole && matched >= 4 && worst_mix <= kMixingRel;
    o.detail = std::to_string(zero_levels) + " levels with f_Pi1 = 0, max |TDM| " + fmt("%.1e", worst_zero) +
               " e a0; mixing toy " + std::to_string(matched) + " levels, max rel dev from amplitude scaling " +
               fmt("%.1e", worst_mix);
    return o;
}

ExcitedLevelCatalog single_line(double de, double gamma, double strength)
{
    ExcitedLevelCatalog c;
    c.level = {"X1Sigma+", 0, 0, 0.0};
    c.entries.push_back({"test", 0, 1, de, gamma, strength, CatalogSource::bound});
    return c;
}

Outcome polarizability_algebra()
{
    const double de = cm1_to_hartree(10000.0), s = 2.0;
    const double alpha0 = dynamic_polarizability(single_line(de, 0.0, s), 0.0).alpha.real();
    const double static_dev = std::abs(alpha0 / (2.0 * s / de) - 1.0);

    // FWHM of Im alpha from a fine scan
    const double gamma_cm1 = 0.1;
    const auto line = single_line(de, cm1_to_hartree(gamma_cm1), s);
    const double step = gamma_cm1 / 400.0;
    const auto sp = scan(line, 10000.0 - 5.0 * gamma_cm1, 10000.0 + 5.0 * gamma_cm1, step);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < sp.size(); ++i)
        if (sp.alpha[i].imag() > sp.alpha[peak].imag()) peak = i;
    const double half = 0.5 * sp.alpha[peak].imag();
    auto crossing = [&](std::size_t i, std::size_t j) {
        const double a = sp.alpha[i].imag(), b = sp.alpha[j].imag();
        return sp.omega_cm1[i] + (half - a) / (b - a) * (sp.omega_cm1[j] - sp.omega_cm1[i]);
    };
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && sp.alpha[lo].imag() > half) --lo;
    while (hi + 1 < sp.size() && sp.alpha[hi].imag() > half) ++hi;
    const double fwhm = crossing(hi - 1, hi) - crossing(lo, lo + 1);
    const double fwhm_dev = std::abs(fwhm / gamma_cm1 - 1.0);

    // additivity of two catalogs
    ExcitedLevelCatalog a, b;
    a.level = b.level = {"X1Sigma+", 0, 0, -0.02};
    for (int k = 0; k < 5; ++k) {
        a.entries.push_back({"A", k, 1, 0.03 + 0.002 * k, mhz_to_hartree(6.0), 0.01 * (k + 1), CatalogSource::bound});
        b.entries.push_back({"B", k, 1, 0.035 + 0.0015 * k, mhz_to_hartree(3.0), 0.02 / (k + 1), CatalogSource::bound});
    }
    const auto ab = merge(a, b);
    double add_dev = 0.0;
    for (double w : {0.0, 0.01, 0.04, 0.0449, 0.06}) {
        const auto x = dynamic_polarizability(ab, w).alpha;
        const auto y = dynamic_polarizability(a, w).alpha + dynamic_polarizability(b, w).alpha;
        add_dev = std::max(add_dev, std::abs(x - y) / std::abs(y));
    }

    // light shift U = -alpha_SI I / (2 eps0 c) with alpha_SI = 4 pi eps0 a0^3 alpha
    using C = PhysicalConstants;
    bool trap_ok = true;
    double trap_dev = 0.0;
    for (double alpha : {150.0, -40.0}) {
        for (double intensity : {1e3, 2e4}) {
            const TrapDepth t = trap_depth({alpha, 3.0}, intensity);
            const double si = 4.0 * std::numbers::pi * C::vacuum_permittivity * std::pow(C::bohr_radius, 3) * alpha;
            const double u = -si * intensity * 1e4 / (2.0 * C::vacuum_permittivity * C::speed_of_light);
            trap_dev = std::max(trap_dev, std::abs(t.hartree * C::hartree / u - 1.0));
            trap_ok = trap_ok && (alpha > 0.0 ? t.hartree < 0.0 : t.hartree > 0.0);
            const TrapDepth twice = trap_depth({alpha, 3.0}, 2.0 * intensity);
            trap_dev = std::max(trap_dev, std::abs(twice.hartree / (2.0 * t.hartree) - 1.0));
        }
    }
    Outcome o;
    o.pass = static_dev <= kStaticRel && fwhm_dev <= kFwhmRel && add_dev <= kAdditivityRel && trap_ok &&
             trap_dev <= kTrapRel;
    o.detail = "alpha(0) rel dev " + fmt("%.1e", static_dev) + "; FWHM " + fmt("%.5f", fwhm) + " vs " +
               fmt("%.5f", gamma_cm1) + " cm-1; additivity rel dev " + fmt("%.1e", add_dev) + "; trap depth rel dev " +
               fmt("%.1e", trap_dev) + (trap_ok ? ", sign ok" : ", wrong sign");
    return o;
}

Outcome declared()
{
    // The empirical-curve numbers cannot be reproduced here; check that a
    // supplied curve directory flows through the loader unchanged.
    const auto dir = std::filesystem::temp_directory_path() / "ccmol_acceptance_curves";
    std::filesystem::remove_all(dir);
    write_builtin_curves(dir);
    nlohmann::json doc = {{"curves_dir", dir.string()}};
    const ModelCurves loaded = load_curve_set(parse_config_json(doc));
    const ModelCurves& ref = builtin_model_curves();
    double worst = 0.0;
    for (double r = 4.0; r <= 60.0; r += 0.37) {
        worst = std::max(worst, std::abs(loaded.x1sigma(r) - ref.x1sigma(r)));
        worst = std::max(worst, std::abs(loaded.a3sigma(r) - ref.a3sigma(r)));
        worst = std::max(worst, std::abs(loaded.pi1(r) - ref.pi1(r)));
        worst = std::max(worst, std::abs(loaded.xi_sigma_pi1(r) - ref.xi_sigma_pi1(r)));
    }
    std::filesystem::remove_all(dir);
    Outcome o;
    o.pass = worst == 0.0;
    o.detail = "(declared: empirical-curve binding energies, fractions and dipoles need user-supplied curves) "
               "ingestion round trip max |dV| = " + fmt("%.1e", worst);
    return o;
}

std::set<int> parse_list(const std::string& s)
{
    std::set<int> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    int only = 0;
    std::string expect_fail;
    app.add_option("--only", only, "run a single criterion");
    app.add_option("--expect-fail", expect_fail, "comma-separated criteria known to fail");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, 1.0, channel_counting},   {2, 10.0, solver_correctness}, {3, 30.0, separability},
        {4, 5.0, breit_rabi},         {5, 10.0, nuclear_zeeman},     {6, 10.0, dipole_dipole},
        {7, 30.0, excited_structure}, {8, 30.0, transition_dipoles}, {9, 5.0, polarizability_algebra},
        {10, 10.0, declared},
    };
    const std::set<int> expected = parse_list(expect_fail);
    std::set<int> failed;
    for (const auto& c : all) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) failed.insert(c.id);
        std::printf("criterion %2d %s  %.2f s (budget %.0f s%s)  %s\n", c.id, pass ? "PASS" : "FAIL", secs, c.budget_s,
                    in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    std::set<int> expected_here;
    for (int id : expected)
        if (only == 0 || id == only) expected_here.insert(id);
    if (!expected.empty()) {
        std::printf("known failures: %s\n", expect_fail.c_str());
        return failed == expected_here ? 0 : 1;
    }
    return failed.empty() ? 0 : 1;
}
