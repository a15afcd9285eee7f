#include <doctest.h>

#include <cmath>

#include "ccmol/excited.hpp"
#include "ccmol/polarizability.hpp"
#include "fixtures.hpp"

using namespace ccmol;

namespace {

const RadialGrid kGrid(5.0, 16.0, 301);

EnergyWindow lowest_band(const ExcitedModel& m)
{
    const double bottom = adiabatic_minima(m, 5.0, 16.0)[0];
    return {bottom - 1e-6, bottom + cm1_to_hartree(300.0)};
}

}  // namespace

TEST_SUITE("excited_so")
{
    TEST_CASE("W is symmetric with the curves on the diagonal")
    {
        const auto m = ExcitedModel::builtin();
        for (double r : {5.5, 7.0, 9.0, 30.0}) {
            const Eigen::Matrix3d w = assemble_excited_W(m, r);
            CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
            const double rot = m.J * (m.J + 1) / (2.0 * m.mass * r * r);
            CHECK(w(kSigma3, kSigma3) == doctest::Approx(m.sigma3(r) + rot).epsilon(1e-15));
            CHECK(w(kPi3, kPi3) == doctest::Approx(m.pi3(r) + rot).epsilon(1e-15));
            CHECK(w(kPi1, kPi1) == doctest::Approx(m.pi1(r) + rot).epsilon(1e-15));
            CHECK(w(kSigma3, kPi1) == m.xi_sigma_pi1(r));
        }
        CHECK(m.mass == doctest::Approx(fixture::krb_mass_au()).epsilon(1e-15));
    }

    TEST_CASE("uncoupled model is diagonal")
    {
        const auto u = ExcitedModel::builtin().uncoupled();
        for (double r : {5.5, 8.0, 12.0}) {
            const Eigen::Matrix3d w = assemble_excited_W(u, r);
            CHECK(w(0, 1) == 0.0);
            CHECK(w(0, 2) == 0.0);
            CHECK(w(1, 2) == 0.0);
        }
    }

    TEST_CASE("adiabatic minima are ordered and bounded by the diabatic ones")
    {
        const auto m = ExcitedModel::builtin();
        const auto a = adiabatic_minima(m, 5.0, 16.0);
        CHECK(a[0] <= a[1]);
        CHECK(a[1] <= a[2]);
        const auto d = adiabatic_minima(m.uncoupled(), 5.0, 16.0);
        CHECK(a[0] <= d[0] + 1e-12);
    }

    TEST_CASE("level fractions")
    {
        const auto m = ExcitedModel::builtin();
        const auto mixed = excited_levels(m, kGrid, lowest_band(m));
        REQUIRE_FALSE(mixed.levels.empty());
        for (const auto& l : mixed.levels) {
            CHECK(l.fractions.sum() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(l.fractions.sigma3 >= 0.0);
            CHECK(l.fractions.pi3 >= 0.0);
            CHECK(l.fractions.pi1 >= 0.0);
        }
        const auto u = m.uncoupled();
        const auto pure = excited_levels(u, kGrid, lowest_band(u));
        REQUIRE_FALSE(pure.levels.empty());
        for (const auto& l : pure.levels) {
            const auto& f = l.fractions;
            CHECK(std::max({f.sigma3, f.pi3, f.pi1}) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("window above the upper limit is rejected")
    {
        const auto m = ExcitedModel::builtin();
        CHECK_THROWS_AS(excited_levels(m, kGrid, {cm1_to_hartree(10000.0), cm1_to_hartree(40000.0)}),
                        std::invalid_argument);
    }

    TEST_CASE("transition dipoles")
    {
        const auto& c = builtin_model_curves();
        const auto m = ExcitedModel::builtin();
        const auto ground =
            solve_dvr(single_curve_problem(c.x1sigma, m.mass, 0), kGrid, {-1.0, 0.0}).states.at(0);
        const auto u = m.uncoupled();
        const auto pure = excited_levels(u, kGrid, {cm1_to_hartree(7900.0), cm1_to_hartree(11200.0)});
        const auto d = ChannelDipoles::singlet(c.dipole_x_pi1);
        int zeros = 0, nonzero = 0;
        for (const auto& l : pure.levels) {
            const double t = transition_dipole(ground, l.state, d);
            if (l.fractions.pi1 < 1e-20) {
                CHECK(t < 1e-12);
                ++zeros;
            } else if (t > 0.0) {
                ++nonzero;
            }
        }
        CHECK(zeros > 0);
        CHECK(nonzero > 0);

        // doubling the dipole doubles |TDM|
        const auto mixed = excited_levels(m, kGrid, lowest_band(m));
        REQUIRE_FALSE(mixed.levels.empty());
        std::vector<CurvePoint> pts = c.dipole_x_pi1.points();
        for (auto& p : pts) p.value *= 2.0;
        RFunction twice("twice", pts, c.dipole_x_pi1.splice_radius(), 2.0 * c.dipole_x_pi1.asymptote());
        const auto& s = mixed.levels[0].state;
        CHECK(transition_dipole(ground, s, ChannelDipoles::singlet(twice)) ==
              doctest::Approx(2.0 * transition_dipole(ground, s, d)).epsilon(1e-12));

        CHECK(transition_dipole(ground, s, ChannelDipoles{}) == 0.0);
        CHECK_THROWS(transition_dipole(s, s, d));

        const auto rows = spectrum_report(mixed, d, ground);
        REQUIRE(rows.size() == mixed.levels.size());
        CHECK(rows[0].energy == s.energy);
    }
}
