#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ccmol/angular.hpp"
#include "ccmol/units.hpp"

using namespace ccmol;

TEST_SUITE("domain_core")
{
    TEST_CASE("hartree in wavenumbers")
    {
        CHECK(PhysicalConstants::hartree_in_cm1 == doctest::Approx(219474.6313632).epsilon(1e-12));
        CHECK(cm1_to_hartree(hartree_to_cm1(0.0123)) == doctest::Approx(0.0123).epsilon(1e-15));
        CHECK(convert(1.0, "hartree", "cm-1") == doctest::Approx(PhysicalConstants::hartree_in_cm1).epsilon(1e-15));
    }

    TEST_CASE("unit conversions round trip and reject mixed dimensions")
    {
        for (const char* u : {"hartree", "cm-1", "GHz", "MHz", "K"}) {
            const double x = convert(3.7, u, "hartree");
            CHECK(convert(x, "hartree", u) == doctest::Approx(3.7).epsilon(1e-14));
        }
        CHECK(convert(1.0, "nm", "a0") == doctest::Approx(1.0 / PhysicalConstants::bohr_in_nm).epsilon(1e-14));
        CHECK_THROWS_AS(convert(1.0, "GHz", "nm"), UnitError);
        CHECK_THROWS_AS(parse_unit("furlong"), UnitError);
        CHECK(wavelength_nm_to_cm1(1064.0) == doctest::Approx(9398.4962406).epsilon(1e-10));
    }

    TEST_CASE("KRb reduced mass")
    {
        const auto table = load_species_file(default_species_file());
        const auto k = find_species(table, "K40"), rb = find_species(table, "Rb87");
        CHECK(reduced_mass(k, rb) == doctest::Approx(27.37567046888827).epsilon(1e-14));
        CHECK(reduced_mass(2.0, 2.0) == 1.0);
        CHECK(k.two_nuclear_spin == 8);
        CHECK(rb.two_nuclear_spin == 3);
        CHECK(k.g_i < 0.0);
        CHECK(std::abs(k.g_i / rb.g_i) == doctest::Approx(0.1769).epsilon(1e-3));
        CHECK_THROWS(find_species(table, "Cs133"));
    }

    TEST_CASE("species validation")
    {
        AtomSpecies s;
        s.name = "X";
        s.mass_u = 10.0;
        s.two_nuclear_spin = 3;
        CHECK_NOTHROW(s.validate());
        s.mass_u = -1.0;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
        CHECK_THROWS_AS(FieldConfig(-1.0), std::invalid_argument);
    }

    TEST_CASE("species file errors name the field")
    {
        const auto path = std::filesystem::temp_directory_path() / "ccmol_bad_species.json";
        {
            std::ofstream out(path);
            out << R"({"species": [{"name": "K40", "mass": {"value": 39.96, "unit": "furlong"}, "nuclear_spin": 4,
                    "a_hf": {"value": 1, "unit": "MHz"}, "g_i": 0.1}]})";
        }
        try {
            load_species_file(path);
            FAIL("expected an error");
        } catch (const std::exception& e) {
            CHECK(std::string(e.what()).find("mass") != std::string::npos);
        }
        std::filesystem::remove(path);
    }

    TEST_CASE("half-integers")
    {
        CHECK(HalfInt::from_double(-3.5).twice == -7);
        CHECK(to_string(HalfInt::from_twice(-7)) == "-7/2");
        CHECK(to_string(HalfInt::from_twice(4)) == "2");
        CHECK_THROWS_AS(HalfInt::from_double(0.25), std::invalid_argument);
        CHECK((HalfInt::from_twice(3) + HalfInt::from_twice(1)).twice == 4);
    }

    TEST_CASE("Clebsch-Gordan orthogonality")
    {
        // sum_{m1,m2} <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M'> = delta_JJ' delta_MM'
        for (int tj1 : {1, 2, 3, 8})
            for (int tj2 : {1, 2, 3}) {
                double worst = 0.0;
                for (int tj = std::abs(tj1 - tj2); tj <= tj1 + tj2; tj += 2)
                    for (int tjp = std::abs(tj1 - tj2); tjp <= tj1 + tj2; tjp += 2)
                        for (int tm = -tj; tm <= tj; tm += 2) {
                            double sum = 0.0;
                            for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
                                const int tm2 = tm - tm1;
                                if (std::abs(tm2) > tj2) continue;
                                auto h = HalfInt::from_twice;
                                sum += clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tj), h(tm)) *
                                       clebsch_gordan(h(tj1), h(tm1), h(tj2), h(tm2), h(tjp), h(tm));
                            }
                            worst = std::max(worst, std::abs(sum - (tj == tjp ? 1.0 : 0.0)));
                        }
                CHECK(worst < 1e-13);
            }
    }

    TEST_CASE("Clebsch-Gordan values and selection rules")
    {
        CHECK(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0.0, 0.0) == doctest::Approx(std::sqrt(0.5)));
        CHECK(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0.0, 0.0) == doctest::Approx(-std::sqrt(0.5)));
        CHECK(clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1.0, 1.0) == doctest::Approx(1.0));
        CHECK(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 1.0, 0.0) == 0.0);
        CHECK(clebsch_gordan(1.0, 1.0, 1.0, 0.0, 1.0, 0.0) == 0.0);  // M != m1 + m2
        CHECK(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 3.0, 0.0) == 0.0);  // triangle
    }

    TEST_CASE("3j symbols")
    {
        auto h = HalfInt::from_twice;
        // (1 1 0; 1 -1 0) = 1/sqrt(3)
        CHECK(wigner_3j(h(2), h(2), h(0), h(2), h(-2), h(0)) == doctest::Approx(1.0 / std::sqrt(3.0)));
        // column-exchange symmetry: odd sum picks up (-1)^(j1+j2+j3)
        const double a = wigner_3j(h(4), h(2), h(2), h(2), h(-2), h(0));
        const double b = wigner_3j(h(2), h(4), h(2), h(-2), h(2), h(0));
        CHECK(a == doctest::Approx(std::pow(-1.0, 4) * b));
        CHECK(orbital_c_diagonal(0, 0, 2) == 0.0);
        // <l m|C^2_0|l m> = (l(l+1) - 3m^2) / ((2l-1)(2l+3))
        for (int l : {1, 2, 3, 5})
            for (int m = -l; m <= l; ++m)
                CHECK(orbital_c_diagonal(l, m, 2) ==
                      doctest::Approx((l * (l + 1) - 3.0 * m * m) / ((2 * l - 1) * (2 * l + 3))).epsilon(1e-14));
    }
}
