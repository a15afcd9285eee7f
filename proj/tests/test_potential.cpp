#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ccmol/potential.hpp"
#include "ccmol/spline.hpp"

using namespace ccmol;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "ccmol_unit";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_SUITE("potential_curves")
{
    TEST_CASE("clamped spline reproduces a cubic")
    {
        auto f = [](double x) { return 0.5 * x * x * x - x * x + 3.0; };
        auto df = [](double x) { return 1.5 * x * x - 2.0 * x; };
        std::vector<double> x, y;
        for (double t = 0.0; t <= 4.0 + 1e-12; t += 0.37) {
            x.push_back(t);
            y.push_back(f(t));
        }
        CubicSpline s(x, y, df(x.front()), df(x.back()));
        for (double t = 0.05; t < x.back(); t += 0.113) {
            CHECK(s(t) == doctest::Approx(f(t)).epsilon(1e-12));
            CHECK(s.derivative(t) == doctest::Approx(df(t)).epsilon(1e-10));
        }
    }

    TEST_CASE("natural spline interpolates the knots")
    {
        std::vector<double> x{0, 1, 2.5, 3, 5}, y{1, -1, 2, 0.5, 4};
        CubicSpline s(x, y);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(s(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));
        CHECK_THROWS(CubicSpline({0, 1, 1, 2}, {0, 0, 0, 0}));
    }

    TEST_CASE("spliced curve is continuous with a C1 junction")
    {
        const auto& m = builtin_model_curves();
        for (const PotentialCurve* c : {&m.x1sigma, &m.a3sigma, &m.pi1, &m.pi3, &m.sigma3}) {
            const double rs = c->splice_radius();
            CHECK((*c)(rs - 1e-9) == doctest::Approx((*c)(rs + 1e-9)).epsilon(1e-8));
            CHECK(splice_derivative_jump(*c) < 1e-3);
            CHECK((*c)(1e4) == doctest::Approx(c->asymptote()).epsilon(1e-12));
            // the wall keeps rising inside the table
            CHECK((*c)(c->points().front().r - 0.5) > (*c)(c->points().front().r));
        }
    }

    TEST_CASE("long-range tail matches the dispersion series")
    {
        PotentialCurve c("toy", {{3.5, 0.3}, {4, 0.1}, {5, -0.01}, {6, -0.02}, {8, -0.005}, {10, -0.001}}, 12.0, 0.0, 4000.0,
                         5e5);
        const double r = 25.0;
        CHECK(c(r) == doctest::Approx(-4000.0 / std::pow(r, 6) - 5e5 / std::pow(r, 8)).epsilon(1e-14));
        CHECK(c.c6() == 4000.0);
        CHECK(c.c8() == 5e5);
        CHECK(c.c10() == 0.0);
    }

    TEST_CASE("constant and zero functions")
    {
        auto z = RFunction::zero();
        CHECK(z.is_zero());
        CHECK(z(3.0) == 0.0);
        CHECK(z(300.0) == 0.0);
        auto k = RFunction::constant("k", 1.25);
        CHECK_FALSE(k.is_zero());
        CHECK(k(0.5) == 1.25);
        CHECK(k(50.0) == 1.25);
    }

    TEST_CASE("curve files round trip")
    {
        const auto& m = builtin_model_curves();
        const auto p = scratch("x.txt");
        write_curve(m.x1sigma, p);
        const auto back = load_curve(p);
        CHECK(back.label() == m.x1sigma.label());
        CHECK(back.points().size() == m.x1sigma.points().size());
        for (double r : {4.5, 7.8, 15.0, 29.9, 30.0, 45.0}) CHECK(back(r) == m.x1sigma(r));

        const auto q = scratch("xi.txt");
        write_function(m.xi_pi1_pi3, q);
        const auto f = load_function(q);
        for (double r : {4.5, 7.8, 15.0, 60.0}) CHECK(f(r) == m.xi_pi1_pi3(r));
    }

    TEST_CASE("malformed curve files report the line")
    {
        const std::string header = "# label = t\n# kind = potential\n# asymptote_cm-1 = 0\n# C6_au = 100\n"
                                   "# splice_R_a0 = 10\n# inner = wall\n";
        const auto p = scratch("bad.txt");

        write_text(p, header + "4 0.1\n5 -0.01\nfive -0.02\n7 -0.01\n");
        try {
            load_curve(p);
            FAIL("expected CurveFormatError");
        } catch (const CurveFormatError& e) {
            CHECK(e.line() == 9);
            CHECK(std::string(e.what()).find(":9:") != std::string::npos);
        }

        write_text(p, header + "4 0.1\n5 -0.01\n4.5 -0.02\n7 -0.01\n");
        try {
            load_curve(p);
            FAIL("expected CurveFormatError");
        } catch (const CurveFormatError& e) {
            CHECK(e.line() == 9);
        }

        write_text(p, "# colour = red\n" + header + "4 0.1\n5 -0.01\n6 -0.02\n7 -0.01\n");
        try {
            load_curve(p);
            FAIL("expected CurveFormatError");
        } catch (const CurveFormatError& e) {
            CHECK(e.line() == 1);
        }

        write_text(p, header + "4 0.1\n5 -0.01\n");
        CHECK_THROWS_AS(load_curve(p), CurveFormatError);
        CHECK_THROWS_AS(load_function(p), CurveFormatError);  // wrong kind
        CHECK_THROWS_AS(load_curve(scratch("missing.txt")), CurveFormatError);
    }
}
