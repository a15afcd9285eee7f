#include "ccmol/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ccmol/units.hpp"

namespace ccmol {

CurveFormatError::CurveFormatError(const std::string& file, int line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what)
    , line_(line)
{
}

SplicedTable::SplicedTable(std::string label, std::vector<CurvePoint> points, double splice_r, double asymptote,
                           std::map<int, double> tail, InnerExtrapolation inner)
    : label_(std::move(label))
    , points_(std::move(points))
    , splice_r_(splice_r)
    , asymptote_(asymptote)
    , tail_(std::move(tail))
    , inner_(inner)
{
    if (points_.size() < 4) throw std::invalid_argument(label_ + ": need at least 4 points");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (!(points_[i].r > points_[i - 1].r))
            throw std::invalid_argument(label_ + ": R must be strictly increasing (point " + std::to_string(i) + ")");
    if (!(points_.front().r > 0.0)) throw std::invalid_argument(label_ + ": R must be positive");
    if (!(splice_r_ > points_[1].r)) throw std::invalid_argument(label_ + ": splice radius must lie beyond the second point");

    const double r0 = points_[0].r, r1 = points_[1].r;
    const double v0 = points_[0].value - asymptote_, v1 = points_[1].value - asymptote_;
    double left_slope = 0.0;
    if (inner_ == InnerExtrapolation::exponential_wall) {
        if (!(v0 > v1 && v1 > 0.0))
            throw std::invalid_argument(label_ +
                                        ": exponential wall needs the two innermost points above the asymptote and decreasing");
        wall_b_ = std::log(v0 / v1) / (r1 - r0);
        wall_a_ = v0 * std::exp(wall_b_ * r0);
        left_slope = -wall_b_ * v0;
    }

    std::vector<double> x, y;
    for (const auto& p : points_) {
        if (p.r >= splice_r_) break;
        x.push_back(p.r);
        y.push_back(p.value);
    }
    x.push_back(splice_r_);
    y.push_back(tail_value(splice_r_));
    double right_slope = 0.0;
    for (auto [n, c] : tail_) right_slope += n * c / std::pow(splice_r_, n + 1);
    spline_ = CubicSpline(std::move(x), std::move(y), left_slope, right_slope);
}

double SplicedTable::tail_value(double r) const
{
    double v = asymptote_;
    for (auto [n, c] : tail_) v -= c / std::pow(r, n);
    return v;
}

double SplicedTable::operator()(double r) const
{
    if (!(r > 0.0)) throw std::domain_error(label_ + ": R must be positive");
    if (r >= splice_r_) return tail_value(r);
    if (r < points_.front().r) {
        if (inner_ == InnerExtrapolation::exponential_wall) return asymptote_ + wall_a_ * std::exp(-wall_b_ * r);
        return points_.front().value;
    }
    return spline_(r);
}

double SplicedTable::derivative(double r) const
{
    if (!(r > 0.0)) throw std::domain_error(label_ + ": R must be positive");
    if (r >= splice_r_) {
        double d = 0.0;
        for (auto [n, c] : tail_) d += n * c / std::pow(r, n + 1);
        return d;
    }
    if (r < points_.front().r) {
        if (inner_ == InnerExtrapolation::exponential_wall) return -wall_b_ * wall_a_ * std::exp(-wall_b_ * r);
        return 0.0;
    }
    return spline_.derivative(r);
}

PotentialCurve::PotentialCurve(std::string label, std::vector<CurvePoint> points, double splice_r, double asymptote,
                               double c6, double c8, double c10)
    : SplicedTable(std::move(label), std::move(points), splice_r, asymptote,
                   [&] {
                       std::map<int, double> t{{6, c6}};
                       if (c8 != 0.0) t[8] = c8;
                       if (c10 != 0.0) t[10] = c10;
                       return t;
                   }(),
                   InnerExtrapolation::exponential_wall)
{
}

double PotentialCurve::coefficient(int n) const
{
    auto it = tail_coefficients().find(n);
    return it == tail_coefficients().end() ? 0.0 : it->second;
}

RFunction::RFunction(std::string label, std::vector<CurvePoint> points, double splice_r, double asymptote,
                     std::map<int, double> tail, InnerExtrapolation inner)
    : SplicedTable(std::move(label), std::move(points), splice_r, asymptote, std::move(tail), inner)
{
}

RFunction RFunction::constant(std::string label, double value)
{
    std::vector<CurvePoint> pts{{1.0, value}, {2.0, value}, {3.0, value}, {4.0, value}};
    RFunction f(std::move(label), std::move(pts), 4.0, value);
    f.zero_ = value == 0.0;
    return f;
}

namespace {

struct ParsedTable {
    std::map<std::string, std::string> header;
    std::map<std::string, int> header_line;
    std::vector<CurvePoint> points;
};

ParsedTable parse_table(const std::filesystem::path& path, const std::vector<std::string>& allowed_keys)
{
    std::ifstream in(path);
    if (!in) throw CurveFormatError(path.string(), 0, "cannot open file");
    ParsedTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;  // free comment
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r#");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (std::find(allowed_keys.begin(), allowed_keys.end(), key) == allowed_keys.end())
                throw CurveFormatError(path.string(), lineno, "unknown header key '" + key + "'");
            t.header[key] = value;
            t.header_line[key] = lineno;
            continue;
        }
        std::istringstream row(line);
        double r, v;
        std::string extra;
        if (!(row >> r >> v) || (row >> extra))
            throw CurveFormatError(path.string(), lineno, "expected two numeric columns 'R_a0 value'");
        if (!t.points.empty() && !(r > t.points.back().r))
            throw CurveFormatError(path.string(), lineno, "R not strictly increasing");
        t.points.push_back({r, v});
    }
    if (t.points.size() < 4) throw CurveFormatError(path.string(), lineno, "need at least 4 data rows");
    return t;
}

double header_number(const ParsedTable& t, const std::filesystem::path& path, const std::string& key)
{
    auto it = t.header.find(key);
    if (it == t.header.end()) throw CurveFormatError(path.string(), 0, "missing header key '" + key + "'");
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw CurveFormatError(path.string(), t.header_line.at(key), "header key '" + key + "' is not a number");
    }
}

std::map<int, double> read_tail(const ParsedTable& t, const std::filesystem::path& path)
{
    std::map<int, double> tail;
    for (const auto& [key, value] : t.header) {
        if (key.size() > 4 && key[0] == 'C' && key.ends_with("_au")) {
            int n = std::stoi(key.substr(1, key.size() - 4));
            tail[n] = header_number(t, path, key);
        }
    }
    return tail;
}

template <class T>
void write_table(const T& f, const std::filesystem::path& path, const std::string& kind, const std::string& asym_line)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    char buf[64];
    out << "# label = " << f.label() << "\n# kind = " << kind << "\n" << asym_line;
    for (auto [n, c] : f.tail_coefficients()) {
        std::snprintf(buf, sizeof buf, "%.17g", c);
        out << "# C" << n << "_au = " << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "%.17g", f.splice_radius());
    out << "# splice_R_a0 = " << buf << "\n";
    out << "# inner = " << (f.inner() == InnerExtrapolation::constant ? "constant" : "wall") << "\n";
    for (const auto& p : f.points()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.r, p.value);
        out << buf;
    }
}

const std::vector<std::string> kCurveKeys{"label", "kind", "asymptote_cm-1", "asymptote_au", "C3_au", "C4_au", "C5_au",
                                          "C6_au", "C8_au", "C10_au", "splice_R_a0", "inner"};

}  // namespace

PotentialCurve load_curve(const std::filesystem::path& path)
{
    auto t = parse_table(path, kCurveKeys);
    if (t.header.count("kind") && t.header["kind"] != "potential")
        throw CurveFormatError(path.string(), t.header_line["kind"], "expected kind = potential");
    if (!t.header.count("C6_au")) throw CurveFormatError(path.string(), 0, "missing tail coefficient C6_au");
    auto tail = read_tail(t, path);
    for (const auto& [n, c] : tail)
        if (n != 6 && n != 8 && n != 10)
            throw CurveFormatError(path.string(), t.header_line["C" + std::to_string(n) + "_au"],
                                   "potential tails support C6, C8 and C10 only");
    const double asym = t.header.count("asymptote_cm-1") ? cm1_to_hartree(header_number(t, path, "asymptote_cm-1"))
                                                         : header_number(t, path, "asymptote_au");
    const double splice = header_number(t, path, "splice_R_a0");
    std::string label = t.header.count("label") ? t.header["label"] : path.stem().string();
    try {
        return PotentialCurve(label, std::move(t.points), splice, asym, tail[6], tail.count(8) ? tail[8] : 0.0,
                              tail.count(10) ? tail[10] : 0.0);
    } catch (const std::invalid_argument& e) {
        throw CurveFormatError(path.string(), 0, e.what());
    }
}

RFunction load_function(const std::filesystem::path& path)
{
    auto t = parse_table(path, kCurveKeys);
    if (t.header.count("kind") && t.header["kind"] != "function")
        throw CurveFormatError(path.string(), t.header_line["kind"], "expected kind = function");
    const double asym = header_number(t, path, "asymptote_au");
    const double splice = header_number(t, path, "splice_R_a0");
    auto inner = InnerExtrapolation::constant;
    if (t.header.count("inner") && t.header["inner"] == "wall") inner = InnerExtrapolation::exponential_wall;
    std::string label = t.header.count("label") ? t.header["label"] : path.stem().string();
    try {
        return RFunction(label, std::move(t.points), splice, asym, read_tail(t, path), inner);
    } catch (const std::invalid_argument& e) {
        throw CurveFormatError(path.string(), 0, e.what());
    }
}

void write_curve(const PotentialCurve& curve, const std::filesystem::path& path)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", hartree_to_cm1(curve.asymptote()));
    write_table(curve, path, "potential", std::string("# asymptote_cm-1 = ") + buf + "\n");
}

void write_function(const RFunction& f, const std::filesystem::path& path)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", f.asymptote());
    write_table(f, path, "function", std::string("# asymptote_au = ") + buf + "\n");
}

double splice_derivative_jump(const SplicedTable& curve, double step)
{
    double worst = 0.0;
    for (double r : {curve.points().front().r, curve.splice_radius()}) {
        // second-order one-sided differences from each side of the junction
        const double f0 = curve(r);
        const double left = (3.0 * f0 - 4.0 * curve(r - step) + curve(r - 2 * step)) / (2.0 * step);
        const double right = (-3.0 * f0 + 4.0 * curve(r + step) - curve(r + 2 * step)) / (2.0 * step);
        const double scale = std::max({std::abs(0.5 * (left + right)), std::abs(f0 - curve.asymptote()) / r, 1e-6 * std::abs(f0) / r, 1e-300});
        worst = std::max(worst, std::abs(right - left) / scale);
    }
    return worst;
}

double MorseLongRange::morse(double r) const
{
    const double e = std::exp(-beta * (r - r_eq));
    return asymptote + depth * ((1.0 - e) * (1.0 - e) - 1.0);
}

double MorseLongRange::long_range(double r) const
{
    return asymptote - c6 / std::pow(r, 6) - c8 / std::pow(r, 8);
}

double MorseLongRange::operator()(double r) const
{
    const double s = 0.5 * (1.0 + std::tanh((r - switch_r) / switch_width));
    return (1.0 - s) * morse(r) + s * long_range(r);
}

PotentialCurve MorseLongRange::tabulate(std::string label, double r_lo, double r_hi, double step, double splice_r) const
{
    std::vector<CurvePoint> pts;
    const int n = static_cast<int>(std::lround((r_hi - r_lo) / step));
    for (int i = 0; i <= n; ++i) {
        const double r = r_lo + i * step;
        pts.push_back({r, (*this)(r)});
    }
    return PotentialCurve(std::move(label), std::move(pts), splice_r, asymptote, c6, c8);
}

double ExponentialCoupling::operator()(double r) const
{
    return asymptote * (1.0 + amplitude * std::exp(-beta * (r - r0)));
}

RFunction ExponentialCoupling::tabulate(std::string label, double r_lo, double r_hi, double step, double splice_r) const
{
    std::vector<CurvePoint> pts;
    const int n = static_cast<int>(std::lround((r_hi - r_lo) / step));
    for (int i = 0; i <= n; ++i) {
        const double r = r_lo + i * step;
        pts.push_back({r, (*this)(r)});
    }
    return RFunction(std::move(label), std::move(pts), splice_r, asymptote);
}

namespace {

double beta_from_omega(double omega_cm1, double depth_cm1, double mass_au)
{
    return cm1_to_hartree(omega_cm1) / std::sqrt(2.0 * cm1_to_hartree(depth_cm1) / mass_au);
}

ModelCurves make_model_curves()
{
    // 40K87Rb reduced mass, used only to turn harmonic frequencies into Morse exponents.
    const double mass = reduced_mass(39.963998166, 86.909180531) * PhysicalConstants::amu_in_me;
    const double c6_ground = 4274.0, c8_ground = 4.9e5;
    const double c6_excited = 1.2e4, c8_excited = 1.0e6;
    // Rb 5p fine structure and its centre of gravity above the ground asymptote.
    const double d1 = 12578.950, d2 = 12816.549;
    const double delta = d2 - d1;
    const double centroid = (2.0 * d1 + 4.0 * d2) / 6.0;

    auto morse_lr = [&](double depth_cm1, double r_eq, double omega_cm1, double asym_cm1, double c6, double c8,
                        double switch_r) {
        return MorseLongRange{cm1_to_hartree(depth_cm1), r_eq, beta_from_omega(omega_cm1, depth_cm1, mass),
                              cm1_to_hartree(asym_cm1), c6, c8, switch_r, 1.5};
    };

    ModelCurves m;
    m.fine_structure = cm1_to_hartree(delta);
    m.parameters["X1Sigma+"] = morse_lr(4217.0, 7.69, 75.8, 0.0, c6_ground, c8_ground, 18.0);
    m.parameters["a3Sigma+"] = morse_lr(252.0, 11.0, 19.0, 0.0, c6_ground, c8_ground, 20.0);
    m.parameters["2_3Sigma+"] = morse_lr(centroid - 9170.0, 8.3, 62.0, centroid, c6_excited, c8_excited, 18.0);
    m.parameters["1_3Pi"] = morse_lr(centroid - 8200.0, 7.45, 72.0, centroid, c6_excited, c8_excited, 18.0);
    m.parameters["1_1Pi"] = morse_lr(centroid - 10860.0, 8.6, 38.0, centroid, c6_excited, c8_excited, 18.0);

    const double r_lo = 4.0, r_hi = 30.0, step = 0.02, splice = 30.0;
    m.x1sigma = m.parameters["X1Sigma+"].tabulate("X1Sigma+", r_lo, r_hi, step, splice);
    m.a3sigma = m.parameters["a3Sigma+"].tabulate("a3Sigma+", r_lo, r_hi, step, splice);
    m.sigma3 = m.parameters["2_3Sigma+"].tabulate("2_3Sigma+", r_lo, r_hi, step, splice);
    m.pi3 = m.parameters["1_3Pi"].tabulate("1_3Pi", r_lo, r_hi, step, splice);
    m.pi1 = m.parameters["1_1Pi"].tabulate("1_1Pi", r_lo, r_hi, step, splice);

    // Off-diagonal spin-orbit couplings tend to |Delta/3|; one negative sign
    // places the single Omega=1 asymptote of Rb(5p1/2) a full Delta below the
    // two of Rb(5p3/2).
    const double so = m.fine_structure / 3.0;
    m.xi_sigma_pi3 = ExponentialCoupling{so, -0.20, 0.5, 8.0}.tabulate("xi_2_3Sigma+_1_3Pi", r_lo, 40.0, step, 40.0);
    m.xi_sigma_pi1 = ExponentialCoupling{so, -0.10, 0.5, 8.0}.tabulate("xi_2_3Sigma+_1_1Pi", r_lo, 40.0, step, 40.0);
    m.xi_pi1_pi3 = ExponentialCoupling{-so, -0.10, 0.5, 8.0}.tabulate("xi_1_1Pi_1_3Pi", r_lo, 40.0, step, 40.0);

    std::vector<CurvePoint> dip, perm;
    for (int i = 0; i <= 1800; ++i) {
        const double r = r_lo + i * step;
        dip.push_back({r, 2.9 * (1.0 + 0.25 * std::exp(-0.5 * (r - 8.5) * (r - 8.5)))});
        perm.push_back({r, 0.25 * std::exp(-0.125 * (r - 7.7) * (r - 7.7))});
    }
    m.dipole_x_pi1 = RFunction("d_X1Sigma+_1_1Pi", std::move(dip), 40.0, 2.9);
    m.dipole_x_x = RFunction("d_X1Sigma+_permanent", std::move(perm), 40.0, 0.0);
    m.dipole_a_sigma3 = RFunction::constant("d_a3Sigma+_2_3Sigma+", 2.9);
    m.dipole_a_pi3 = RFunction::constant("d_a3Sigma+_1_3Pi", 2.9);
    return m;
}

}  // namespace

const ModelCurves& builtin_model_curves()
{
    static const ModelCurves curves = make_model_curves();
    return curves;
}

}  // namespace ccmol
