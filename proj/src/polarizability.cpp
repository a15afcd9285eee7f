#include "ccmol/polarizability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "ccmol/angular.hpp"
#include "ccmol/excited.hpp"
#include "ccmol/io.hpp"
#include "ccmol/units.hpp"

namespace ccmol {

OmegaLabel parse_omega(const std::string& text)
{
    if (text == "0+") return {0, 1};
    if (text == "0-") return {0, -1};
    int value = -1;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value < 1)
        throw std::invalid_argument("bad Omega label '" + text + "' (expected 0+, 0- or a positive integer)");
    return {value, 0};
}

std::string to_string(OmegaLabel o)
{
    if (o.omega == 0) return o.reflection < 0 ? "0-" : "0+";
    return std::to_string(o.omega);
}

bool dipole_allowed(OmegaLabel from, OmegaLabel to)
{
    if (std::abs(from.omega - to.omega) > 1) return false;
    if (from.omega == 0 && to.omega == 0 && from.reflection != to.reflection) return false;
    return true;
}

double rotational_factor(int j, int omega, int j_prime, int omega_prime)
{
    if (j < omega || j_prime < omega_prime) return 0.0;
    const auto h = [](int x) { return HalfInt::from_twice(2 * x); };
    const double w = wigner_3j(h(j), h(1), h(j_prime), h(-omega), h(omega - omega_prime), h(omega_prime));
    return (2.0 * j_prime + 1.0) * w * w / 3.0;
}

void ExcitedLevelCatalog::validate() const
{
    std::map<std::pair<std::string, int>, double> last;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        const std::string where = "catalog entry " + std::to_string(k) + " (" + e.manifold + " v=" +
                                  std::to_string(e.v) + " J=" + std::to_string(e.J) + ")";
        if (!std::isfinite(e.energy)) throw CatalogError(where + ": energy is not finite");
        if (!(e.gamma >= 0.0)) throw CatalogError(where + ": width must be >= 0");
        if (!(e.line_strength >= 0.0)) throw CatalogError(where + ": line strength must be >= 0");
        auto key = std::make_pair(e.manifold, e.J);
        auto it = last.find(key);
        if (it != last.end() && !(e.energy > it->second))
            throw CatalogError(where + ": energies must increase strictly within a (manifold, J) series");
        last[key] = e.energy;
    }
}

std::string ExcitedLevelCatalog::hash() const
{
    std::string s = level.manifold + "," + std::to_string(level.v) + "," + std::to_string(level.J) + "," +
                    format_double(level.energy) + "\n";
    for (const auto& e : entries) {
        s += e.manifold + "," + std::to_string(e.v) + "," + std::to_string(e.J) + "," + format_double(e.energy) + "," +
             format_double(e.gamma) + "," + format_double(e.line_strength) + "," +
             std::to_string(static_cast<int>(e.source)) + "\n";
    }
    return sha256_hex(s);
}

ExcitedLevelCatalog merge(const ExcitedLevelCatalog& a, const ExcitedLevelCatalog& b)
{
    if (!(a.level == b.level)) throw CatalogError("cannot merge catalogs of different levels");
    ExcitedLevelCatalog out = a;
    out.entries.insert(out.entries.end(), b.entries.begin(), b.entries.end());
    return out;
}

std::vector<std::string> manifold_names(const ExcitedLevelCatalog& catalog)
{
    std::vector<std::string> names;
    for (const auto& e : catalog.entries)
        if (std::find(names.begin(), names.end(), e.manifold) == names.end()) names.push_back(e.manifold);
    return names;
}

std::string catalog_csv(const ExcitedLevelCatalog& catalog, const std::string& extra_header)
{
    const auto names = manifold_names(catalog);
    std::ostringstream out;
    out << extra_header;
    out << "# level = " << catalog.level.manifold << "," << catalog.level.v << "," << catalog.level.J << "\n";
    out << "# ground_E_cm1 = " << format_double(hartree_to_cm1(catalog.level.energy)) << "\n";
    for (std::size_t i = 0; i < names.size(); ++i) out << "# manifold " << i << " = " << names[i] << "\n";
    out << "# source 0 = bound, 1 = box continuum\n";
    out << "manifold,v,J,E_cm1,gamma_MHz,line_strength_au,source\n";
    for (const auto& e : catalog.entries) {
        const auto id = std::find(names.begin(), names.end(), e.manifold) - names.begin();
        out << id << "," << e.v << "," << e.J << "," << format_double(hartree_to_cm1(e.energy)) << ","
            << format_double(hartree_to_mhz(e.gamma)) << "," << format_double(e.line_strength) << ","
            << static_cast<int>(e.source) << "\n";
    }
    return out.str();
}

void write_catalog(const ExcitedLevelCatalog& catalog, const std::filesystem::path& path,
                   const std::string& extra_header)
{
    atomic_write(path, catalog_csv(catalog, extra_header));
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

template <typename T>
bool parse_number(const std::string& s, T& out)
{
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

ExcitedLevelCatalog read_catalog(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot read catalog " + path.string());
    ExcitedLevelCatalog cat;
    std::map<int, std::string> ids;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& what) {
        throw CatalogError(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
            if (key == "ground_E_cm1") {
                double e;
                if (!parse_number(value, e)) fail("bad ground_E_cm1");
                cat.level.energy = cm1_to_hartree(e);
            } else if (key == "level") {
                const auto p = split(value, ',');
                if (p.size() != 3 || !parse_number(p[1], cat.level.v) || !parse_number(p[2], cat.level.J))
                    fail("level header must read 'manifold,v,J'");
                cat.level.manifold = p[0];
            } else if (key.rfind("manifold ", 0) == 0) {
                int id;
                if (!parse_number(trim(key.substr(9)), id)) fail("bad manifold id in header");
                ids[id] = value;
            }
            continue;
        }
        const auto f = split(line, ',');
        if (!header_seen && f.size() >= 1 && f[0] == "manifold") {
            header_seen = true;
            continue;
        }
        if (f.size() != 6 && f.size() != 7) fail("expected 6 or 7 columns, found " + std::to_string(f.size()));
        CatalogEntry e;
        int id;
        if (parse_number(f[0], id)) {
            auto it = ids.find(id);
            e.manifold = it != ids.end() ? it->second : f[0];
        } else {
            e.manifold = f[0];
        }
        double e_cm1, g_mhz;
        if (!parse_number(f[1], e.v)) fail("bad v '" + f[1] + "'");
        if (!parse_number(f[2], e.J)) fail("bad J '" + f[2] + "'");
        if (!parse_number(f[3], e_cm1)) fail("bad E_cm1 '" + f[3] + "'");
        if (!parse_number(f[4], g_mhz)) fail("bad gamma_MHz '" + f[4] + "'");
        if (!parse_number(f[5], e.line_strength)) fail("bad line_strength_au '" + f[5] + "'");
        if (f.size() == 7) {
            int src;
            if (!parse_number(f[6], src) || (src != 0 && src != 1)) fail("source must be 0 or 1");
            e.source = static_cast<CatalogSource>(src);
        }
        e.energy = cm1_to_hartree(e_cm1);
        e.gamma = mhz_to_hartree(g_mhz);
        cat.entries.push_back(e);
    }
    try {
        cat.validate();
    } catch (const CatalogError& err) {
        throw CatalogError(path.string() + ": " + err.what());
    }
    return cat;
}

ExcitedLevelCatalog build_catalog(const GroundLevel& ground, const std::vector<CatalogManifold>& manifolds)
{
    if (ground.state.channels() != 1) throw CatalogError("the ground level must be a single-channel state");
    ExcitedLevelCatalog cat;
    cat.level = ground.id;
    const int J = ground.id.J;
    for (const auto& m : manifolds) {
        if (!dipole_allowed(ground.omega, m.omega)) continue;
        if (!m.dipole) throw CatalogError("manifold " + m.name + " has no transition dipole function");
        if (!m.problem) throw CatalogError("manifold " + m.name + " has no radial problem");
        for (int jp = std::max(0, J - 1); jp <= J + 1; ++jp) {
            const double rot = rotational_factor(J, ground.omega.omega, jp, m.omega.omega);
            if (rot == 0.0) continue;
            const SolveResult res = solve(m.problem(jp), m.grid, m.window, m.settings);
            if (res.empty()) continue;
            const BoundState g = ground.state.grid == res.grid ? ground.state : resample(ground.state, res.grid, false);
            for (std::size_t k = 0; k < res.states.size(); ++k) {
                const auto& s = res.states[k];
                const double d = matrix_element(g, *m.dipole, s);
                CatalogEntry e;
                e.manifold = m.name;
                e.v = static_cast<int>(k);
                e.J = jp;
                e.energy = s.energy;
                e.gamma = m.gamma;
                e.line_strength = rot * d * d;
                e.source = s.energy >= m.threshold ? CatalogSource::continuum : CatalogSource::bound;
                cat.entries.push_back(e);
            }
        }
    }
    cat.validate();
    return cat;
}

PolarizabilityValue dynamic_polarizability(const ExcitedLevelCatalog& catalog, double omega)
{
    PolarizabilityValue out;
    std::complex<double> sum = 0.0;
    for (const auto& e : catalog.entries) {
        const std::complex<double> shifted(e.energy - catalog.level.energy, -0.5 * e.gamma);
        const std::complex<double> lower = shifted - omega, upper = shifted + omega;
        if (lower == 0.0 || upper == 0.0) {
            out.pole = true;
            if (lower != 0.0) sum += e.line_strength / lower;
            if (upper != 0.0) sum += e.line_strength / upper;
            continue;
        }
        sum += e.line_strength / lower + e.line_strength / upper;
    }
    out.alpha = sum;
    return out;
}

PolarizabilitySpectrum scan(const ExcitedLevelCatalog& catalog, double omega_min_cm1, double omega_max_cm1,
                            double step_cm1, unsigned threads)
{
    if (!(step_cm1 > 0.0)) throw std::invalid_argument("scan step must be positive");
    if (!(omega_max_cm1 >= omega_min_cm1)) throw std::invalid_argument("scan range is empty (omega_max < omega_min)");
    if (!(omega_min_cm1 >= 0.0)) throw std::invalid_argument("scan frequencies must be >= 0");
    const auto n = static_cast<std::size_t>(std::floor((omega_max_cm1 - omega_min_cm1) / step_cm1 + 1e-9)) + 1;

    PolarizabilitySpectrum sp;
    sp.step_cm1 = step_cm1;
    sp.level = catalog.level;
    sp.catalog_hash = catalog.hash();
    sp.omega_cm1.resize(n);
    sp.alpha.resize(n);
    sp.pole.resize(n);
    for (std::size_t i = 0; i < n; ++i) sp.omega_cm1[i] = omega_min_cm1 + static_cast<double>(i) * step_cm1;

    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto v = dynamic_polarizability(catalog, cm1_to_hartree(sp.omega_cm1[i]));
            sp.alpha[i] = v.alpha;
            sp.pole[i] = v.pole;
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t block = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = t * block, hi = std::min(n, lo + block);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return sp;
}

std::vector<ResonanceFlag> flag_resonances(const PolarizabilitySpectrum& sp, double threshold)
{
    std::vector<ResonanceFlag> flags;
    const std::size_t n = sp.size();
    if (n == 0) return flags;
    if (threshold <= 0.0) {
        std::vector<double> mags(n);
        for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(sp.alpha[i]);
        std::nth_element(mags.begin(), mags.begin() + n / 2, mags.end());
        threshold = 10.0 * mags[n / 2];
        if (!(threshold > 0.0)) return flags;
    }
    auto strong = [&](std::size_t i) { return sp.pole[i] || std::abs(sp.alpha[i]) >= threshold; };

    std::size_t i = 0;
    while (i < n) {
        if (!strong(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && strong(j + 1)) ++j;
        const double width = static_cast<double>(j - i + 1) * sp.step_cm1;
        for (std::size_t k = i; k <= j; ++k) {
            if (sp.pole[k]) {
                flags.push_back({sp.omega_cm1[k], i, j, width});
                continue;
            }
            if (k == j || sp.pole[k + 1]) continue;
            const double a = sp.alpha[k].real(), b = sp.alpha[k + 1].real();
            if (!((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0))) continue;
            // An unresolved pole has 1/Re alpha linear across the step; a
            // resolved Lorentzian has Re alpha itself linear at its centre.
            const bool resolved = std::max(std::abs(sp.alpha[k].imag()), std::abs(sp.alpha[k + 1].imag())) >
                                  std::max(std::abs(a), std::abs(b));
            const double t = resolved ? a / (a - b) : b / (b - a);
            flags.push_back({sp.omega_cm1[k] + t * sp.step_cm1, i, j, width});
        }
        i = j + 1;
    }
    return flags;
}

std::vector<ResonanceAssignment> assign_resonances(const PolarizabilitySpectrum& sp, const ExcitedLevelCatalog& catalog,
                                                   const std::vector<ResonanceFlag>& flags)
{
    if (!(sp.level == catalog.level)) throw CatalogError("spectrum and catalog belong to different levels");
    std::vector<double> line(catalog.entries.size());
    for (std::size_t k = 0; k < line.size(); ++k)
        line[k] = std::abs(hartree_to_cm1(catalog.entries[k].energy - catalog.level.energy));

    std::vector<ResonanceAssignment> out;
    for (const auto& f : flags) {
        ResonanceAssignment a;
        a.flag = f;
        std::vector<std::pair<double, std::size_t>> near;
        for (std::size_t k = 0; k < line.size(); ++k) {
            const double d = std::abs(line[k] - f.omega_cm1);
            if (d <= sp.step_cm1) near.push_back({d, k});
        }
        std::sort(near.begin(), near.end());
        for (const auto& [d, k] : near) a.entries.push_back(k);
        a.matched = !near.empty() && near.front().first <= 0.5 * sp.step_cm1;
        a.ambiguous = near.size() > 1;
        out.push_back(std::move(a));
    }
    return out;
}

TrapDepth trap_depth(std::complex<double> alpha_au, double intensity_w_cm2)
{
    if (!(intensity_w_cm2 >= 0.0)) throw std::invalid_argument("intensity must be >= 0");
    using C = PhysicalConstants;
    const double a0_cubed = C::bohr_radius * C::bohr_radius * C::bohr_radius;
    const double joule = -alpha_au.real() * 2.0 * std::numbers::pi * a0_cubed * (intensity_w_cm2 * 1e4) / C::speed_of_light;
    return {joule / C::hartree, joule / C::boltzmann * 1e6};
}

const std::vector<WavelengthPreset>& wavelength_presets()
{
    static const std::vector<WavelengthPreset> presets{{"1090nm", 1090.0}, {"1064nm", 1064.0}, {"1030nm", 1030.0}};
    return presets;
}

const WavelengthPreset& find_preset(const std::string& name)
{
    const auto& p = wavelength_presets();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const std::string bare = p[i].name.substr(0, p[i].name.size() - 2);
        if (name == p[i].name || name == bare || name == "lambda" + std::to_string(i + 1)) return p[i];
    }
    throw std::invalid_argument("unknown wavelength preset '" + name + "' (known: 1090nm, 1064nm, 1030nm)");
}

CoupledChannelProblem single_curve_problem(const PotentialCurve& curve, double mass, int J)
{
    if (!(mass > 0.0)) throw std::invalid_argument("reduced mass must be positive");
    if (J < 0) throw std::invalid_argument("J must be >= 0");
    auto shared = std::make_shared<PotentialCurve>(curve);
    CoupledChannelProblem p;
    p.channels = 1;
    p.mass = mass;
    const double rot = J * (J + 1.0) / (2.0 * mass);
    p.potential = [shared, rot](double r) -> Eigen::MatrixXd {
        Eigen::MatrixXd w(1, 1);
        w(0, 0) = (*shared)(r) + rot / (r * r);
        return w;
    };
    return p;
}

namespace {

double grid_minimum(const CoupledChannelProblem& p, const RadialGrid& grid)
{
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.points; ++i) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.potential(grid.r(i)), Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues()(0));
    }
    return lo;
}

}  // namespace

GroundLevel solve_curve_level(const PotentialCurve& curve, const std::string& name, OmegaLabel omega, double mass,
                              int v, int J, const RadialGrid& grid, const SolverSettings& settings)
{
    const auto problem = single_curve_problem(curve, mass, J);
    const double lo = grid_minimum(problem, grid);
    const SolveResult res = solve(problem, grid, {lo - 1e-9, curve.asymptote()}, settings);
    const auto count = static_cast<int>(res.states.size());
    const int index = v >= 0 ? v : count + v;
    if (index < 0 || index >= count)
        throw std::out_of_range(name + " J=" + std::to_string(J) + " has " + std::to_string(count) +
                                " bound levels on this grid; v=" + std::to_string(v) + " does not exist");
    GroundLevel g;
    g.id = {name, v, J, res.states[static_cast<std::size_t>(index)].energy};
    g.omega = omega;
    g.state = res.states[static_cast<std::size_t>(index)];
    return g;
}

BuiltinCatalog builtin_catalog(const std::string& ground_manifold, int v, int J, const BuiltinCatalogOptions& opt)
{
    const ExcitedModel m = ExcitedModel::builtin();
    return model_catalog(builtin_model_curves(), m.mass, ground_manifold, v, J, opt);
}

BuiltinCatalog model_catalog(const ModelCurves& curves, double mass, const std::string& ground_manifold, int v, int J,
                             const BuiltinCatalogOptions& opt)
{
    const ExcitedModel model = ExcitedModel::from_curves(curves, mass);
    const bool singlet = ground_manifold == "X1Sigma+" || ground_manifold == "X";
    if (!singlet && ground_manifold != "a3Sigma+" && ground_manifold != "a")
        throw std::invalid_argument("built-in catalog knows ground manifolds X1Sigma+ and a3Sigma+, not '" +
                                    ground_manifold + "'");

    BuiltinCatalog out;
    const PotentialCurve& gc = singlet ? curves.x1sigma : curves.a3sigma;
    out.ground = solve_curve_level(gc, singlet ? "X1Sigma+" : "a3Sigma+", singlet ? OmegaLabel{0, 1} : OmegaLabel{0, -1},
                                   model.mass, v, J, opt.ground_grid, opt.ground_settings);

    std::vector<CatalogManifold> manifolds;
    const double gamma = mhz_to_hartree(opt.gamma_mhz);
    const double continuum = cm1_to_hartree(opt.continuum_cm1);

    CatalogManifold om;
    om.name = "Omega1";
    om.omega = {1, 0};
    om.problem = [model](int jp) {
        ExcitedModel m = model;
        m.J = jp;
        return excited_problem(m);
    };
    const RFunction d_pi1 = curves.dipole_x_pi1, d_s3 = curves.dipole_a_sigma3, d_p3 = curves.dipole_a_pi3;
    if (singlet) {
        om.dipole = [d_pi1](double r) -> Eigen::MatrixXd {
            Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 3);
            row(0, kPi1) = d_pi1(r);
            return row;
        };
    } else {
        om.dipole = [d_s3, d_p3](double r) -> Eigen::MatrixXd {
            Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 3);
            row(0, kSigma3) = d_s3(r);
            row(0, kPi3) = d_p3(r);
            return row;
        };
    }
    om.grid = opt.excited_grid;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> far(assemble_excited_W(model, 1e4), Eigen::EigenvaluesOnly);
    om.threshold = far.eigenvalues()(0);
    om.window = {cm1_to_hartree(opt.excited_lo_cm1), om.threshold + continuum};
    om.gamma = gamma;
    om.settings = opt.excited_settings;
    manifolds.push_back(om);

    if (singlet) {
        CatalogManifold xm;
        xm.name = "X1Sigma+";
        xm.omega = {0, 1};
        const PotentialCurve x = curves.x1sigma;
        xm.problem = [x, mass](int jp) { return single_curve_problem(x, mass, jp); };
        const RFunction perm = curves.dipole_x_x;
        xm.dipole = [perm](double r) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(1, 1, perm(r)); };
        xm.grid = opt.ground_grid;
        xm.threshold = x.asymptote();
        xm.window = {grid_minimum(single_curve_problem(x, mass, 0), opt.ground_grid) - 1e-9, xm.threshold + continuum};
        xm.gamma = 0.0;
        xm.settings = opt.ground_settings;
        manifolds.push_back(xm);
    }

    out.catalog = build_catalog(out.ground, manifolds);
    return out;
}

}  // namespace ccmol
