#include "ccmol/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ccmol/angular.hpp"
#include "ccmol/io.hpp"
#include "ccmol/spin_basis.hpp"
#include "ccmol/units.hpp"

namespace ccmol {

namespace fs = std::filesystem;
using nlohmann::json;

SolverSettings SolverConfig::settings() const
{
    SolverSettings s;
    s.backend = backend;
    s.refine_tol = refine_tol;
    s.max_points = max_points;
    return s;
}

std::string RunConfig::hash() const { return sha256_hex(resolved.dump()); }

namespace {

std::string type_name(const json& j)
{
    return std::string(j.type_name());
}

// Reads one JSON object, mirroring every value it hands out (or default it
// fills in) into `out`, and rejects keys nobody asked for.
class Section {
public:
    Section(const json* in, json* out, std::string path) : in_(in), out_(out), path_(std::move(path))
    {
        if (in_ && !in_->is_object()) throw ConfigError(where() + ": expected an object, found " + type_name(*in_));
        *out_ = json::object();
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json* raw(const std::string& key)
    {
        seen_.insert(key);
        if (!in_) return nullptr;
        auto it = in_->find(key);
        return it == in_->end() ? nullptr : &*it;
    }

    double number(const std::string& key, double def)
    {
        const json* v = raw(key);
        double x = def;
        if (v) {
            if (!v->is_number()) throw ConfigError(field(key) + ": expected a number, found " + type_name(*v));
            x = v->get<double>();
            if (!std::isfinite(x)) throw ConfigError(field(key) + ": must be finite");
        }
        (*out_)[key] = x;
        return x;
    }

    std::optional<double> optional_number(const std::string& key)
    {
        const json* v = raw(key);
        if (!v || v->is_null()) {
            (*out_)[key] = nullptr;
            return std::nullopt;
        }
        return number(key, 0.0);
    }

    long long integer(const std::string& key, long long def)
    {
        const json* v = raw(key);
        long long x = def;
        if (v) {
            if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer, found " + type_name(*v));
            x = v->get<long long>();
        }
        (*out_)[key] = x;
        return x;
    }

    bool boolean(const std::string& key, bool def)
    {
        const json* v = raw(key);
        bool x = def;
        if (v) {
            if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false, found " + type_name(*v));
            x = v->get<bool>();
        }
        (*out_)[key] = x;
        return x;
    }

    std::string string(const std::string& key, const std::string& def)
    {
        const json* v = raw(key);
        std::string x = def;
        if (v) {
            if (!v->is_string()) throw ConfigError(field(key) + ": expected a string, found " + type_name(*v));
            x = v->get<std::string>();
        }
        (*out_)[key] = x;
        return x;
    }

    std::optional<std::string> optional_string(const std::string& key)
    {
        const json* v = raw(key);
        if (!v || v->is_null()) {
            (*out_)[key] = nullptr;
            return std::nullopt;
        }
        return string(key, "");
    }

    /// A number or a fraction string such as "-7/2".
    double half_integer(const std::string& key, double def)
    {
        const json* v = raw(key);
        double x = def;
        if (v) {
            if (v->is_number()) {
                x = v->get<double>();
            } else if (v->is_string()) {
                const std::string s = v->get<std::string>();
                const auto slash = s.find('/');
                try {
                    std::size_t used = 0;
                    if (slash == std::string::npos) {
                        x = std::stod(s, &used);
                        if (used != s.size()) throw std::invalid_argument(s);
                    } else {
                        const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
                        const double n = std::stod(num, &used);
                        if (used != num.size()) throw std::invalid_argument(s);
                        const double d = std::stod(den, &used);
                        if (used != den.size() || d != 2.0) throw std::invalid_argument(s);
                        x = n / d;
                    }
                } catch (const std::exception&) {
                    throw ConfigError(field(key) + ": cannot read '" + s + "' as an integer or half-integer");
                }
            } else {
                throw ConfigError(field(key) + ": expected a number or a string like \"-7/2\", found " + type_name(*v));
            }
            if (std::abs(2.0 * x - std::round(2.0 * x)) > 1e-12)
                throw ConfigError(field(key) + ": " + std::to_string(x) + " is not a multiple of 1/2");
        }
        (*out_)[key] = x;
        return x;
    }

    std::vector<long long> integer_list(const std::string& key, const std::vector<long long>& def)
    {
        const json* v = raw(key);
        std::vector<long long> x = def;
        if (v) {
            if (!v->is_array()) throw ConfigError(field(key) + ": expected a list of integers");
            x.clear();
            for (const auto& e : *v) {
                if (!e.is_number_integer()) throw ConfigError(field(key) + ": expected a list of integers");
                x.push_back(e.get<long long>());
            }
        }
        (*out_)[key] = x;
        return x;
    }

    std::vector<std::string> string_list(const std::string& key)
    {
        const json* v = raw(key);
        std::vector<std::string> x;
        if (v) {
            if (!v->is_array()) throw ConfigError(field(key) + ": expected a list of strings");
            for (const auto& e : *v) {
                if (!e.is_string()) throw ConfigError(field(key) + ": expected a list of strings");
                x.push_back(e.get<std::string>());
            }
        }
        (*out_)[key] = x;
        return x;
    }

    /// Pair [lo, hi] with lo < hi.
    std::pair<double, double> range(const std::string& key, std::pair<double, double> def)
    {
        const json* v = raw(key);
        auto x = def;
        if (v) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                throw ConfigError(field(key) + ": expected [lo, hi]");
            x = {(*v)[0].get<double>(), (*v)[1].get<double>()};
        }
        if (!(x.first < x.second)) throw ConfigError(field(key) + ": needs lo < hi");
        (*out_)[key] = json::array({x.first, x.second});
        return x;
    }

    Section child(const std::string& key)
    {
        const json* v = raw(key);
        return Section(v, &(*out_)[key], field(key));
    }

    /// Raw object of string values (paths) for keys out of `allowed`.
    std::map<std::string, std::string> string_map(const std::string& key, const std::vector<std::string>& allowed)
    {
        const json* v = raw(key);
        std::map<std::string, std::string> x;
        (*out_)[key] = json::object();
        if (!v) return x;
        if (!v->is_object()) throw ConfigError(field(key) + ": expected an object");
        for (auto it = v->begin(); it != v->end(); ++it) {
            if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
                throw ConfigError(field(key) + "." + it.key() + ": unknown curve key");
            if (!it.value().is_string()) throw ConfigError(field(key) + "." + it.key() + ": expected a file path");
            x[it.key()] = it.value().get<std::string>();
            (*out_)[key][it.key()] = it.value();
        }
        return x;
    }

    void finish() const
    {
        if (!in_) return;
        for (auto it = in_->begin(); it != in_->end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }

private:
    const json* in_;
    json* out_;
    std::string path_;
    std::set<std::string> seen_;
};

fs::path resolve_path(const fs::path& base, const std::string& p)
{
    fs::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path;
}

void require_file(const fs::path& p, const std::string& field)
{
    if (!fs::is_regular_file(p)) throw ConfigError(field + ": file not found: " + p.string());
}

GridConfig read_grid(Section& s, const GridConfig& def)
{
    GridConfig g;
    g.r_min = s.number("r_min", def.r_min);
    g.r_max = s.number("r_max", def.r_max);
    const long long pts = s.integer("points", static_cast<long long>(def.points));
    if (!(g.r_min > 0.0)) throw ConfigError(s.field("r_min") + ": must be > 0");
    if (!(g.r_max > g.r_min)) throw ConfigError(s.field("r_max") + ": must exceed r_min");
    if (pts < 100) throw ConfigError(s.field("points") + ": needs at least 100 points");
    g.points = static_cast<std::size_t>(pts);
    s.finish();
    return g;
}

SolverConfig read_solver(Section s, const SolverConfig& def)
{
    SolverConfig c;
    Section g = s.child("grid");
    c.grid = read_grid(g, def.grid);
    const std::string backend = s.string("backend", backend_name(def.backend));
    try {
        c.backend = parse_backend(backend);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(s.field("backend") + ": " + e.what());
    }
    c.refine_tol = s.number("refine_tol_hartree", def.refine_tol);
    if (c.refine_tol < 0.0) throw ConfigError(s.field("refine_tol_hartree") + ": must be >= 0");
    const long long mp = s.integer("max_points", static_cast<long long>(def.max_points));
    if (mp < static_cast<long long>(c.grid.points)) throw ConfigError(s.field("max_points") + ": below grid.points");
    c.max_points = static_cast<std::size_t>(mp);
    s.finish();
    return c;
}

void check_mf(double mf, const AtomSpecies& a, const AtomSpecies& b, const std::string& field)
{
    const HalfInt ia = HalfInt::from_twice(a.two_nuclear_spin), ib = HalfInt::from_twice(b.two_nuclear_spin);
    const auto allowed = allowed_mf(ia, ib);
    const HalfInt m = HalfInt::from_double(mf);
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
        throw ConfigError(field + ": M_F = " + to_string(m) + " is out of range for i = (" + to_string(ia) + ", " +
                          to_string(ib) + "); allowed " + to_string(allowed.front()) + " ... " +
                          to_string(allowed.back()));
    }
}

}  // namespace

nlohmann::json parse_json_text(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; turn it into line:column.
        const std::size_t at = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        const auto pos = msg.find("syntax error");
        if (pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

RunConfig parse_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const json doc = parse_json_text(ss.str(), path.string());
    return parse_config_json(doc, path.string(), path.parent_path());
}

RunConfig parse_config_json(const nlohmann::json& doc, const std::string& source, const fs::path& base)
{
    RunConfig c;
    c.source = source;
    try {
        Section root(&doc, &c.resolved, "");

        const auto species_file = root.optional_string("species_file");
        c.species_file = species_file ? resolve_path(base, *species_file) : default_species_file();
        if (species_file) require_file(c.species_file, "species_file");
        Section sp = root.child("species");
        c.species_a = sp.string("a", "K40");
        c.species_b = sp.string("b", "Rb87");
        sp.finish();
        std::vector<AtomSpecies> table;
        try {
            table = load_species_file(c.species_file);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("species_file: ") + e.what());
        }
        AtomSpecies a, b;
        try {
            a = find_species(table, c.species_a);
            b = find_species(table, c.species_b);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("species: ") + e.what());
        }

        c.field_gauss = root.number("field_G", 545.9);
        if (c.field_gauss < 0.0) throw ConfigError("field_G: must be >= 0");

        if (const auto dir = root.optional_string("curves_dir")) {
            c.curves_dir = resolve_path(base, *dir);
            if (!fs::is_directory(*c.curves_dir)) throw ConfigError("curves_dir: not a directory: " + c.curves_dir->string());
        }
        std::vector<std::string> keys = kPotentialKeys;
        keys.insert(keys.end(), kFunctionKeys.begin(), kFunctionKeys.end());
        for (const auto& [k, v] : root.string_map("curves", keys)) {
            c.curves[k] = resolve_path(base, v);
            require_file(c.curves[k], "curves." + k);
        }
        c.fine_structure_cm1 = root.optional_number("fine_structure_cm1");
        if (c.fine_structure_cm1 && !(*c.fine_structure_cm1 > 0.0)) throw ConfigError("fine_structure_cm1: must be > 0");

        SolverConfig ground_def;
        c.ground_solver = read_solver(root.child("ground_solver"), ground_def);
        SolverConfig excited_def;
        excited_def.grid = {5.0, 16.0, 601};
        excited_def.backend = Backend::dvr;
        c.excited_solver = read_solver(root.child("excited_solver"), excited_def);

        {
            Section s = root.child("channels");
            c.channels.l = static_cast<int>(s.integer("l", 0));
            if (c.channels.l < 0) throw ConfigError(s.field("l") + ": must be >= 0");
            const json* mf = s.raw("MF");
            if (mf && !mf->is_null()) {
                c.channels.MF = s.half_integer("MF", 0.0);
                check_mf(*c.channels.MF, a, b, s.field("MF"));
            } else {
                c.resolved["channels"]["MF"] = nullptr;
            }
            s.finish();
        }
        {
            Section s = root.child("bound_states");
            auto& t = c.bound_states;
            t.l = static_cast<int>(s.integer("l", 0));
            if (t.l < 0) throw ConfigError(s.field("l") + ": must be >= 0");
            t.MF = s.half_integer("MF", -3.5);
            check_mf(t.MF, a, b, s.field("MF"));
            std::tie(t.window_lo_ghz, t.window_hi_ghz) = s.range("window_GHz", {-10.0, 0.0});
            t.offset_ghz = s.number("offset_GHz", 0.0);
            t.wavefunctions = s.boolean("wavefunctions", false);
            s.finish();
        }
        {
            Section s = root.child("excited");
            auto& t = c.excited;
            t.J = static_cast<int>(s.integer("J", 1));
            if (t.J < 1) throw ConfigError(s.field("J") + ": Omega = 1 levels need J >= 1");
            std::tie(t.window_lo_cm1, t.window_hi_cm1) = s.range("window_cm1", {7900.0, 11200.0});
            t.ground_v = static_cast<int>(s.integer("ground_v", 0));
            t.uncoupled = s.boolean("uncoupled", false);
            s.finish();
        }
        {
            Section s = root.child("tdm");
            auto& t = c.tdm;
            t.ground_v.clear();
            for (long long v : s.integer_list("ground_v", {0})) t.ground_v.push_back(static_cast<int>(v));
            if (t.ground_v.empty()) throw ConfigError(s.field("ground_v") + ": needs at least one level");
            t.ground_J = static_cast<int>(s.integer("ground_J", 0));
            if (t.ground_J < 0) throw ConfigError(s.field("ground_J") + ": must be >= 0");
            t.J = static_cast<int>(s.integer("J", 1));
            if (t.J < 1) throw ConfigError(s.field("J") + ": Omega = 1 levels need J >= 1");
            if (std::abs(t.J - t.ground_J) > 1) throw ConfigError(s.field("J") + ": dipole transitions need |J - ground_J| <= 1");
            std::tie(t.window_lo_cm1, t.window_hi_cm1) = s.range("window_cm1", {7900.0, 11200.0});
            s.finish();
        }
        {
            Section s = root.child("polarizability");
            auto& t = c.polarizability;
            Section lvl = s.child("level");
            t.manifold = lvl.string("manifold", "X1Sigma+");
            t.v = static_cast<int>(lvl.integer("v", 0));
            t.J = static_cast<int>(lvl.integer("J", 0));
            if (t.J < 0) throw ConfigError(lvl.field("J") + ": must be >= 0");
            lvl.finish();
            t.omega_min_cm1 = s.number("omega_min_cm1", 9100.0);
            t.omega_max_cm1 = s.number("omega_max_cm1", 9710.0);
            if (t.omega_min_cm1 < 0.0) throw ConfigError(s.field("omega_min_cm1") + ": must be >= 0");
            if (!(t.omega_max_cm1 >= t.omega_min_cm1)) throw ConfigError(s.field("omega_max_cm1") + ": below omega_min_cm1");
            t.step_cm1 = s.number("step_cm1", 0.05);
            if (!(t.step_cm1 > 0.0)) throw ConfigError(s.field("step_cm1") + ": must be > 0");
            t.intensity_w_cm2 = s.number("intensity_W_cm2", 1e4);
            if (t.intensity_w_cm2 < 0.0) throw ConfigError(s.field("intensity_W_cm2") + ": must be >= 0");
            if (const auto cat = s.optional_string("catalog")) {
                t.catalog = resolve_path(base, *cat);
                require_file(*t.catalog, s.field("catalog"));
            } else if (t.manifold != "X1Sigma+" && t.manifold != "a3Sigma+") {
                throw ConfigError(lvl.field("manifold") + ": the built-in catalog supports X1Sigma+ and a3Sigma+, not '" +
                                  t.manifold + "'");
            }
            t.gamma_mhz = s.number("gamma_MHz", 6.0);
            if (t.gamma_mhz < 0.0) throw ConfigError(s.field("gamma_MHz") + ": must be >= 0");
            t.threshold_au = s.number("flag_threshold_au", 0.0);
            if (t.threshold_au < 0.0) throw ConfigError(s.field("flag_threshold_au") + ": must be >= 0");
            s.finish();
        }
        {
            Section s = root.child("validate_curves");
            for (const auto& f : s.string_list("files")) {
                c.validate_curves.files.push_back(resolve_path(base, f));
                require_file(c.validate_curves.files.back(), s.field("files"));
            }
            s.finish();
        }
        root.finish();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

std::map<std::string, fs::path> curve_files(const RunConfig& config)
{
    std::map<std::string, fs::path> files;
    std::vector<std::string> keys = kPotentialKeys;
    keys.insert(keys.end(), kFunctionKeys.begin(), kFunctionKeys.end());
    if (config.curves_dir) {
        for (const auto& k : keys) {
            const fs::path p = *config.curves_dir / (k + ".txt");
            if (fs::is_regular_file(p)) files[k] = p;
        }
    }
    for (const auto& [k, p] : config.curves) files[k] = p;
    return files;
}

ModelCurves load_curve_set(const RunConfig& config)
{
    ModelCurves m = builtin_model_curves();
    const std::map<std::string, PotentialCurve*> potentials{
        {"X1Sigma+", &m.x1sigma}, {"a3Sigma+", &m.a3sigma}, {"2_3Sigma+", &m.sigma3}, {"1_3Pi", &m.pi3}, {"1_1Pi", &m.pi1}};
    const std::map<std::string, RFunction*> functions{
        {"xi_sigma_pi3", &m.xi_sigma_pi3}, {"xi_sigma_pi1", &m.xi_sigma_pi1}, {"xi_pi1_pi3", &m.xi_pi1_pi3},
        {"d_X_1Pi", &m.dipole_x_pi1},      {"d_X_X", &m.dipole_x_x},         {"d_a_2_3Sigma+", &m.dipole_a_sigma3},
        {"d_a_1_3Pi", &m.dipole_a_pi3}};
    for (const auto& [k, p] : curve_files(config)) {
        if (auto it = potentials.find(k); it != potentials.end()) *it->second = load_curve(p);
        if (auto it = functions.find(k); it != functions.end()) *it->second = load_function(p);
    }
    if (config.fine_structure_cm1) m.fine_structure = cm1_to_hartree(*config.fine_structure_cm1);
    return m;
}

void write_builtin_curves(const fs::path& dir)
{
    fs::create_directories(dir);
    const ModelCurves& m = builtin_model_curves();
    write_curve(m.x1sigma, dir / "X1Sigma+.txt");
    write_curve(m.a3sigma, dir / "a3Sigma+.txt");
    write_curve(m.sigma3, dir / "2_3Sigma+.txt");
    write_curve(m.pi3, dir / "1_3Pi.txt");
    write_curve(m.pi1, dir / "1_1Pi.txt");
    write_function(m.xi_sigma_pi3, dir / "xi_sigma_pi3.txt");
    write_function(m.xi_sigma_pi1, dir / "xi_sigma_pi1.txt");
    write_function(m.xi_pi1_pi3, dir / "xi_pi1_pi3.txt");
    write_function(m.dipole_x_pi1, dir / "d_X_1Pi.txt");
    write_function(m.dipole_x_x, dir / "d_X_X.txt");
    write_function(m.dipole_a_sigma3, dir / "d_a_2_3Sigma+.txt");
    write_function(m.dipole_a_pi3, dir / "d_a_1_3Pi.txt");
}

}  // namespace ccmol
