#include "ccmol/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ccmol/excited.hpp"
#include "ccmol/ground.hpp"
#include "ccmol/io.hpp"
#include "ccmol/polarizability.hpp"
#include "ccmol/spin_basis.hpp"
#include "ccmol/units.hpp"

namespace ccmol {

namespace fs = std::filesystem;
using nlohmann::json;

Task parse_task(const std::string& name)
{
    if (name == "channels") return Task::channels;
    if (name == "bound-states") return Task::bound_states;
    if (name == "excited") return Task::excited;
    if (name == "tdm") return Task::tdm;
    if (name == "polarizability") return Task::polarizability;
    if (name == "validate-curves") return Task::validate_curves;
    throw std::invalid_argument("unknown task '" + name + "'");
}

std::string task_name(Task t)
{
    switch (t) {
    case Task::channels: return "channels";
    case Task::bound_states: return "bound-states";
    case Task::excited: return "excited";
    case Task::tdm: return "tdm";
    case Task::polarizability: return "polarizability";
    case Task::validate_curves: return "validate-curves";
    }
    return "?";
}

fs::path resolve_out_dir(const std::string& flag_value)
{
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("CCMOL_OUT_DIR"); env && *env) return env;
    return "ccmol_out";
}

json RunManifest::to_json() const
{
    json j;
    j["tool"] = tool;
    j["version"] = version;
    j["task"] = task;
    j["config_source"] = config_source;
    j["config_hash"] = config_hash;
    j["manifest_hash"] = manifest_hash;
    j["started"] = started;
    j["finished"] = finished;
    j["status"] = status;
    j["inputs"] = json::array();
    for (const auto& [p, h] : inputs) j["inputs"].push_back({{"path", p.string()}, {"sha256", h}});
    j["outputs"] = json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path.string()}, {"sha256", o.sha256}, {"rows", o.rows}});
    j["warnings"] = warnings;
    j["config"] = config;
    return j;
}

namespace {

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void note(const std::string& key, const std::string& value) { notes_ += "# " + key + " = " + value + "\n"; }
    void note(const std::string& key, double value) { note(key, format_double(value)); }
    void row(const std::vector<double>& values)
    {
        if (values.size() != columns_.size()) throw std::logic_error("table row width mismatch");
        rows_.push_back(values);
    }
    std::size_t rows() const { return rows_.size(); }

    std::string render(const std::string& preamble) const
    {
        std::string s = preamble + notes_;
        for (std::size_t i = 0; i < columns_.size(); ++i) s += (i ? "," : "") + columns_[i];
        s += "\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
            s += "\n";
        }
        return s;
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
    std::string notes_;
};

struct Context {
    const RunConfig& config;
    const RunOptions& options;
    RunManifest& manifest;
    std::string preamble;

    void write(const std::string& name, const Table& t)
    {
        const fs::path path = options.out_dir / name;
        const std::string text = t.render(preamble);
        atomic_write(path, text);
        manifest.outputs.push_back({path, sha256_hex(text), t.rows()});
        if (options.echo) std::cout << "wrote " << path.string() << " (" << t.rows() << " rows)\n";
    }

    void write_raw(const std::string& name, const std::string& text, std::size_t rows)
    {
        const fs::path path = options.out_dir / name;
        atomic_write(path, text);
        manifest.outputs.push_back({path, sha256_hex(text), rows});
        if (options.echo) std::cout << "wrote " << path.string() << " (" << rows << " rows)\n";
    }

    void warn(const std::vector<std::string>& ws)
    {
        for (const auto& w : ws) {
            if (options.strict) throw ComputeError("strict mode: solver warning: " + w);
            manifest.warnings.push_back(w);
            std::cerr << "warning: " << w << "\n";
        }
    }
};

std::pair<AtomSpecies, AtomSpecies> species_pair(const RunConfig& c)
{
    const auto table = load_species_file(c.species_file);
    return {find_species(table, c.species_a), find_species(table, c.species_b)};
}

double pair_mass_au(const RunConfig& c)
{
    const auto [a, b] = species_pair(c);
    return reduced_mass(a, b) * PhysicalConstants::amu_in_me;
}

void task_channels(Context& ctx)
{
    const auto [a, b] = species_pair(ctx.config);
    const HalfInt ia = HalfInt::from_twice(a.two_nuclear_spin), ib = HalfInt::from_twice(b.two_nuclear_spin);
    std::vector<HalfInt> blocks;
    if (ctx.config.channels.MF) blocks.push_back(HalfInt::from_double(*ctx.config.channels.MF));
    else blocks = allowed_mf(ia, ib);

    Table t({"M_F", "index", "S", "m_S", "m_iA", "m_iB", "l", "m_l"});
    t.note("species", a.name + " " + b.name);
    t.note("l", ctx.config.channels.l);
    std::size_t singlets = 0;
    for (HalfInt mf : blocks) {
        const auto basis = enumerate_channels(ia, ib, ctx.config.channels.l, 0, mf);
        singlets += basis.singlet_count();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const auto& ch = basis.channels[k];
            t.row({mf.value(), static_cast<double>(k), static_cast<double>(ch.S), static_cast<double>(ch.m_S),
                   ch.m_iA.value(), ch.m_iB.value(), static_cast<double>(ch.l), static_cast<double>(ch.m_l)});
        }
    }
    t.note("channels", static_cast<double>(t.rows()));
    t.note("singlet_channels", static_cast<double>(singlets));
    ctx.write("channels.csv", t);
    if (ctx.options.echo) std::cout << t.render("");
}

void task_bound_states(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& task = c.bound_states;
    const auto [a, b] = species_pair(c);
    const ModelCurves curves = load_curve_set(c);
    const auto basis = enumerate_channels(HalfInt::from_twice(a.two_nuclear_spin), HalfInt::from_twice(b.two_nuclear_spin),
                                          task.l, 0, HalfInt::from_double(task.MF));
    const GroundModel model(a, b, curves.x1sigma, curves.a3sigma, basis, FieldConfig{c.field_gauss});
    const auto problem = coupled_channel_problem(model);
    const EnergyWindow window{ghz_to_hartree(task.window_lo_ghz), ghz_to_hartree(task.window_hi_ghz)};
    const SolveResult res = solve(problem, c.ground_solver.grid.grid(), window, c.ground_solver.settings());
    ctx.warn(res.warnings);
    const auto dd = dipole_dipole_shifts(res.states, basis, a, b);

    Table t({"energy_GHz", "energy_offset_GHz", "triplet_fraction", "dominant_channel", "dd_shift_MHz"});
    t.note("energy_zero", "lowest atom-pair threshold");
    t.note("field_G", c.field_gauss);
    t.note("M_F", task.MF);
    t.note("l", task.l);
    t.note("offset_GHz", task.offset_ghz);
    t.note("channels", static_cast<double>(basis.size()));
    t.note("result", res.empty() ? "no_states" : "ok");
    for (std::size_t k = 0; k < res.states.size(); ++k) {
        const auto& s = res.states[k];
        const double e = hartree_to_ghz(s.energy);
        t.row({e, e + task.offset_ghz, triplet_fraction(s, basis), static_cast<double>(s.dominant_channel()),
               hartree_to_mhz(dd[k])});
        if (task.wavefunctions) {
            const fs::path path = ctx.options.out_dir / ("bound_state_" + std::to_string(k) + ".csv");
            write_wavefunction_csv(s, path, ctx.preamble);
            ctx.manifest.outputs.push_back({path, sha256_file(path), s.grid.points});
        }
    }
    if (res.empty()) ctx.manifest.status = "no_states";
    ctx.write("bound_states.csv", t);
}

ExcitedModel excited_model(const RunConfig& c, const ModelCurves& curves, int J, bool uncoupled)
{
    ExcitedModel m = ExcitedModel::from_curves(curves, pair_mass_au(c));
    m.J = J;
    return uncoupled ? m.uncoupled() : m;
}

GroundLevel x_level(const RunConfig& c, const ModelCurves& curves, int v, int J)
{
    return solve_curve_level(curves.x1sigma, "X1Sigma+", {0, 1}, pair_mass_au(c), v, J, c.ground_solver.grid.grid(),
                             c.ground_solver.settings());
}

void task_excited(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& task = c.excited;
    const ModelCurves curves = load_curve_set(c);
    const ExcitedModel model = excited_model(c, curves, task.J, task.uncoupled);
    const auto levels = excited_levels(model, c.excited_solver.grid.grid(),
                                       {cm1_to_hartree(task.window_lo_cm1), cm1_to_hartree(task.window_hi_cm1)},
                                       c.excited_solver.settings());
    ctx.warn(levels.warnings);
    const GroundLevel g = x_level(c, curves, task.ground_v, 0);
    const auto rows = spectrum_report(levels, ChannelDipoles::singlet(curves.dipole_x_pi1), g.state);

    Table t({"E_cm1", "f_sigma", "f_pi3", "f_pi1", "dipole_au"});
    t.note("J", task.J);
    t.note("couplings", task.uncoupled ? "off" : "on");
    t.note("dipole_from", "X1Sigma+ v=" + std::to_string(task.ground_v) + " J=0");
    t.note("ground_E_cm1", hartree_to_cm1(g.id.energy));
    for (const auto& r : rows)
        t.row({hartree_to_cm1(r.energy), r.fractions.sigma3, r.fractions.pi3, r.fractions.pi1, r.dipole});
    if (rows.empty()) ctx.manifest.status = "no_states";
    ctx.write("excited_levels.csv", t);
}

void task_tdm(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& task = c.tdm;
    const ModelCurves curves = load_curve_set(c);
    const ExcitedModel model = excited_model(c, curves, task.J, false);
    const auto levels = excited_levels(model, c.excited_solver.grid.grid(),
                                       {cm1_to_hartree(task.window_lo_cm1), cm1_to_hartree(task.window_hi_cm1)},
                                       c.excited_solver.settings());
    ctx.warn(levels.warnings);
    const auto d = ChannelDipoles::singlet(curves.dipole_x_pi1);
    const double rot = rotational_factor(task.ground_J, 0, task.J, 1);

    Table t({"ground_v", "ground_E_cm1", "level", "E_cm1", "transition_cm1", "f_pi1", "dipole_au", "line_strength_au"});
    t.note("ground", "X1Sigma+ J=" + std::to_string(task.ground_J));
    t.note("J", task.J);
    t.note("rotational_factor", rot);
    for (int v : task.ground_v) {
        const GroundLevel g = x_level(c, curves, v, task.ground_J);
        for (std::size_t k = 0; k < levels.levels.size(); ++k) {
            const auto& l = levels.levels[k];
            const double tdm = transition_dipole(g.state, l.state, d);
            t.row({static_cast<double>(v), hartree_to_cm1(g.id.energy), static_cast<double>(k),
                   hartree_to_cm1(l.state.energy), hartree_to_cm1(l.state.energy - g.id.energy), l.fractions.pi1, tdm,
                   rot * tdm * tdm});
        }
    }
    if (levels.levels.empty()) ctx.manifest.status = "no_states";
    ctx.write("tdm.csv", t);
}

void task_polarizability(Context& ctx)
{
    const auto& c = ctx.config;
    const auto& task = c.polarizability;
    ExcitedLevelCatalog cat;
    if (task.catalog) {
        cat = read_catalog(*task.catalog);
    } else {
        BuiltinCatalogOptions opt;
        opt.ground_grid = c.ground_solver.grid.grid();
        opt.ground_settings = c.ground_solver.settings();
        opt.excited_grid = c.excited_solver.grid.grid();
        opt.excited_settings = c.excited_solver.settings();
        opt.gamma_mhz = task.gamma_mhz;
        cat = model_catalog(load_curve_set(c), pair_mass_au(c), task.manifold, task.v, task.J, opt).catalog;
        ctx.write_raw("catalog.csv", catalog_csv(cat, ctx.preamble), cat.entries.size());
    }
    const auto sp = scan(cat, task.omega_min_cm1, task.omega_max_cm1, task.step_cm1, ctx.options.threads);

    const std::string level = cat.level.manifold + " v=" + std::to_string(cat.level.v) + " J=" + std::to_string(cat.level.J);
    Table t({"omega_cm1", "re_alpha_au", "im_alpha_au", "V0_uK", "pole"});
    t.note("level", level);
    t.note("polarization", sp.polarization);
    t.note("step_cm1", sp.step_cm1);
    t.note("intensity_W_cm2", task.intensity_w_cm2);
    t.note("catalog_hash", sp.catalog_hash);
    t.note("catalog_entries", static_cast<double>(cat.entries.size()));
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const auto v0 = trap_depth(sp.alpha[i], task.intensity_w_cm2);
        t.row({sp.omega_cm1[i], sp.alpha[i].real(), sp.alpha[i].imag(), v0.microkelvin, sp.pole[i] ? 1.0 : 0.0});
    }
    ctx.write("polarizability.csv", t);

    const auto flags = flag_resonances(sp, task.threshold_au);
    const auto assigned = assign_resonances(sp, cat, flags);
    const auto names = manifold_names(cat);
    Table r({"flag", "omega_cm1", "width_cm1", "matched", "ambiguous", "entry", "manifold", "v", "J", "line_cm1"});
    r.note("level", level);
    for (std::size_t i = 0; i < names.size(); ++i) r.note("manifold " + std::to_string(i), names[i]);
    r.note("unassigned", "entry = manifold = v = J = line_cm1 = -1");
    for (std::size_t f = 0; f < assigned.size(); ++f) {
        const auto& a = assigned[f];
        const std::vector<double> head{static_cast<double>(f), a.flag.omega_cm1, a.flag.width_cm1, a.matched ? 1.0 : 0.0,
                                       a.ambiguous ? 1.0 : 0.0};
        if (a.entries.empty()) {
            auto row = head;
            row.insert(row.end(), {-1.0, -1.0, -1.0, -1.0, -1.0});
            r.row(row);
        }
        for (std::size_t k : a.entries) {
            const auto& e = cat.entries[k];
            const double id = static_cast<double>(std::find(names.begin(), names.end(), e.manifold) - names.begin());
            auto row = head;
            row.insert(row.end(), {static_cast<double>(k), id, static_cast<double>(e.v), static_cast<double>(e.J),
                                   std::abs(hartree_to_cm1(e.energy - cat.level.energy))});
            r.row(row);
        }
    }
    ctx.write("resonances.csv", r);

    Table p({"wavelength_nm", "omega_cm1", "re_alpha_au", "im_alpha_au", "V0_uK"});
    p.note("level", level);
    p.note("intensity_W_cm2", task.intensity_w_cm2);
    for (const auto& pr : wavelength_presets()) {
        const auto v = dynamic_polarizability(cat, cm1_to_hartree(pr.cm1()));
        p.row({pr.nm, pr.cm1(), v.alpha.real(), v.alpha.imag(), trap_depth(v.alpha, task.intensity_w_cm2).microkelvin});
    }
    ctx.write("presets.csv", p);
}

std::vector<fs::path> curves_to_validate(const RunConfig& c)
{
    if (!c.validate_curves.files.empty()) return c.validate_curves.files;
    std::vector<fs::path> files;
    for (const auto& [k, p] : curve_files(c)) files.push_back(p);
    if (files.empty()) {
        const fs::path dir = fs::path(CCMOL_DATA_DIR) / "curves";
        if (fs::is_directory(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
        std::sort(files.begin(), files.end());
    }
    return files;
}

bool declares_function(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        if (line.find("kind") != std::string::npos && line.find("function") != std::string::npos) return true;
    }
    return false;
}

void task_validate_curves(Context& ctx)
{
    const auto files = curves_to_validate(ctx.config);
    Table t({"file", "valid", "kind", "points", "r_first_a0", "splice_R_a0", "asymptote_cm1", "derivative_jump"});
    t.note("kind", "0 = potential, 1 = function");
    std::vector<std::string> errors;
    for (std::size_t i = 0; i < files.size(); ++i) {
        t.note("file " + std::to_string(i), files[i].string());
        const bool fn = declares_function(files[i]);
        try {
            if (fn) {
                const RFunction f = load_function(files[i]);
                t.row({static_cast<double>(i), 1.0, 1.0, static_cast<double>(f.points().size()), f.points().front().r,
                       f.splice_radius(), f.asymptote(), splice_derivative_jump(f)});
            } else {
                const PotentialCurve f = load_curve(files[i]);
                t.row({static_cast<double>(i), 1.0, 0.0, static_cast<double>(f.points().size()), f.points().front().r,
                       f.splice_radius(), hartree_to_cm1(f.asymptote()), splice_derivative_jump(f)});
            }
        } catch (const std::exception& e) {
            errors.push_back(e.what());
            std::cerr << "invalid: " << e.what() << "\n";
            t.row({static_cast<double>(i), 0.0, fn ? 1.0 : 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
        }
    }
    ctx.write("validate_curves.csv", t);
    if (!errors.empty())
        throw InvalidInputError(std::to_string(errors.size()) + " of " + std::to_string(files.size()) +
                                " curve files failed validation; first: " + errors.front());
}

std::vector<fs::path> task_inputs(const RunConfig& c, Task task)
{
    std::vector<fs::path> in{c.species_file};
    if (task == Task::channels) return in;
    if (task == Task::validate_curves) {
        for (const auto& p : curves_to_validate(c)) in.push_back(p);
        return in;
    }
    for (const auto& [k, p] : curve_files(c)) in.push_back(p);
    if (task == Task::polarizability && c.polarizability.catalog) in.push_back(*c.polarizability.catalog);
    return in;
}

}  // namespace

RunManifest run(const RunConfig& config, Task task, const RunOptions& options)
{
    RunManifest m;
    m.task = task_name(task);
    m.config_source = config.source;
    m.config_hash = config.hash();
    m.config = config.resolved;
    m.started = utc_now();

    std::string ident = std::string("ccmol ") + kToolVersion + "\n" + m.task + "\n" + m.config_hash + "\n";
    for (const auto& p : task_inputs(config, task)) {
        std::string h;
        try {
            h = sha256_file(p);
        } catch (const std::exception& e) {
            throw InvalidInputError(m.task + ": " + e.what());
        }
        m.inputs.push_back({p, h});
        ident += h + "\n";
    }
    m.manifest_hash = sha256_hex(ident);

    std::string preamble = std::string("# tool = ccmol ") + kToolVersion + "\n# task = " + m.task +
                           "\n# manifest_hash = " + m.manifest_hash + "\n# config_hash = " + m.config_hash + "\n";
    Context ctx{config, options, m, preamble};
    fs::create_directories(options.out_dir);
    try {
        switch (task) {
        case Task::channels: task_channels(ctx); break;
        case Task::bound_states: task_bound_states(ctx); break;
        case Task::excited: task_excited(ctx); break;
        case Task::tdm: task_tdm(ctx); break;
        case Task::polarizability: task_polarizability(ctx); break;
        case Task::validate_curves: task_validate_curves(ctx); break;
        }
    } catch (const InvalidInputError& e) {
        throw InvalidInputError(m.task + ": " + e.what());
    } catch (const CurveFormatError& e) {
        throw InvalidInputError(m.task + ": " + e.what());
    } catch (const CatalogError& e) {
        throw InvalidInputError(m.task + ": " + e.what());
    } catch (const std::exception& e) {
        throw ComputeError(m.task + ": " + e.what());
    }
    m.finished = utc_now();
    const fs::path mpath = options.out_dir / (m.task + "_manifest.json");
    atomic_write(mpath, m.to_json().dump(2) + "\n");
    if (options.echo) std::cout << "wrote " << mpath.string() << "\n";
    return m;
}

}  // namespace ccmol
