#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccmol/config.hpp"
#include "ccmol/run.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCompute = 2;

std::pair<double, double> parse_pair(const std::string& text, const std::string& flag)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ccmol::ConfigError(flag + ": expected 'lo,hi', got '" + text + "'");
    try {
        std::size_t a = 0, b = 0;
        const std::string lo = text.substr(0, comma), hi = text.substr(comma + 1);
        const double x = std::stod(lo, &a), y = std::stod(hi, &b);
        if (a != lo.size() || b != hi.size()) throw std::invalid_argument(text);
        return {x, y};
    } catch (const std::logic_error&) {
        throw ccmol::ConfigError(flag + ": expected 'lo,hi', got '" + text + "'");
    }
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

struct Flags {
    std::string config, out_dir, curves;
    unsigned threads = 1;
    bool strict = false;

    std::optional<int> ell, J, ground_J;
    std::optional<std::string> mf, energy_window, window_cm1, level, catalog;
    std::optional<double> b_gauss, offset_ghz, omega_min, omega_max, step, intensity, gamma;
    std::vector<int> ground_v;
    bool uncoupled = false, wavefunctions = false;
    std::vector<std::string> files;
};

void apply_overrides(json& doc, const Flags& f, ccmol::Task task)
{
    using ccmol::Task;
    if (!f.curves.empty()) doc["curves_dir"] = absolute(f.curves);
    if (f.b_gauss) doc["field_G"] = *f.b_gauss;
    switch (task) {
    case Task::channels:
        if (f.ell) doc["channels"]["l"] = *f.ell;
        if (f.mf) doc["channels"]["MF"] = *f.mf;
        break;
    case Task::bound_states: {
        auto& s = doc["bound_states"];
        if (f.ell) s["l"] = *f.ell;
        if (f.mf) s["MF"] = *f.mf;
        if (f.energy_window) {
            const auto [lo, hi] = parse_pair(*f.energy_window, "--energy-window");
            s["window_GHz"] = json::array({lo, hi});
        }
        if (f.offset_ghz) s["offset_GHz"] = *f.offset_ghz;
        if (f.wavefunctions) s["wavefunctions"] = true;
        break;
    }
    case Task::excited: {
        auto& s = doc["excited"];
        if (f.J) s["J"] = *f.J;
        if (f.window_cm1) {
            const auto [lo, hi] = parse_pair(*f.window_cm1, "--window-cm1");
            s["window_cm1"] = json::array({lo, hi});
        }
        if (!f.ground_v.empty()) s["ground_v"] = f.ground_v.front();
        if (f.uncoupled) s["uncoupled"] = true;
        break;
    }
    case Task::tdm: {
        auto& s = doc["tdm"];
        if (f.J) s["J"] = *f.J;
        if (f.ground_J) s["ground_J"] = *f.ground_J;
        if (f.window_cm1) {
            const auto [lo, hi] = parse_pair(*f.window_cm1, "--window-cm1");
            s["window_cm1"] = json::array({lo, hi});
        }
        if (!f.ground_v.empty()) s["ground_v"] = f.ground_v;
        break;
    }
    case Task::polarizability: {
        auto& s = doc["polarizability"];
        if (f.level) {
            std::vector<std::string> parts;
            std::stringstream ss(*f.level);
            for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
            try {
                if (parts.size() != 3) throw std::invalid_argument(*f.level);
                s["level"] = {{"manifold", parts[0]}, {"v", std::stoi(parts[1])}, {"J", std::stoi(parts[2])}};
            } catch (const std::logic_error&) {
                throw ccmol::ConfigError("--level: expected 'manifold,v,J', got '" + *f.level + "'");
            }
        }
        if (f.omega_min) s["omega_min_cm1"] = *f.omega_min;
        if (f.omega_max) s["omega_max_cm1"] = *f.omega_max;
        if (f.step) s["step_cm1"] = *f.step;
        if (f.intensity) s["intensity_W_cm2"] = *f.intensity;
        if (f.gamma) s["gamma_MHz"] = *f.gamma;
        if (f.catalog) s["catalog"] = absolute(*f.catalog);
        break;
    }
    case Task::validate_curves:
        if (!f.files.empty()) {
            json list = json::array();
            for (const auto& p : f.files) list.push_back(absolute(p));
            doc["validate_curves"]["files"] = list;
        }
        break;
    }
    for (const char* key : {"channels", "bound_states", "excited", "tdm", "polarizability", "validate_curves"})
        if (doc.contains(key) && doc[key].is_null()) doc.erase(key);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coupled-channel structure of alkali dimers: channels, bound levels, excited levels, "
                 "transition dipoles and dynamic polarizability"};
    app.set_version_flag("--version", std::string("ccmol ") + ccmol::kToolVersion);
    Flags f;
    app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out-dir", f.out_dir, "output directory (default $CCMOL_OUT_DIR, else ./ccmol_out)");
    app.add_option("--threads", f.threads, "worker threads for frequency scans")->check(CLI::Range(1u, 1024u));
    app.add_flag("--strict", f.strict, "treat solver warnings as errors");
    app.require_subcommand(1);
    app.fallthrough();

    auto* channels = app.add_subcommand("channels", "enumerate the hyperfine/Zeeman channel basis");
    channels->add_option("--ell", f.ell, "partial wave l");
    channels->add_option("--MF", f.mf, "M_F block, e.g. -7/2 (default: all blocks)");

    auto* bound = app.add_subcommand("bound-states", "coupled-channel ground-state levels");
    bound->add_option("--ell", f.ell, "partial wave l");
    bound->add_option("--MF", f.mf, "M_F block, e.g. -7/2");
    bound->add_option("--B-gauss", f.b_gauss, "magnetic field in gauss");
    bound->add_option("--energy-window", f.energy_window, "lo,hi in GHz relative to the lowest threshold");
    bound->add_option("--offset-GHz", f.offset_ghz, "constant added to reported energies");
    bound->add_flag("--wavefunctions", f.wavefunctions, "also write one wavefunction CSV per level");

    auto* excited = app.add_subcommand("excited", "spin-orbit coupled Omega=1 levels");
    excited->add_option("--J", f.J, "rotational quantum number J'");
    excited->add_option("--window-cm1", f.window_cm1, "lo,hi photon-energy window in cm^-1");
    excited->add_option("--ground-v", f.ground_v, "X1Sigma+ level for the dipole column")->expected(1);
    excited->add_flag("--uncoupled", f.uncoupled, "switch every spin-orbit coupling off");

    auto* tdm = app.add_subcommand("tdm", "transition dipoles from X1Sigma+ levels to Omega=1 levels");
    tdm->add_option("--ground-v", f.ground_v, "one or more X1Sigma+ vibrational levels");
    tdm->add_option("--ground-J", f.ground_J, "ground rotational level");
    tdm->add_option("--J", f.J, "excited rotational level J'");
    tdm->add_option("--window-cm1", f.window_cm1, "lo,hi photon-energy window in cm^-1");

    auto* pol = app.add_subcommand("polarizability", "dynamic polarizability scan and trap depths");
    pol->add_option("--level", f.level, "manifold,v,J of the ground level, e.g. X1Sigma+,0,0 or a3Sigma+,-1,0");
    pol->add_option("--omega-min-cm1", f.omega_min, "scan start");
    pol->add_option("--omega-max-cm1", f.omega_max, "scan end");
    pol->add_option("--step-cm1", f.step, "scan step (default 0.05)");
    pol->add_option("--intensity-W-cm2", f.intensity, "laser intensity for the trap depth");
    pol->add_option("--gamma-MHz", f.gamma, "width of built-in catalog lines");
    pol->add_option("--catalog", f.catalog, "line-list CSV instead of the built-in model")->check(CLI::ExistingFile);

    auto* validate = app.add_subcommand("validate-curves", "load and check curve files");
    validate->add_option("files", f.files, "curve files (default: the configured curve set)")->check(CLI::ExistingFile);

    for (auto* sub : {bound, excited, tdm, pol, validate})
        sub->add_option("--curves", f.curves, "directory of curve files named <key>.txt")->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const ccmol::Task task = ccmol::parse_task(chosen->get_name());

    ccmol::RunConfig config;
    try {
        json doc = json::object();
        std::string source = "<defaults>";
        fs::path base = fs::current_path();
        if (!f.config.empty()) {
            std::ifstream in(f.config, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            doc = ccmol::parse_json_text(ss.str(), f.config);
            if (!doc.is_object()) throw ccmol::ConfigError(f.config + ": the top level must be an object");
            source = f.config;
            base = fs::absolute(f.config).parent_path();
        }
        apply_overrides(doc, f, task);
        config = ccmol::parse_config_json(doc, source, base);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    ccmol::RunOptions options;
    options.out_dir = ccmol::resolve_out_dir(f.out_dir);
    options.threads = f.threads;
    options.strict = f.strict;
    try {
        const auto manifest = ccmol::run(config, task, options);
        if (manifest.status == "no_states") std::cout << "no states in the requested window\n";
    } catch (const ccmol::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
    return 0;
}
