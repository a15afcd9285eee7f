#pragma once

// Run configuration: a strict JSON document. Every key is optional, unknown
// keys are errors, and the resolved document (defaults filled in) is what
// gets hashed and recorded in the manifest.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccmol/potential.hpp"
#include "ccmol/radial.hpp"

namespace ccmol {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridConfig {
    double r_min = 5.0, r_max = 60.0;
    std::size_t points = 2200;
    RadialGrid grid() const { return {r_min, r_max, points}; }
};

struct SolverConfig {
    GridConfig grid;
    Backend backend = Backend::propagation;
    double refine_tol = 0.0;  ///< hartree
    std::size_t max_points = 8000;
    SolverSettings settings() const;
};

struct ChannelsTask {
    int l = 0;
    std::optional<double> MF;  ///< all M_F blocks when absent
};

struct BoundStatesTask {
    int l = 0;
    double MF = -3.5;
    double window_lo_ghz = -10.0, window_hi_ghz = 0.0;  ///< relative to the lowest threshold
    double offset_ghz = 0.0;                            ///< added to reported energies only
    bool wavefunctions = false;
};

struct ExcitedTask {
    int J = 1;
    double window_lo_cm1 = 7900.0, window_hi_cm1 = 11200.0;
    int ground_v = 0;  ///< X1Sigma+ level (J = 0) used for the dipole column
    bool uncoupled = false;
};

struct TdmTask {
    std::vector<int> ground_v{0};
    int ground_J = 0;
    int J = 1;
    double window_lo_cm1 = 7900.0, window_hi_cm1 = 11200.0;
};

struct PolarizabilityTask {
    std::string manifold = "X1Sigma+";
    int v = 0, J = 0;
    double omega_min_cm1 = 9100.0, omega_max_cm1 = 9710.0;
    double step_cm1 = 0.05;
    double intensity_w_cm2 = 1e4;
    std::optional<std::filesystem::path> catalog;
    double gamma_mhz = 6.0;
    double threshold_au = 0.0;  ///< resonance flag threshold on |alpha|; 0 picks 10 x median
};

struct ValidateCurvesTask {
    std::vector<std::filesystem::path> files;  ///< empty: every file of the curve set
};

// Curve-set keys; a curve directory holds <key>.txt for any subset.
inline const std::vector<std::string> kPotentialKeys{"X1Sigma+", "a3Sigma+", "2_3Sigma+", "1_3Pi", "1_1Pi"};
inline const std::vector<std::string> kFunctionKeys{"xi_sigma_pi3",   "xi_sigma_pi1", "xi_pi1_pi3", "d_X_1Pi",
                                                    "d_X_X",          "d_a_2_3Sigma+", "d_a_1_3Pi"};

struct RunConfig {
    std::string species_a = "K40", species_b = "Rb87";
    std::filesystem::path species_file;
    double field_gauss = 545.9;
    std::optional<std::filesystem::path> curves_dir;
    std::map<std::string, std::filesystem::path> curves;  ///< key -> file, overrides curves_dir
    std::optional<double> fine_structure_cm1;

    SolverConfig ground_solver, excited_solver;

    ChannelsTask channels;
    BoundStatesTask bound_states;
    ExcitedTask excited;
    TdmTask tdm;
    PolarizabilityTask polarizability;
    ValidateCurvesTask validate_curves;

    nlohmann::json resolved;  ///< canonical document with every default filled in
    std::string source;       ///< file name or "<defaults>"

    /// SHA-256 of the resolved document's canonical dump.
    std::string hash() const;
};

/// Reads and validates a config file. Parse errors carry line:column,
/// semantic errors name the offending field path.
RunConfig parse_config(const std::filesystem::path& path);
/// Same for an in-memory document; `source` labels error messages and
/// relative paths resolve against `base_dir`.
RunConfig parse_config_json(const nlohmann::json& doc, const std::string& source = "<config>",
                            const std::filesystem::path& base_dir = {});
/// Parses text, reporting syntax errors as source:line:column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

/// Curve set from the config: built-in model curves replaced entry by entry
/// by files found in curves_dir or listed in curves.
ModelCurves load_curve_set(const RunConfig& config);
/// Files that load_curve_set reads, keyed like RunConfig::curves.
std::map<std::string, std::filesystem::path> curve_files(const RunConfig& config);
/// Writes the built-in model as a curve directory.
void write_builtin_curves(const std::filesystem::path& dir);

}  // namespace ccmol
