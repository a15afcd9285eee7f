#pragma once

// Complex dynamic polarizability of a single-channel ground level from a
// line list of excited (or other ground) levels:
//
//   alpha(w) = sum_k S_k [ 1/(dE_k - i g_k/2 - w) + 1/(dE_k - i g_k/2 + w) ]
//
// with dE_k = E_k - E_level, S_k the M'-summed |d|^2 including the
// rotational factor, everything in atomic units. The light shift is
// V0 = -Re(alpha) I.

#include <complex>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccmol/potential.hpp"
#include "ccmol/radial.hpp"

namespace ccmol {

class CatalogError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Hund's case (c) label. reflection is +1 / -1 for Omega = 0, 0 otherwise.
struct OmegaLabel {
    int omega = 0;
    int reflection = 1;

    friend bool operator==(const OmegaLabel&, const OmegaLabel&) = default;
};
OmegaLabel parse_omega(const std::string& text);  ///< "0+", "0-", "1", "2", ...
std::string to_string(OmegaLabel o);

/// One-photon electric dipole rule: |dOmega| <= 1 and no 0+ <-> 0-.
bool dipole_allowed(OmegaLabel from, OmegaLabel to);

/// M-averaged orientation factor (2J'+1) (J 1 J'; -Omega, Omega-Omega', Omega')^2 / 3.
/// Equals 1/3 for J = 0 and every allowed Omega'.
double rotational_factor(int j, int omega, int j_prime, int omega_prime);

enum class CatalogSource { bound = 0, continuum = 1 };

struct CatalogEntry {
    std::string manifold;
    int v = 0;
    int J = 0;
    double energy = 0.0;         ///< hartree, same axis as the level energy
    double gamma = 0.0;          ///< FWHM, hartree
    double line_strength = 0.0;  ///< (e a0)^2
    CatalogSource source = CatalogSource::bound;
};

struct LevelIdentity {
    std::string manifold;
    int v = 0;
    int J = 0;
    double energy = 0.0;  ///< hartree

    friend bool operator==(const LevelIdentity&, const LevelIdentity&) = default;
};

struct ExcitedLevelCatalog {
    LevelIdentity level;
    std::vector<CatalogEntry> entries;

    /// Throws CatalogError on negative widths or strengths, or energies not
    /// strictly increasing inside a (manifold, J) series.
    void validate() const;
    /// SHA-256 of the canonical CSV form.
    std::string hash() const;
};

/// Union of two catalogs for the same level.
ExcitedLevelCatalog merge(const ExcitedLevelCatalog& a, const ExcitedLevelCatalog& b);

/// Manifold ids in first-appearance order; the id is the CSV manifold column.
std::vector<std::string> manifold_names(const ExcitedLevelCatalog& catalog);

/// Columns manifold, v, J, E_cm1, gamma_MHz, line_strength_au, source; the
/// level and manifold names live in the '#' header.
std::string catalog_csv(const ExcitedLevelCatalog& catalog, const std::string& extra_header = {});
void write_catalog(const ExcitedLevelCatalog& catalog, const std::filesystem::path& path,
                   const std::string& extra_header = {});
/// The manifold column may be a header id or a name; source is optional.
ExcitedLevelCatalog read_catalog(const std::filesystem::path& path);

/// A ground level as it enters build_catalog.
struct GroundLevel {
    LevelIdentity id;
    OmegaLabel omega;
    BoundState state;  ///< single channel
};

/// One Omega' manifold reachable from the ground level.
struct CatalogManifold {
    std::string name;
    OmegaLabel omega;
    std::function<CoupledChannelProblem(int J)> problem;
    /// Row of transition dipoles (1 x channels) from the ground electronic
    /// state to each channel; required for every allowed manifold.
    std::optional<MatrixFunction> dipole;
    RadialGrid grid;
    EnergyWindow window;  ///< hartree
    double threshold = 0.0;  ///< levels at or above are box-discretised continuum
    double gamma = 0.0;      ///< hartree
    SolverSettings settings;
};

/// Solves each allowed manifold for every allowed J' and records
/// S = rotational_factor x |<ground|d|level>|^2. Forbidden manifolds
/// contribute nothing.
ExcitedLevelCatalog build_catalog(const GroundLevel& ground, const std::vector<CatalogManifold>& manifolds);

struct PolarizabilityValue {
    std::complex<double> alpha;
    bool pole = false;  ///< a zero-width line sat exactly on w; that term is left out
};

/// omega is the photon energy in hartree.
PolarizabilityValue dynamic_polarizability(const ExcitedLevelCatalog& catalog, double omega);

struct PolarizabilitySpectrum {
    std::vector<double> omega_cm1;
    std::vector<std::complex<double>> alpha;
    std::vector<char> pole;
    double step_cm1 = 0.0;
    LevelIdentity level;
    std::string polarization = "linear";
    std::string catalog_hash;

    std::size_t size() const { return omega_cm1.size(); }
};

constexpr double kDefaultScanStepCm1 = 0.05;

/// alpha on omega_min, omega_min + step, ... <= omega_max (cm^-1). The grid is
/// split into contiguous blocks over `threads` workers; values do not depend
/// on the thread count.
PolarizabilitySpectrum scan(const ExcitedLevelCatalog& catalog, double omega_min_cm1, double omega_max_cm1,
                            double step_cm1 = kDefaultScanStepCm1, unsigned threads = 1);

struct ResonanceFlag {
    double omega_cm1 = 0.0;     ///< interpolated sign change of Re alpha
    std::size_t first = 0, last = 0;  ///< grid indices of the flagged region
    double width_cm1 = 0.0;     ///< (last - first + 1) x step
};

/// Sign changes of Re alpha inside runs where |alpha| >= threshold; a
/// threshold <= 0 means 10 x the median |alpha| of the spectrum.
std::vector<ResonanceFlag> flag_resonances(const PolarizabilitySpectrum& spectrum, double threshold = 0.0);

struct ResonanceAssignment {
    ResonanceFlag flag;
    std::vector<std::size_t> entries;  ///< catalog indices, nearest first
    bool matched = false;              ///< nearest |dE| within step/2
    bool ambiguous = false;            ///< more than one entry within one step
};

std::vector<ResonanceAssignment> assign_resonances(const PolarizabilitySpectrum& spectrum,
                                                   const ExcitedLevelCatalog& catalog,
                                                   const std::vector<ResonanceFlag>& flags);

struct TrapDepth {
    double hartree = 0.0;
    double microkelvin = 0.0;
};

/// V0 = -Re(alpha) I with alpha in atomic units and I in W/cm^2, using
/// alpha_SI = 4 pi eps0 a0^3 alpha_au and U = -alpha_SI I / (2 eps0 c).
TrapDepth trap_depth(std::complex<double> alpha_au, double intensity_w_cm2);

struct WavelengthPreset {
    std::string name;
    double nm;
    double cm1() const { return 1e7 / nm; }
};

const std::vector<WavelengthPreset>& wavelength_presets();
/// Accepts "1090nm", "1090", "lambda1" and so on.
const WavelengthPreset& find_preset(const std::string& name);

// Built-in model pipeline.

/// Single-curve radial problem with the centrifugal term J(J+1)/(2 mu R^2).
CoupledChannelProblem single_curve_problem(const PotentialCurve& curve, double mass, int J);

/// Level v of one curve: v >= 0 counts up from the well bottom, v < 0 down
/// from the dissociation limit (v = -1 is the last bound level).
GroundLevel solve_curve_level(const PotentialCurve& curve, const std::string& name, OmegaLabel omega, double mass,
                              int v, int J, const RadialGrid& grid, const SolverSettings& settings);

struct BuiltinCatalogOptions {
    RadialGrid ground_grid{5.0, 60.0, 2200};
    RadialGrid excited_grid{5.0, 16.0, 601};
    double excited_lo_cm1 = 7900.0;
    double continuum_cm1 = 300.0;  ///< box continuum kept up to this far above each threshold
    double gamma_mhz = 6.0;        ///< excited-level width
    SolverSettings ground_settings = [] {
        SolverSettings s;
        s.backend = Backend::propagation;
        return s;
    }();
    SolverSettings excited_settings;
};

/// Ground levels come from "X1Sigma+" (0+) or "a3Sigma+" (treated as its 0-
/// component); the catalog covers the Omega = 1 spin-orbit model and, for
/// X, the X rovibrational levels reached through the permanent dipole.
struct BuiltinCatalog {
    GroundLevel ground;
    ExcitedLevelCatalog catalog;
};
BuiltinCatalog model_catalog(const ModelCurves& curves, double mass, const std::string& ground_manifold, int v, int J,
                             const BuiltinCatalogOptions& options = {});
/// model_catalog with the built-in curves and the 40K87Rb reduced mass.
BuiltinCatalog builtin_catalog(const std::string& ground_manifold, int v, int J,
                               const BuiltinCatalogOptions& options = {});

}  // namespace ccmol
