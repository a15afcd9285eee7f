#pragma once

// Physical constants, unit conversion and atomic species data.
//
// Everything inside the solvers is in atomic units (hbar = m_e = e = a0 = 1,
// energies in hartree). Conversions happen only at I/O boundaries.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccmol {

/// CODATA 2018 recommended values (SI), NIST reference on constants.
struct PhysicalConstants {
    static constexpr double speed_of_light = 299792458.0;          // m s^-1 (exact)
    static constexpr double planck = 6.62607015e-34;               // J s (exact)
    static constexpr double hbar = 1.054571817e-34;                // J s
    static constexpr double boltzmann = 1.380649e-23;              // J K^-1 (exact)
    static constexpr double elementary_charge = 1.602176634e-19;   // C (exact)
    static constexpr double electron_mass = 9.1093837015e-31;      // kg
    static constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
    static constexpr double bohr_radius = 5.29177210903e-11;       // m
    static constexpr double hartree = 4.3597447222071e-18;         // J
    static constexpr double bohr_magneton = 9.2740100783e-24;      // J T^-1
    static constexpr double nuclear_magneton = 5.0507837461e-27;   // J T^-1
    static constexpr double fine_structure = 7.2973525693e-3;
    static constexpr double vacuum_permittivity = 8.8541878128e-12;  // F m^-1

    // Conversion factors to atomic units.
    static constexpr double hartree_in_cm1 = hartree / (planck * speed_of_light * 100.0);
    static constexpr double hartree_in_hz = hartree / planck;
    static constexpr double hartree_in_kelvin = hartree / boltzmann;
    static constexpr double amu_in_me = atomic_mass_unit / electron_mass;
    static constexpr double bohr_in_nm = bohr_radius * 1e9;
    static constexpr double speed_of_light_au = 1.0 / fine_structure;
    /// mu_B and mu_N times one gauss, in hartree.
    static constexpr double bohr_magneton_au_per_gauss = bohr_magneton * 1e-4 / hartree;
    static constexpr double nuclear_magneton_au_per_gauss = nuclear_magneton * 1e-4 / hartree;
};

enum class Unit { hartree, cm1, GHz, MHz, kelvin, bohr, nm };

class UnitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Accepts "hartree", "au", "cm-1", "GHz", "MHz", "K", "a0", "bohr", "au-length", "nm".
Unit parse_unit(std::string_view name);
std::string_view unit_name(Unit u);
bool is_energy(Unit u);

/// Linear conversion between two units of the same dimension.
double convert(double value, Unit from, Unit to);
double convert(double value, std::string_view from, std::string_view to);

inline double to_au(double value, Unit from) { return convert(value, from, is_energy(from) ? Unit::hartree : Unit::bohr); }
inline double from_au(double value, Unit to) { return convert(value, is_energy(to) ? Unit::hartree : Unit::bohr, to); }

inline double cm1_to_hartree(double e) { return e / PhysicalConstants::hartree_in_cm1; }
inline double hartree_to_cm1(double e) { return e * PhysicalConstants::hartree_in_cm1; }
inline double ghz_to_hartree(double e) { return e * 1e9 / PhysicalConstants::hartree_in_hz; }
inline double hartree_to_ghz(double e) { return e * PhysicalConstants::hartree_in_hz * 1e-9; }
inline double hartree_to_mhz(double e) { return e * PhysicalConstants::hartree_in_hz * 1e-6; }
inline double mhz_to_hartree(double e) { return e * 1e6 / PhysicalConstants::hartree_in_hz; }

/// Vacuum wavelength in nm to photon energy in cm^-1.
inline double wavelength_nm_to_cm1(double nm) { return 1e7 / nm; }

struct AtomSpecies {
    std::string name;
    double mass_u = 0.0;          ///< atomic mass units
    int two_nuclear_spin = 0;     ///< 2i, so half-integers are exact
    double a_hf = 0.0;            ///< Fermi-contact constant, hartree
    double g_s = 2.0;             ///< electron g-factor
    double g_i = 0.0;             ///< nuclear g-factor in units of mu_N
    std::string source;

    double nuclear_spin() const { return 0.5 * two_nuclear_spin; }
    double mass_au() const { return mass_u * PhysicalConstants::amu_in_me; }
    /// Throws std::invalid_argument if an invariant is broken.
    void validate() const;
};

struct FieldConfig {
    double gauss = 0.0;
    explicit FieldConfig(double b = 0.0);
};

/// m_a m_b / (m_a + m_b), same unit as the inputs.
double reduced_mass(double mass_a, double mass_b);
/// Reduced mass of the pair in atomic mass units.
double reduced_mass(const AtomSpecies& a, const AtomSpecies& b);

/// Loads the species data file (JSON, one record per species, units per field).
std::vector<AtomSpecies> load_species_file(const std::filesystem::path& path);
AtomSpecies find_species(const std::vector<AtomSpecies>& table, std::string_view name);
/// data/species.json shipped with the repo.
std::filesystem::path default_species_file();

}  // namespace ccmol
