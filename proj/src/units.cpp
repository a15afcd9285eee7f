#include "ccmol/units.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace ccmol {

namespace {

using PC = PhysicalConstants;

// Size of one unit expressed in the dimension's atomic unit.
double scale_au(Unit u)
{
    switch (u) {
    case Unit::hartree: return 1.0;
    case Unit::cm1: return 1.0 / PC::hartree_in_cm1;
    case Unit::GHz: return 1e9 / PC::hartree_in_hz;
    case Unit::MHz: return 1e6 / PC::hartree_in_hz;
    case Unit::kelvin: return 1.0 / PC::hartree_in_kelvin;
    case Unit::bohr: return 1.0;
    case Unit::nm: return 1.0 / PC::bohr_in_nm;
    }
    throw UnitError("unknown unit");
}

double parse_half_integer(const nlohmann::json& j, const std::string& field)
{
    double v = j.at(field).get<double>();
    double twice = 2.0 * v;
    if (std::abs(twice - std::round(twice)) > 1e-12)
        throw std::invalid_argument(field + " must be a half-integer, got " + std::to_string(v));
    return v;
}

double read_quantity(const nlohmann::json& rec, const std::string& field, Unit target)
{
    const auto& q = rec.at(field);
    if (!q.is_object() || !q.contains("value") || !q.contains("unit"))
        throw std::invalid_argument(field + " must be an object {value, unit}");
    const auto unit = q.at("unit").get<std::string>();
    if (target == Unit::hartree)
        return convert(q.at("value").get<double>(), parse_unit(unit), Unit::hartree);
    // masses: only atomic mass units are accepted
    if (unit != "u" && unit != "amu")
        throw std::invalid_argument(field + ": mass unit must be 'u'");
    return q.at("value").get<double>();
}

}  // namespace

Unit parse_unit(std::string_view name)
{
    if (name == "hartree" || name == "au" || name == "Eh") return Unit::hartree;
    if (name == "cm-1" || name == "cm^-1" || name == "cm1") return Unit::cm1;
    if (name == "GHz") return Unit::GHz;
    if (name == "MHz") return Unit::MHz;
    if (name == "K") return Unit::kelvin;
    if (name == "a0" || name == "bohr" || name == "au-length") return Unit::bohr;
    if (name == "nm") return Unit::nm;
    throw UnitError("unknown unit '" + std::string(name) + "'");
}

std::string_view unit_name(Unit u)
{
    switch (u) {
    case Unit::hartree: return "hartree";
    case Unit::cm1: return "cm-1";
    case Unit::GHz: return "GHz";
    case Unit::MHz: return "MHz";
    case Unit::kelvin: return "K";
    case Unit::bohr: return "a0";
    case Unit::nm: return "nm";
    }
    return "?";
}

bool is_energy(Unit u) { return u != Unit::bohr && u != Unit::nm; }

double convert(double value, Unit from, Unit to)
{
    if (from == to) return value;
    if (is_energy(from) != is_energy(to))
        throw UnitError("cannot convert " + std::string(unit_name(from)) + " to " + std::string(unit_name(to)));
    return value * (scale_au(from) / scale_au(to));
}

double convert(double value, std::string_view from, std::string_view to)
{
    return convert(value, parse_unit(from), parse_unit(to));
}

void AtomSpecies::validate() const
{
    if (!(mass_u > 0.0)) throw std::invalid_argument("species " + name + ": mass must be positive");
    if (two_nuclear_spin < 0) throw std::invalid_argument("species " + name + ": nuclear spin must be non-negative");
}

FieldConfig::FieldConfig(double b)
    : gauss(b)
{
    if (!(b >= 0.0)) throw std::invalid_argument("magnetic field must be >= 0 G");
}

double reduced_mass(double mass_a, double mass_b)
{
    if (!(mass_a > 0.0) || !(mass_b > 0.0)) throw std::invalid_argument("masses must be positive");
    if (std::isinf(mass_b)) return mass_a;
    if (std::isinf(mass_a)) return mass_b;
    return mass_a * mass_b / (mass_a + mass_b);
}

double reduced_mass(const AtomSpecies& a, const AtomSpecies& b) { return reduced_mass(a.mass_u, b.mass_u); }

std::vector<AtomSpecies> load_species_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open species file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }

    std::vector<AtomSpecies> out;
    for (const auto& rec : doc.at("species")) {
        AtomSpecies s;
        try {
            s.name = rec.at("name").get<std::string>();
            s.mass_u = read_quantity(rec, "mass", Unit::bohr);
            s.two_nuclear_spin = static_cast<int>(std::lround(2.0 * parse_half_integer(rec, "nuclear_spin")));
            s.a_hf = read_quantity(rec, "a_hf", Unit::hartree);
            s.g_s = rec.at("g_s").get<double>();
            s.g_i = rec.at("g_i").get<double>();
            s.source = rec.value("source", "");
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ": species record: " + e.what());
        }
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

AtomSpecies find_species(const std::vector<AtomSpecies>& table, std::string_view name)
{
    for (const auto& s : table)
        if (s.name == name) return s;
    throw std::invalid_argument("unknown species '" + std::string(name) + "'");
}

std::filesystem::path default_species_file() { return std::filesystem::path(CCMOL_DATA_DIR) / "species.json"; }

}  // namespace ccmol
