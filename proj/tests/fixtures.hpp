#pragma once

#include <functional>

#include "ccmol/ground.hpp"
#include "ccmol/units.hpp"

namespace fixture {

inline const ccmol::AtomSpecies& potassium()
{
    static const auto s = ccmol::find_species(ccmol::load_species_file(ccmol::default_species_file()), "K40");
    return s;
}

inline const ccmol::AtomSpecies& rubidium()
{
    static const auto s = ccmol::find_species(ccmol::load_species_file(ccmol::default_species_file()), "Rb87");
    return s;
}

inline const ccmol::HalfInt kIK = ccmol::HalfInt::from_twice(8);
inline const ccmol::HalfInt kIRb = ccmol::HalfInt::from_twice(3);

inline double krb_mass_au()
{
    return ccmol::reduced_mass(potassium(), rubidium()) * ccmol::PhysicalConstants::amu_in_me;
}

inline ccmol::CoupledChannelProblem one_channel(double mass, std::function<double(double)> v)
{
    ccmol::CoupledChannelProblem p;
    p.mass = mass;
    p.potential = [v](double r) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = v(r);
        return m;
    };
    return p;
}

}  // namespace fixture
