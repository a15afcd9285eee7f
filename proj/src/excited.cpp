#include "ccmol/excited.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ccmol/units.hpp"

namespace ccmol {

ExcitedModel ExcitedModel::builtin()
{
    const auto table = load_species_file(default_species_file());
    return from_curves(builtin_model_curves(),
                       reduced_mass(find_species(table, "K40"), find_species(table, "Rb87")) * PhysicalConstants::amu_in_me);
}

ExcitedModel ExcitedModel::from_curves(const ModelCurves& c, double mass)
{
    ExcitedModel m;
    m.sigma3 = c.sigma3;
    m.pi3 = c.pi3;
    m.pi1 = c.pi1;
    m.xi_sigma_pi3 = c.xi_sigma_pi3;
    m.xi_sigma_pi1 = c.xi_sigma_pi1;
    m.xi_pi1_pi3 = c.xi_pi1_pi3;
    m.fine_structure = c.fine_structure;
    m.mass = mass;
    return m;
}

ExcitedModel ExcitedModel::uncoupled() const
{
    ExcitedModel m = *this;
    m.xi_sigma_pi3 = RFunction::zero("xi_sigma_pi3");
    m.xi_sigma_pi1 = RFunction::zero("xi_sigma_pi1");
    m.xi_pi1_pi3 = RFunction::zero("xi_pi1_pi3");
    return m;
}

Eigen::Matrix3d assemble_excited_W(const ExcitedModel& model, double r)
{
    if (!(r > 0.0)) throw std::domain_error("excited potential matrix needs R > 0");
    if (!(model.mass > 0.0)) throw std::invalid_argument("excited model needs a positive reduced mass");
    const double rot = model.J * (model.J + 1.0) / (2.0 * model.mass * r * r);
    Eigen::Matrix3d w;
    w(kSigma3, kSigma3) = model.sigma3(r) + rot;
    w(kPi3, kPi3) = model.pi3(r) + rot;
    w(kPi1, kPi1) = model.pi1(r) + rot;
    w(kSigma3, kPi3) = w(kPi3, kSigma3) = model.xi_sigma_pi3(r);
    w(kSigma3, kPi1) = w(kPi1, kSigma3) = model.xi_sigma_pi1(r);
    w(kPi1, kPi3) = w(kPi3, kPi1) = model.xi_pi1_pi3(r);
    return w;
}

CoupledChannelProblem excited_problem(const ExcitedModel& model)
{
    auto shared = std::make_shared<ExcitedModel>(model);
    CoupledChannelProblem p;
    p.channels = 3;
    p.mass = model.mass;
    p.potential = [shared](double r) -> Eigen::MatrixXd { return assemble_excited_W(*shared, r); };
    return p;
}

std::array<double, 3> adiabatic_minima(const ExcitedModel& model, double r_lo, double r_hi, double step)
{
    std::array<double, 3> out;
    out.fill(std::numeric_limits<double>::infinity());
    for (double r = r_lo; r <= r_hi; r += step) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(assemble_excited_W(model, r), Eigen::EigenvaluesOnly);
        for (int k = 0; k < 3; ++k) out[k] = std::min(out[k], es.eigenvalues()(k));
    }
    return out;
}

ChannelFractions channel_fractions(const BoundState& state)
{
    if (state.channels() != 3) throw std::invalid_argument("excited-state fractions need a three-channel state");
    const Eigen::VectorXd w = state.channel_weights();
    const double total = w.sum();
    if (!(total > 0.0)) throw std::invalid_argument("state has zero norm");
    return {w(kSigma3) / total, w(kPi3) / total, w(kPi1) / total};
}

ExcitedLevels excited_levels(const ExcitedModel& model, const RadialGrid& grid, EnergyWindow window,
                             const SolverSettings& settings)
{
    const double upper_limit = std::max({model.sigma3.asymptote(), model.pi3.asymptote(), model.pi1.asymptote()}) +
                               std::abs(model.fine_structure) / 3.0;
    if (window.hi > upper_limit)
        throw std::invalid_argument("excited energy window must stay below the upper dissociation limit");
    const SolveResult res = solve(excited_problem(model), grid, window, settings);
    ExcitedLevels out;
    out.warnings = res.warnings;
    for (const auto& s : res.states) out.levels.push_back({s, channel_fractions(s)});
    return out;
}

double transition_dipole(const BoundState& ground, const BoundState& excited, const ChannelDipoles& d)
{
    if (ground.channels() != 1) throw std::invalid_argument("transition_dipole needs a single-channel ground level");
    if (excited.channels() != 3) throw std::invalid_argument("transition_dipole needs a three-channel excited level");
    const BoundState g = ground.grid == excited.grid ? ground : resample(ground, excited.grid, false);

    const std::array<const std::optional<RFunction>*, 3> by_channel{&d.sigma3, &d.pi3, &d.pi1};
    double sum = 0.0;
    const double h = excited.grid.spacing();
    for (int c = 0; c < 3; ++c) {
        const auto& f = *by_channel[c];
        if (!f || f->is_zero()) continue;
        double part = 0.0;
        for (std::size_t i = 0; i < excited.grid.points; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double prod = g.psi(ii, 0) * excited.psi(ii, c);
            if (prod != 0.0) part += prod * (*f)(excited.grid.r(i));
        }
        sum += part * h;
    }
    return std::abs(sum);
}

std::vector<SpectrumRow> spectrum_report(const ExcitedLevels& levels, const ChannelDipoles& d, const BoundState& ground)
{
    std::vector<SpectrumRow> rows;
    for (const auto& l : levels.levels) rows.push_back({l.state.energy, l.fractions, transition_dipole(ground, l.state, d)});
    std::stable_sort(rows.begin(), rows.end(), [](const SpectrumRow& a, const SpectrumRow& b) { return a.energy < b.energy; });
    return rows;
}

}  // namespace ccmol
