#pragma once

// N-channel radial bound-state solvers.
//
//   [-1/(2 mu) d^2/dR^2 + W(R)] psi(R) = E psi(R),   psi(R_min) = psi(R_max) = 0
//
// Two independent backends share the problem definition: a sinc-type DVR on
// the uniform grid (one dense symmetric eigensolve) and renormalized Numerov
// propagation with node counting. All quantities are in atomic units.

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccmol {

struct RadialGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t points = 0;

    RadialGrid() = default;
    /// Uniform grid including both end points; needs r_min > 0 and points >= 100.
    RadialGrid(double r_min, double r_max, std::size_t points);

    double spacing() const { return (r_max - r_min) / static_cast<double>(points - 1); }
    double r(std::size_t i) const { return r_min + static_cast<double>(i) * spacing(); }
    /// Nested refinement: every old point is kept, each interval split in `factor`.
    RadialGrid refined(std::size_t factor) const;
    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;
};

using MatrixFunction = std::function<Eigen::MatrixXd(double)>;

struct CoupledChannelProblem {
    std::size_t channels = 1;
    double mass = 1.0;        ///< reduced mass, electron masses
    MatrixFunction potential;  ///< W(R): symmetric channels x channels, hartree
};

struct BoundState {
    double energy = 0.0;
    RadialGrid grid;
    Eigen::MatrixXd psi;  ///< grid.points x channels
    std::string backend;

    std::size_t channels() const { return static_cast<std::size_t>(psi.cols()); }
    /// sum_c int psi_c^2 dR by the grid quadrature.
    double norm() const;
    /// Integrated density per channel.
    Eigen::VectorXd channel_weights() const;
    int dominant_channel() const;
    /// Sign changes of the channel function, ignoring values below `floor` x max.
    int nodes(std::size_t channel = 0, double floor = 1e-8) const;
};

struct EnergyWindow {
    double lo, hi;  ///< hartree, [lo, hi)
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolveStatus { ok, no_states };

struct SolveResult {
    SolveStatus status = SolveStatus::no_states;
    std::vector<BoundState> states;
    std::vector<std::string> warnings;
    RadialGrid grid;  ///< grid the states live on

    bool empty() const { return states.empty(); }
};

struct DvrOptions {
    /// When > 0 the problem is also solved on the doubled grid and a warning
    /// is recorded if any eigenvalue moves by more than this (hartree).
    double convergence_tol = 0.0;
};

struct PropagationOptions {
    int substeps = 0;          ///< propagation steps per grid interval; 0 picks from the local wavenumber
    bool richardson = true;    ///< combine step h and h/2 results, removing the h^4 error
    bool check_matching = true;
    double matching_tol = 1e-7;  ///< allowed relative energy shift when moving the matching point
};

SolveResult solve_dvr(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                      const DvrOptions& options = {});
SolveResult solve_propagation(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                              const PropagationOptions& options = {});

/// Number of eigenvalues of the discretised Numerov problem below `energy`
/// on the given grid (multichannel node count).
int count_states_below(const CoupledChannelProblem& problem, const RadialGrid& grid, double energy);

enum class Backend { dvr, propagation };
Backend parse_backend(const std::string& name);
std::string backend_name(Backend b);

struct SolverSettings {
    Backend backend = Backend::dvr;
    double refine_tol = 0.0;      ///< hartree; > 0 doubles the grid until levels move less than this
    std::size_t max_points = 8000;
    PropagationOptions propagation;
};

/// Solves on `grid`, doubling the point count until every level in the
/// window moves by less than settings.refine_tol (when set).
SolveResult solve(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                  const SolverSettings& settings);

/// sum_{c,c'} int bra_c(R) op_{cc'}(R) ket_c'(R) dR. op(R) must be
/// bra.channels() x ket.channels(); states must share a grid (see resample).
double matrix_element(const BoundState& bra, const MatrixFunction& op, const BoundState& ket);
double overlap(const BoundState& bra, const BoundState& ket);

/// Moves a state onto another grid by cubic-spline interpolation of every
/// channel function (zero outside the source grid), optionally renormalised.
BoundState resample(const BoundState& state, const RadialGrid& grid, bool renormalize = true);

/// CSV with columns R, psi_1..psi_N; '#' header records grid, energy, backend.
void write_wavefunction_csv(const BoundState& state, const std::filesystem::path& path,
                            const std::string& extra_header = {});

}  // namespace ccmol
