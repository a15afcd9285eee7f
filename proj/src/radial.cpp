#include "ccmol/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <lapacke.h>

#include "ccmol/io.hpp"
#include "ccmol/spline.hpp"

namespace ccmol {

RadialGrid::RadialGrid(double lo, double hi, std::size_t n) : r_min(lo), r_max(hi), points(n)
{
    if (!(lo > 0.0)) throw std::invalid_argument("radial grid needs R_min > 0");
    if (!(hi > lo)) throw std::invalid_argument("radial grid needs R_max > R_min");
    if (n < 100) throw std::invalid_argument("radial grid needs at least 100 points");
}

RadialGrid RadialGrid::refined(std::size_t factor) const
{
    if (factor == 0) throw std::invalid_argument("refinement factor must be positive");
    return RadialGrid(r_min, r_max, (points - 1) * factor + 1);
}

double BoundState::norm() const { return psi.squaredNorm() * grid.spacing(); }

Eigen::VectorXd BoundState::channel_weights() const
{
    return psi.colwise().squaredNorm().transpose() * grid.spacing();
}

int BoundState::dominant_channel() const
{
    Eigen::Index k = 0;
    channel_weights().maxCoeff(&k);
    return static_cast<int>(k);
}

int BoundState::nodes(std::size_t channel, double floor) const
{
    const auto col = psi.col(static_cast<Eigen::Index>(channel));
    const double cut = floor * col.cwiseAbs().maxCoeff();
    int n = 0;
    double last = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::abs(col(i)) <= cut) continue;
        if (last != 0.0 && (col(i) > 0) != (last > 0)) ++n;
        last = col(i);
    }
    return n;
}

Backend parse_backend(const std::string& name)
{
    if (name == "dvr") return Backend::dvr;
    if (name == "propagation" || name == "numerov") return Backend::propagation;
    throw std::invalid_argument("unknown solver backend '" + name + "' (dvr, propagation)");
}

std::string backend_name(Backend b) { return b == Backend::dvr ? "dvr" : "propagation"; }

namespace {

void check_problem(const CoupledChannelProblem& p, EnergyWindow w)
{
    if (p.channels == 0) throw std::invalid_argument("problem has no channels");
    if (!(p.mass > 0.0)) throw std::invalid_argument("reduced mass must be positive");
    if (!p.potential) throw std::invalid_argument("problem has no potential function");
    if (!(w.hi > w.lo)) throw std::invalid_argument("energy window must satisfy lo < hi");
}

Eigen::MatrixXd evaluate_w(const CoupledChannelProblem& p, double r)
{
    Eigen::MatrixXd w = p.potential(r);
    const auto n = static_cast<Eigen::Index>(p.channels);
    if (w.rows() != n || w.cols() != n)
        throw std::invalid_argument("potential matrix has the wrong shape at R = " + std::to_string(r));
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale)
        throw std::invalid_argument("potential matrix is not symmetric at R = " + std::to_string(r));
    return w;
}

// Largest component positive, then ascending energy with near-degenerate
// levels ordered by dominant channel.
void finalize(std::vector<BoundState>& states)
{
    for (auto& s : states) {
        Eigen::Index i = 0, j = 0;
        s.psi.cwiseAbs().maxCoeff(&i, &j);
        if (s.psi(i, j) < 0) s.psi = -s.psi;
    }
    std::stable_sort(states.begin(), states.end(), [](const BoundState& a, const BoundState& b) {
        const double tol = 1e-12 * std::max(1.0, std::max(std::abs(a.energy), std::abs(b.energy)));
        if (std::abs(a.energy - b.energy) <= tol) return a.dominant_channel() < b.dominant_channel();
        return a.energy < b.energy;
    });
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

// Largest shift of any coarse level against the nearest level of the fine solution.
double max_level_shift(const std::vector<BoundState>& coarse, const std::vector<BoundState>& fine)
{
    double worst = 0.0;
    for (const auto& c : coarse) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : fine) best = std::min(best, std::abs(f.energy - c.energy));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sine DVR on the open interval, hard walls at both grid ends.

SolveResult solve_dvr(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                      const DvrOptions& options)
{
    check_problem(problem, window);
    const std::size_t nc = problem.channels;
    const std::size_t np = grid.points - 2;
    const std::size_t dim = np * nc;
    const double intervals = static_cast<double>(grid.points - 1);
    const double length = grid.r_max - grid.r_min;
    const double pref = std::numbers::pi * std::numbers::pi / (4.0 * problem.mass * length * length);

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 1; i <= np; ++i) {
        for (std::size_t j = 1; j <= i; ++j) {
            double t;
            if (i == j) {
                const double s = std::sin(std::numbers::pi * i / intervals);
                t = (2.0 * intervals * intervals + 1.0) / 3.0 - 1.0 / (s * s);
            } else {
                const double sm = std::sin(std::numbers::pi * double(i - j) / (2.0 * intervals));
                const double sp = std::sin(std::numbers::pi * double(i + j) / (2.0 * intervals));
                t = ((i - j) % 2 == 0 ? 1.0 : -1.0) * (1.0 / (sm * sm) - 1.0 / (sp * sp));
            }
            t *= pref;
            for (std::size_t c = 0; c < nc; ++c) {
                const auto a = static_cast<Eigen::Index>((i - 1) * nc + c), b = static_cast<Eigen::Index>((j - 1) * nc + c);
                h(a, b) = t;
                h(b, a) = t;
            }
        }
        const Eigen::MatrixXd w = evaluate_w(problem, grid.r(i));
        const auto off = static_cast<Eigen::Index>((i - 1) * nc);
        h.block(off, off, static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(nc)) += w;
    }

    // Householder tridiagonalisation, MRRR on the tridiagonal restricted to
    // the window, and back-transformation of only the selected vectors.
    const auto n = static_cast<lapack_int>(dim);
    const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(h);
    Eigen::VectorXd diag = tri.diagonal();
    Eigen::VectorXd sub(static_cast<Eigen::Index>(dim));
    sub.head(static_cast<Eigen::Index>(dim) - 1) = tri.subDiagonal();
    sub(static_cast<Eigen::Index>(dim) - 1) = 0.0;
    Eigen::VectorXd evals(static_cast<Eigen::Index>(dim));
    std::vector<lapack_int> support(2 * dim);
    lapack_int found = 0, tryrac = 1;
    double query = 0.0;
    lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'V', n, diag.data(), sub.data(), window.lo, window.hi, 0, 0,
                                     &found, evals.data(), &query, n, -1, support.data(), &tryrac);
    if (info != 0) throw SolverError("LAPACK dstemr workspace query failed with code " + std::to_string(info));
    const auto columns = std::max<lapack_int>(1, static_cast<lapack_int>(query));
    Eigen::MatrixXd z(static_cast<Eigen::Index>(dim), columns);
    info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'V', n, diag.data(), sub.data(), window.lo, window.hi, 0, 0, &found,
                          evals.data(), z.data(), n, columns, support.data(), &tryrac);
    if (info != 0) throw SolverError("LAPACK dstemr failed with code " + std::to_string(info));

    SolveResult result;
    result.grid = grid;
    if (found == 0) return result;
    const Eigen::MatrixXd evecs = tri.matrixQ() * z.leftCols(found);

    const double scale = 1.0 / std::sqrt(grid.spacing());
    for (lapack_int k = 0; k < found; ++k) {
        BoundState s;
        s.energy = evals(k);
        s.grid = grid;
        s.backend = "dvr";
        s.psi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.points), static_cast<Eigen::Index>(nc));
        for (std::size_t i = 1; i <= np; ++i)
            for (std::size_t c = 0; c < nc; ++c)
                s.psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    evecs(static_cast<Eigen::Index>((i - 1) * nc + c), k) * scale;
        if (s.energy >= window.lo && s.energy < window.hi) result.states.push_back(std::move(s));
    }
    finalize(result.states);
    result.status = result.states.empty() ? SolveStatus::no_states : SolveStatus::ok;

    if (options.convergence_tol > 0.0 && !result.states.empty()) {
        const RadialGrid fine = grid.refined(2);
        const SolveResult check = solve_dvr(problem, fine, window, DvrOptions{});
        const double shift = max_level_shift(result.states, check.states);
        if (shift > options.convergence_tol)
            result.warnings.push_back("grid too coarse: doubling the point count to " + std::to_string(fine.points) +
                                      " moves an eigenvalue by " + fmt(shift) + " hartree");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Renormalized Numerov propagation.

namespace {

// channel blocks up to this size use stack-allocated matrices
constexpr int kStackChannels = 24;

template <int N, int M = N>
struct Numerov {
    using Mat = Eigen::Matrix<double, N, N, 0, M, M>;
    using Vec = Eigen::Matrix<double, N, 1, 0, M, 1>;

    const CoupledChannelProblem& problem;
    RadialGrid grid;
    int sub;
    std::size_t nc, nf;
    double h;
    std::vector<Mat> w;  // on the fine grid
    std::size_t match = 0;
    std::size_t alt_match = 0;

    Numerov(const CoupledChannelProblem& p, const RadialGrid& g, int substeps)
        : problem(p), grid(g), sub(substeps), nc(p.channels)
    {
        nf = (g.points - 1) * static_cast<std::size_t>(sub) + 1;
        h = g.spacing() / sub;
        w.resize(nf);
        double deepest = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < nf; ++n) {
            const double r = g.r_min + h * static_cast<double>(n);
            w[n] = evaluate_w(p, r);
            if (n > 0 && n + 1 < nf && n % static_cast<std::size_t>(sub) == 0) {
                const double lo = min_eig(w[n]);
                if (lo < deepest) {
                    deepest = lo;
                    match = n;
                }
            }
        }
        if (match == 0) match = nf / 2;
        // Alternative matching point for the sensitivity check: halfway to the outer wall.
        alt_match = std::min(nf - 3, match + std::max<std::size_t>(2, (nf - match) / 4));
    }

    static double min_eig(const Mat& m)
    {
        if constexpr (N == 1) {
            return m(0, 0);
        } else {
            Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
            return es.eigenvalues()(0);
        }
    }

    Mat identity() const { return Mat::Identity(nc, nc); }

    Mat u_matrix(std::size_t n, double e) const
    {
        const double c = h * h * problem.mass / 6.0;
        Mat one_minus_t = identity() - c * (w[n] - e * identity());
        if constexpr (N == 1) {
            const double d = one_minus_t(0, 0);
            if (!(d > 0.0)) throw SolverError(coarse_message(n));
            Mat u;
            u(0, 0) = 12.0 / d - 10.0;
            return u;
        } else {
            Eigen::LLT<Mat> llt(one_minus_t);
            if (llt.info() != Eigen::Success) throw SolverError(coarse_message(n));
            return 12.0 * llt.solve(identity()) - 10.0 * identity();
        }
    }

    std::string coarse_message(std::size_t n) const
    {
        return "propagation step too coarse near R = " + fmt(grid.r_min + h * static_cast<double>(n)) +
               " a0 (increase points or substeps, or raise R_min)";
    }

    // Negative-eigenvalue count of d and its inverse.
    static int inertia_inverse(const Mat& d, Mat& inv)
    {
        if constexpr (N == 1) {
            inv(0, 0) = 1.0 / d(0, 0);
            return d(0, 0) < 0.0 ? 1 : 0;
        } else {
            // Sylvester: the pivoted LDL^T factor has the inertia of d
            Eigen::LDLT<Mat> ldlt(d);
            const auto dv = ldlt.vectorD();
            int neg = 0;
            for (Eigen::Index i = 0; i < dv.size(); ++i) neg += dv(i) < 0.0;
            inv = ldlt.solve(Mat::Identity(d.rows(), d.cols()));
            return neg;
        }
    }

    int count(double e) const
    {
        Mat inv = Mat::Zero(nc, nc);
        int neg = 0;
        for (std::size_t n = 1; n + 1 < nf; ++n) {
            const Mat d = u_matrix(n, e) - inv;
            neg += inertia_inverse(d, inv);
        }
        return neg;
    }

    struct Matching {
        int base = 0;
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        int total() const
        {
            int neg = 0;
            for (Eigen::Index i = 0; i < values.size(); ++i) neg += values(i) < 0.0;
            return base + neg;
        }
    };

    // Pivots from both ends toward the matching point m; optional storage of
    // the inverse ratio matrices for wavefunction reconstruction.
    Matching matching(double e, std::size_t m, std::vector<Mat>* out_inv = nullptr,
                      std::vector<Mat>* in_inv = nullptr) const
    {
        Matching res;
        Mat inv = Mat::Zero(nc, nc);
        Mat dm;
        if (out_inv) out_inv->assign(nf, Mat::Zero(nc, nc));
        if (in_inv) in_inv->assign(nf, Mat::Zero(nc, nc));
        for (std::size_t n = 1; n <= m; ++n) {
            const Mat d = u_matrix(n, e) - inv;
            if (n == m) {
                dm = d;
                break;
            }
            res.base += inertia_inverse(d, inv);
            if (out_inv) (*out_inv)[n] = inv;
        }
        Mat inv_in = Mat::Zero(nc, nc);
        for (std::size_t n = nf - 2; n > m; --n) {
            const Mat d = u_matrix(n, e) - inv_in;
            res.base += inertia_inverse(d, inv_in);
            if (in_inv) (*in_inv)[n] = inv_in;
        }
        const Mat mm = dm - inv_in;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(0.5 * (mm + mm.transpose())));
        res.values = es.eigenvalues();
        res.vectors = es.eigenvectors();
        return res;
    }

    // psi on the fine grid for the converged energy, eigenvector `j` of the matching matrix.
    Eigen::MatrixXd wavefunction(double e, std::size_t m, int j) const
    {
        std::vector<Mat> out_inv, in_inv;
        const Matching mt = matching(e, m, &out_inv, &in_inv);
        std::vector<Vec> f(nf, Vec::Zero(nc));
        f[m] = mt.vectors.col(j);
        for (std::size_t n = m - 1; n >= 1; --n) f[n] = out_inv[n] * f[n + 1];
        for (std::size_t n = m + 1; n + 1 < nf; ++n) f[n] = in_inv[n] * f[n - 1];

        const double c = h * h * problem.mass / 6.0;
        Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(nc));
        for (std::size_t n = 1; n + 1 < nf; ++n) {
            const Mat one_minus_t = identity() - c * (w[n] - e * identity());
            const Vec p = one_minus_t.ldlt().solve(f[n]);
            psi.row(static_cast<Eigen::Index>(n)) = p.transpose();
        }
        return psi;
    }
};

struct LevelResult {
    double energy;
    int vector_index;
    std::size_t match;
};

template <int N, int M>
std::optional<LevelResult> find_level_at(const Numerov<N, M>& nv, int k, double lo, double hi, std::size_t m)
{
    const double span = hi - lo;
    double a = lo, b = hi;
    int ca = nv.count(a), cb = nv.count(b);
    for (int guard = 0; ca > k && guard < 60; ++guard) {
        a -= span * (1 << std::min(guard, 20));
        ca = nv.count(a);
    }
    for (int guard = 0; cb <= k && guard < 60; ++guard) {
        b += span * (1 << std::min(guard, 20));
        cb = nv.count(b);
    }
    if (ca > k || cb <= k) throw SolverError("could not bracket level " + std::to_string(k));

    auto ma = nv.matching(a, m), mb = nv.matching(b, m);
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    for (int iter = 0; iter < 400; ++iter) {
        const bool tight = (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
        if (ma.total() == k && mb.total() >= k + 1 && ma.base == mb.base) {
            const int j = k - ma.base;
            if (j >= 0 && j < static_cast<int>(nv.nc)) {
                auto f = [&](double e) { return nv.matching(e, m).values(j); };
                double root;
                if (tight) {
                    root = 0.5 * (a + b);
                } else {
                    boost::uintmax_t max_iter = 200;
                    // the matching eigenvalue is noisy below ~1e-13 relative
                    auto close = [](double x, double y) {
                        return std::abs(x - y) <= 1e-13 * std::max(std::abs(x), std::abs(y)) + 1e-300;
                    };
                    auto r = boost::math::tools::toms748_solve(f, a, b, ma.values(j), mb.values(j), close, max_iter);
                    root = 0.5 * (r.first + r.second);
                }
                // Accept only if the count really steps at the root.
                const double d = std::max(1e-10 * scale, 1e-300);
                if (tight || (nv.count(std::max(a, root - d)) <= k && nv.count(std::min(b, root + d)) >= k + 1)) {
                    const auto mr = nv.matching(root, m);
                    int jj = k - mr.base;
                    jj = std::clamp(jj, 0, static_cast<int>(nv.nc) - 1);
                    // Pick the matching eigenvalue nearest zero among the admissible ones.
                    if (mr.base != ma.base) {
                        Eigen::Index best = 0;
                        mr.values.cwiseAbs().minCoeff(&best);
                        jj = static_cast<int>(best);
                    }
                    return LevelResult{root, jj, m};
                }
            }
        }
        if (tight) break;
        const double mid = 0.5 * (a + b);
        auto mm = nv.matching(mid, m);
        if (mm.total() <= k) {
            a = mid;
            ma = std::move(mm);
        } else {
            b = mid;
            mb = std::move(mm);
        }
    }
    return std::nullopt;
}

// A node sitting on the matching point turns the root into a pole there,
// so a second matching point is tried before giving up.
template <int N, int M>
LevelResult find_level(const Numerov<N, M>& nv, int k, double lo, double hi)
{
    for (std::size_t m : {nv.match, nv.alt_match})
        if (auto lev = find_level_at(nv, k, lo, hi, m)) return *lev;
    throw SolverError("non-bracketed root for level " + std::to_string(k));
}

template <int N, int M>
double matching_shift(const Numerov<N, M>& nv, double e, int k)
{
    const std::size_t m2 = nv.alt_match;
    if (m2 == nv.match || m2 < 2) return 0.0;
    const auto m0 = nv.matching(e, m2);
    const int j = k - m0.base;
    if (j < 0 || j >= static_cast<int>(nv.nc)) return 0.0;
    const double eps = std::max(1e-7 * std::abs(e), 1e-12);
    const auto mp = nv.matching(e + eps, m2), mn = nv.matching(e - eps, m2);
    if (mp.base != m0.base || mn.base != m0.base) return 0.0;
    const double slope = (mp.values(j) - mn.values(j)) / (2.0 * eps);
    if (slope == 0.0) return 0.0;
    return m0.values(j) / slope;
}

int choose_substeps(const CoupledChannelProblem& p, const RadialGrid& g, double e_hi)
{
    double kmax = 0.0, wall = 0.0;
    for (std::size_t i = 1; i + 1 < g.points; ++i) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(evaluate_w(p, g.r(i)), Eigen::EigenvaluesOnly);
        kmax = std::max(kmax, std::sqrt(std::max(0.0, 2.0 * p.mass * (e_hi - es.eigenvalues()(0)))));
        wall = std::max(wall, es.eigenvalues()(es.eigenvalues().size() - 1) - e_hi);
    }
    const double dx = g.spacing();
    int s = static_cast<int>(std::ceil(dx * kmax / 0.2));
    // keep h^2 mu (W - E) / 6 well below one at the walls
    const double hmax = std::sqrt(0.5 * 6.0 / (p.mass * std::max(wall, 1e-300)));
    s = std::max(s, static_cast<int>(std::ceil(dx / hmax)));
    return std::clamp(s, 1, 4096);
}

struct PropagationPass {
    std::vector<double> energies;
    std::vector<Eigen::MatrixXd> psi;  // coarse grid
    std::vector<std::string> warnings;
};

template <int N, int M>
PropagationPass run_pass(const CoupledChannelProblem& problem, const RadialGrid& grid, int sub, int k_lo, int k_hi,
                         double lo, double hi, const PropagationOptions& opt, bool with_psi,
                         const std::vector<double>* hints = nullptr)
{
    Numerov<N, M> nv(problem, grid, sub);
    PropagationPass pass;
    for (int k = k_lo; k < k_hi; ++k) {
        double a = lo, b = hi;
        if (hints) {
            const double e = (*hints)[static_cast<std::size_t>(k - k_lo)];
            const double d = 1e-4 * (hi - lo) + 1e-9 * std::abs(e);
            a = e - d;
            b = e + d;
        }
        const auto lev = find_level(nv, k, a, b);
        pass.energies.push_back(lev.energy);
        if (opt.check_matching) {
            const double shift = matching_shift(nv, lev.energy, k);
            const double scale = std::max(std::abs(lev.energy), hi - lo);
            if (std::abs(shift) > opt.matching_tol * scale)
                throw SolverError("matching-point sensitivity for level " + std::to_string(k) + ": energy moves by " +
                                  fmt(shift) + " hartree");
        }
        if (with_psi) {
            const Eigen::MatrixXd fine = nv.wavefunction(lev.energy, lev.match, lev.vector_index);
            Eigen::MatrixXd coarse(static_cast<Eigen::Index>(grid.points), fine.cols());
            for (std::size_t i = 0; i < grid.points; ++i)
                coarse.row(static_cast<Eigen::Index>(i)) = fine.row(static_cast<Eigen::Index>(i * sub));
            const double norm = std::sqrt(coarse.squaredNorm() * grid.spacing());
            if (!(norm > 0.0) || !std::isfinite(norm))
                throw SolverError("wavefunction reconstruction failed for level " + std::to_string(k));
            pass.psi.push_back(coarse / norm);
        }
    }
    return pass;
}

template <int N, int M = N>
SolveResult propagate(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                      const PropagationOptions& opt)
{
    const int sub = opt.substeps > 0 ? opt.substeps : choose_substeps(problem, grid, window.hi);
    const int fine_sub = opt.richardson ? 2 * sub : sub;

    SolveResult result;
    result.grid = grid;
    int k_lo, k_hi;
    {
        Numerov<N, M> nv(problem, grid, fine_sub);
        k_lo = nv.count(window.lo);
        k_hi = nv.count(window.hi);
    }
    if (k_hi <= k_lo) return result;

    PropagationPass fine = run_pass<N, M>(problem, grid, fine_sub, k_lo, k_hi, window.lo, window.hi, opt, true);
    std::vector<double> energies = fine.energies;
    if (opt.richardson) {
        PropagationOptions coarse_opt = opt;
        coarse_opt.check_matching = false;
        const PropagationPass coarse =
            run_pass<N, M>(problem, grid, sub, k_lo, k_hi, window.lo, window.hi, coarse_opt, false, &fine.energies);
        for (std::size_t i = 0; i < energies.size(); ++i)
            energies[i] = (16.0 * fine.energies[i] - coarse.energies[i]) / 15.0;
    }
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (!(energies[i] >= window.lo && energies[i] < window.hi)) continue;
        BoundState s;
        s.energy = energies[i];
        s.grid = grid;
        s.backend = "propagation";
        s.psi = std::move(fine.psi[i]);
        result.states.push_back(std::move(s));
    }
    finalize(result.states);
    result.status = result.states.empty() ? SolveStatus::no_states : SolveStatus::ok;
    return result;
}

}  // namespace

SolveResult solve_propagation(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                              const PropagationOptions& options)
{
    check_problem(problem, window);
    switch (problem.channels) {
        case 1: return propagate<1>(problem, grid, window, options);
        case 2: return propagate<2>(problem, grid, window, options);
        case 3: return propagate<3>(problem, grid, window, options);
        default:
            if (problem.channels <= kStackChannels)
                return propagate<Eigen::Dynamic, kStackChannels>(problem, grid, window, options);
            return propagate<Eigen::Dynamic>(problem, grid, window, options);
    }
}

int count_states_below(const CoupledChannelProblem& problem, const RadialGrid& grid, double energy)
{
    check_problem(problem, {energy, energy + 1.0});
    const int sub = choose_substeps(problem, grid, energy);
    switch (problem.channels) {
        case 1: return Numerov<1>(problem, grid, sub).count(energy);
        case 2: return Numerov<2>(problem, grid, sub).count(energy);
        case 3: return Numerov<3>(problem, grid, sub).count(energy);
        default:
            if (problem.channels <= kStackChannels)
                return Numerov<Eigen::Dynamic, kStackChannels>(problem, grid, sub).count(energy);
            return Numerov<Eigen::Dynamic>(problem, grid, sub).count(energy);
    }
}

SolveResult solve(const CoupledChannelProblem& problem, const RadialGrid& grid, EnergyWindow window,
                  const SolverSettings& settings)
{
    auto once = [&](const RadialGrid& g) {
        return settings.backend == Backend::dvr ? solve_dvr(problem, g, window)
                                                : solve_propagation(problem, g, window, settings.propagation);
    };
    SolveResult res = once(grid);
    if (!(settings.refine_tol > 0.0) || res.states.empty()) return res;
    RadialGrid g = grid;
    while (true) {
        const RadialGrid next = g.refined(2);
        if (next.points > settings.max_points) {
            res.warnings.push_back("grid refinement stopped at " + std::to_string(g.points) +
                                   " points before reaching the level tolerance");
            return res;
        }
        SolveResult finer = once(next);
        const double shift = max_level_shift(res.states, finer.states);
        finer.warnings.insert(finer.warnings.begin(), res.warnings.begin(), res.warnings.end());
        res = std::move(finer);
        g = next;
        if (shift < settings.refine_tol && !res.states.empty()) return res;
    }
}

double matrix_element(const BoundState& bra, const MatrixFunction& op, const BoundState& ket)
{
    if (!(bra.grid == ket.grid)) throw std::invalid_argument("matrix_element needs both states on one grid");
    const auto nb = static_cast<Eigen::Index>(bra.channels()), nk = static_cast<Eigen::Index>(ket.channels());
    double sum = 0.0;
    for (std::size_t i = 0; i < bra.grid.points; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (bra.psi.row(ii).isZero(0.0) || ket.psi.row(ii).isZero(0.0)) continue;
        const Eigen::MatrixXd o = op(bra.grid.r(i));
        if (o.rows() != nb || o.cols() != nk)
            throw std::invalid_argument("operator is " + std::to_string(o.rows()) + "x" + std::to_string(o.cols()) +
                                        " but the states have " + std::to_string(nb) + " and " + std::to_string(nk) +
                                        " channels");
        sum += bra.psi.row(ii) * o * ket.psi.row(ii).transpose();
    }
    return sum * bra.grid.spacing();
}

double overlap(const BoundState& bra, const BoundState& ket)
{
    if (!(bra.grid == ket.grid)) throw std::invalid_argument("overlap needs both states on one grid");
    if (bra.channels() != ket.channels()) throw std::invalid_argument("overlap needs equal channel counts");
    return (bra.psi.array() * ket.psi.array()).sum() * bra.grid.spacing();
}

BoundState resample(const BoundState& state, const RadialGrid& grid, bool renormalize)
{
    BoundState out;
    out.energy = state.energy;
    out.grid = grid;
    out.backend = state.backend;
    const auto nc = static_cast<Eigen::Index>(state.channels());
    out.psi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.points), nc);
    std::vector<double> x(state.grid.points);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = state.grid.r(i);
    for (Eigen::Index c = 0; c < nc; ++c) {
        std::vector<double> y(state.psi.col(c).data(), state.psi.col(c).data() + state.psi.rows());
        const CubicSpline s(x, y);
        for (std::size_t i = 0; i < grid.points; ++i) {
            const double r = grid.r(i);
            if (r >= x.front() && r <= x.back()) out.psi(static_cast<Eigen::Index>(i), c) = s(r);
        }
    }
    const double n = out.norm();
    if (renormalize && n > 0.0) out.psi /= std::sqrt(n);
    return out;
}

void write_wavefunction_csv(const BoundState& state, const std::filesystem::path& path, const std::string& extra_header)
{
    std::ostringstream os;
    os << "# grid r_min_a0=" << format_double(state.grid.r_min) << " r_max_a0=" << format_double(state.grid.r_max)
       << " points=" << state.grid.points << "\n";
    os << "# energy_hartree=" << format_double(state.energy) << "\n";
    os << "# backend=" << state.backend << "\n";
    if (!extra_header.empty()) {
        std::istringstream in(extra_header);
        for (std::string line; std::getline(in, line);) os << "# " << line << "\n";
    }
    os << "# columns: R_a0";
    for (std::size_t c = 0; c < state.channels(); ++c) os << ",psi_" << c + 1;
    os << "\n";
    for (std::size_t i = 0; i < state.grid.points; ++i) {
        os << format_double(state.grid.r(i));
        for (std::size_t c = 0; c < state.channels(); ++c)
            os << "," << format_double(state.psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
        os << "\n";
    }
    atomic_write(path, os.str());
}

}  // namespace ccmol
