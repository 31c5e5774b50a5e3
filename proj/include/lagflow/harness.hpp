#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lagflow/pde.hpp"
#include "lagflow/rng.hpp"
#include "lagflow/symmat.hpp"

namespace lagflow {

enum class Bound {
    AtMost,  // value <= threshold
    AtLeast, // value >= threshold
    Above,   // value > threshold
    Within,  // threshold <= value <= upper
    Info,    // recorded, never fails
};

struct Metric {
    std::string name;
    double value = 0.0;
    Bound bound = Bound::Info;
    double threshold = 0.0;
    double upper = 0.0;
    bool pass = true;

    /// Threshold column text, e.g. "<=1e-10", ">=-1e-12", "in[1.7,2.3]"; empty for Info.
    std::string threshold_text() const;
};

/// Outcome of one experiment. `pass` is true iff every metric passes.
struct ExperimentReport {
    std::string experiment_id;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> parameters;
    std::vector<Metric> metrics;
    std::vector<std::string> notes;
    bool pass = true;
    double runtime_ms = 0.0;

    void check(std::string name, double value, Bound bound, double threshold, double upper = 0.0);
    void info(std::string name, double value);
    void parameter(std::string key, std::string value) { parameters[std::move(key)] = std::move(value); }
    void parameter(std::string key, double value);
    const Metric& metric(const std::string& name) const;
};

// ------------------------------------------------------------- random matrices

/// Symmetric matrix with independent N(0, scale^2) entries on and above the
/// diagonal (drawn row by row), mirrored below. Throws unless scale > 0.
SymMat random_symmetric(std::size_t n, double scale, CounterRng& rng);

struct OrderedPair {
    SymMat x; // y + l l^T
    SymMat y;
};

/// Y = random_symmetric(n, scale); L lower triangular with N(0, scale) entries
/// (standard deviation sqrt(scale), so L L^T is on the same scale as Y);
/// X = Y + L L^T. X >= Y holds by construction.
OrderedPair random_ordered_pair(std::size_t n, double scale, CounterRng& rng);

// ----------------------------------------------------------- hypothesis suite

struct HypothesisSuiteOptions {
    std::size_t n = 2;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::vector<double> scales{0.1, 1.0, 10.0};
    std::vector<double> alphas{0.25, 0.5, 0.9};
    /// Trials per scale that also run the finite-difference and quadrature checks.
    std::size_t calculus_trials = 1000;
    int panels = 256;
    /// Scales at or below this use `panels`; larger ones use `fine_panels`.
    double quadrature_scale_limit = 1.0;
    int fine_panels = 4096;
    /// Degenerate mode: every pair has X == Y.
    bool equal_pairs = false;
    unsigned threads = 1;
};

/// Monotonicity, trace and Holder bounds, Lagrangian-angle range, determinant
/// form, path derivative against central differences, integral identity and
/// sorted-eigenvalue monotonicity, over seeded random pairs at every scale.
///
/// Trial k at scale index s draws from CounterRng(seed, (n << 48) | (s << 40) | k).
ExperimentReport run_hypothesis_suite(const HypothesisSuiteOptions& options);

// ----------------------------------------------------------- PDE experiments

/// 1/2 x^T A x, the initial datum of the quadratic exact solution.
double quadratic_form(const SymMat& a, const Point& x);

/// Quadratic data with exact Dirichlet values 1/2 x^T A x + t F(A); interior sup
/// error at T must stay within kExactSolutionTolerance.
ExperimentReport quadratic_exactness_experiment(const SymMat& a, const Grid& grid, double horizon,
                                                double cfl_fraction);

struct ComparisonSetup {
    std::string experiment_id = "comparison";
    std::uint64_t seed = 0;
    Grid grid = Grid::line(64, 0.1);
    BoundaryCondition bc = BoundaryCondition::periodic();
    std::function<double(const Point&)> lower; // u0
    std::function<double(const Point&)> upper; // v0, >= u0 everywhere
    double horizon = 1.0;
    double cfl_fraction = 0.9;
};

/// Evolves both data with the same boundary treatment and records the minimum
/// gap at every step. Throws PreconditionError on a negative initial gap.
ExperimentReport comparison_experiment(const ComparisonSetup& setup);

/// Smooth periodic random function: sum of a few Fourier modes with seeded
/// amplitudes and phases over the periodic box of `grid`.
std::function<double(const Point&)> random_periodic_function(const Grid& grid, CounterRng& rng);

/// Compactly supported bump a * (1 - r^2/w^2)^3 with seeded centre, width and
/// height, supported strictly inside [0,1]^2.
std::function<double(const Point&)> random_bump(CounterRng& rng);

/// 1D periodic ordered pairs: u0 random smooth, v0 = u0 + non-negative smooth
/// perturbation touching zero somewhere.
ExperimentReport comparison_suite_1d(std::size_t pairs, std::uint64_t seed, double cfl_fraction = 0.9,
                                     double horizon = 1.0);

/// 2D zero-Dirichlet runs with u0 = -bump, v0 = +bump. Empirical evidence only:
/// the narrow stencil is not monotone once the discrete Hessian has cross terms.
ExperimentReport comparison_suite_2d(std::size_t runs, std::uint64_t seed, double horizon = 0.25);

struct ConvergenceSetup {
    std::string experiment_id = "self_convergence";
    std::uint64_t seed = 0;
    /// Coarsest periodic grid; finer levels halve h and double the counts.
    Grid coarse = Grid::line(32, 0.2);
    std::function<double(const Point&)> initial;
    double horizon = 0.5;
    std::size_t levels = 4;
    double cfl_fraction = 0.9;
    /// Two fractions compared on the finest grid (uniqueness proxy); empty skips it.
    std::vector<double> cross_fractions{0.5, 0.9};
};

/// Successive sup-norm differences on the coarse nodes and their observed orders.
/// Orders are skipped (with a note) when the differences are at roundoff level.
ExperimentReport self_convergence_study(const ConvergenceSetup& setup);

/// sin(2 pi (x - x0) / L) on the periodic box of a 1D grid.
std::function<double(const Point&)> periodic_sine(const Grid& grid);

} // namespace lagflow
