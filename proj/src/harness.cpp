#include "lagflow/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "lagflow/angle_operator.hpp"
#include "lagflow/error.hpp"
#include "lagflow/thresholds.hpp"

namespace lagflow {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Fills out[k] = fn(k) on up to `threads` workers; results depend only on k.
template <typename T, typename Fn>
std::vector<T> map_indices(std::size_t count, unsigned threads, Fn&& fn) {
    std::vector<T> out(count);
    if (threads <= 1 || count < 2 * static_cast<std::size_t>(threads)) {
        for (std::size_t k = 0; k < count; ++k) {
            out[k] = fn(k);
        }
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, begin, end] {
            for (std::size_t k = begin; k < end; ++k) {
                out[k] = fn(k);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

double drift_bound(int dim, double horizon) {
    return dim * (std::numbers::pi / 2.0) * horizon + kDriftSlack;
}

} // namespace

// ---------------------------------------------------------------------- report

std::string Metric::threshold_text() const {
    switch (bound) {
    case Bound::AtMost:
        return "<=" + format_short(threshold);
    case Bound::AtLeast:
        return ">=" + format_short(threshold);
    case Bound::Above:
        return ">" + format_short(threshold);
    case Bound::Within:
        return "in[" + format_short(threshold) + "," + format_short(upper) + "]";
    case Bound::Info:
        break;
    }
    return "";
}

void ExperimentReport::check(std::string name, double value, Bound bound, double threshold, double upper) {
    Metric m{std::move(name), value, bound, threshold, upper, true};
    switch (bound) {
    case Bound::AtMost:
        m.pass = value <= threshold;
        break;
    case Bound::AtLeast:
        m.pass = value >= threshold;
        break;
    case Bound::Above:
        m.pass = value > threshold;
        break;
    case Bound::Within:
        m.pass = value >= threshold && value <= upper;
        break;
    case Bound::Info:
        break;
    }
    pass = pass && m.pass;
    metrics.push_back(std::move(m));
}

void ExperimentReport::info(std::string name, double value) {
    check(std::move(name), value, Bound::Info, 0.0);
}

void ExperimentReport::parameter(std::string key, double value) {
    parameters[std::move(key)] = format_number(value);
}

const Metric& ExperimentReport::metric(const std::string& name) const {
    for (const Metric& m : metrics) {
        if (m.name == name) {
            return m;
        }
    }
    throw PreconditionError("ExperimentReport: no metric named " + name);
}

// ------------------------------------------------------------- random matrices

SymMat random_symmetric(std::size_t n, double scale, CounterRng& rng) {
    if (n == 0) {
        throw PreconditionError("random_symmetric: order must be at least 1");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw PreconditionError("random_symmetric: scale must be positive");
    }
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            m(i, j) = scale * rng.normal();
            m(j, i) = m(i, j);
        }
    }
    return SymMat(m);
}

OrderedPair random_ordered_pair(std::size_t n, double scale, CounterRng& rng) {
    SymMat y = random_symmetric(n, scale, rng);
    const double s = std::sqrt(scale);
    SquareMatrix l(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            l(i, j) = s * rng.normal();
        }
    }
    SymMat x = y + gram(l);
    return {std::move(x), std::move(y)};
}

// ----------------------------------------------------------- hypothesis suite

namespace {

struct TrialOutcome {
    bool precondition_failed = false;
    double h1_slack = 0.0;
    double weyl_gap = 0.0;
    bool joint_disagrees = false;
    double ordered_derivative = 0.0;
    double trace_slack = 0.0;
    std::vector<double> holder_slacks;
    double n_pi_slack = 0.0;
    double range_slack = 0.0;
    double detform = 0.0;
    bool calculus = false;
    double fd_error = 0.0;
    double integral = 0.0;
    bool fine_quadrature = false;
};

TrialOutcome run_trial(const HypothesisSuiteOptions& o, double scale, CounterRng& rng) {
    const std::size_t n = o.n;
    const double half_range = n * std::numbers::pi / 2.0;
    TrialOutcome r;

    OrderedPair ordered = random_ordered_pair(n, scale, rng);
    SymMat x2 = random_symmetric(n, scale, rng);
    SymMat y2 = random_symmetric(n, scale, rng);
    const double t = rng.uniform(kFiniteDifferenceStep, 1.0 - kFiniteDifferenceStep);
    if (o.equal_pairs) {
        ordered.x = ordered.y;
        x2 = y2;
    }

    try {
        r.h1_slack = h1_monotonicity_check(ordered.x, ordered.y).slack;
        const WeylReport weyl = weyl_monotonicity_check(ordered.x, ordered.y);
        r.weyl_gap = weyl.worst_gap;
        const bool h1_pass = r.h1_slack >= -kHypothesisSlackTolerance;
        r.joint_disagrees = weyl.pass && !h1_pass;
    } catch (const PreconditionError&) {
        r.precondition_failed = true;
    }
    r.ordered_derivative = path_derivative(ordered.x, ordered.y, t);

    for (double alpha : o.alphas) {
        const BoundOutcome b = h2_bound_check(x2, y2, alpha);
        r.trace_slack = b.trace_slack;
        r.holder_slacks.push_back(b.holder_slack);
        r.n_pi_slack = n * std::numbers::pi - b.gap;
    }

    r.range_slack = half_range;
    for (const SymMat* m : {&ordered.x, &ordered.y, &x2, &y2}) {
        r.range_slack = std::min(r.range_slack, half_range - std::abs(lagrangian_angle(*m)));
        r.detform = std::max(r.detform, detform_residual(*m));
    }
    return r;
}

void run_calculus(const HypothesisSuiteOptions& o, double scale, CounterRng& rng, TrialOutcome& r) {
    SymMat x = random_symmetric(o.n, scale, rng);
    SymMat y = random_symmetric(o.n, scale, rng);
    if (o.equal_pairs) {
        x = y;
    }
    const double t = rng.uniform(kFiniteDifferenceStep, 1.0 - kFiniteDifferenceStep);
    const double d = path_derivative(x, y, t);
    const double fd = (path_value(x, y, t + kFiniteDifferenceStep) - path_value(x, y, t - kFiniteDifferenceStep)) /
                      (2.0 * kFiniteDifferenceStep);
    r.calculus = true;
    r.fd_error = std::abs(d - fd) / (1.0 + std::abs(d));
    r.fine_quadrature = scale > o.quadrature_scale_limit;
    r.integral = integral_identity_residual(x, y, r.fine_quadrature ? o.fine_panels : o.panels);
}

} // namespace

ExperimentReport run_hypothesis_suite(const HypothesisSuiteOptions& o) {
    const auto start = Clock::now();
    if (o.n == 0 || o.trials == 0) {
        throw PreconditionError("run_hypothesis_suite: n and trials must be at least 1");
    }
    if (o.scales.empty() || o.alphas.empty()) {
        throw PreconditionError("run_hypothesis_suite: need at least one scale and one alpha");
    }

    ExperimentReport rep;
    rep.experiment_id = "hypotheses_n" + std::to_string(o.n);
    rep.seed = o.seed;
    rep.parameter("n", static_cast<double>(o.n));
    rep.parameter("trials_per_scale", static_cast<double>(o.trials));
    rep.parameter("calculus_trials_per_scale", static_cast<double>(std::min(o.calculus_trials, o.trials)));
    rep.parameter("panels", static_cast<double>(o.panels));
    rep.parameter("fine_panels", static_cast<double>(o.fine_panels));
    {
        std::string s;
        for (double v : o.scales) {
            s += (s.empty() ? "" : ";") + format_short(v);
        }
        rep.parameter("scales", s);
        s.clear();
        for (double v : o.alphas) {
            s += (s.empty() ? "" : ";") + format_short(v);
        }
        rep.parameter("alphas", s);
    }
    if (o.equal_pairs) {
        rep.parameter("pairs", "equal");
    }

    std::vector<TrialOutcome> all;
    for (std::size_t s = 0; s < o.scales.size(); ++s) {
        const double scale = o.scales[s];
        auto part = map_indices<TrialOutcome>(o.trials, o.threads, [&](std::size_t k) {
            const std::uint64_t stream = (static_cast<std::uint64_t>(o.n) << 48) |
                                         (static_cast<std::uint64_t>(s) << 40) | static_cast<std::uint64_t>(k);
            CounterRng rng(o.seed, stream);
            TrialOutcome r = run_trial(o, scale, rng);
            if (k < o.calculus_trials) {
                run_calculus(o, scale, rng, r);
            }
            return r;
        });
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }

    // Deterministic reduction in trial order.
    std::uint64_t precondition_failures = 0;
    HypothesisReport h1, weyl, trace, range, n_pi, detform, ordered_derivative, fd, integral, integral_fine;
    std::vector<HypothesisReport> holder(o.alphas.size());
    std::uint64_t joint_disagreements = 0;
    for (const TrialOutcome& r : all) {
        if (r.precondition_failed) {
            ++precondition_failures;
        } else {
            h1.record_slack(r.h1_slack, r.h1_slack >= -kHypothesisSlackTolerance);
            weyl.record_slack(r.weyl_gap, r.weyl_gap >= -kWeylGapTolerance);
            joint_disagreements += r.joint_disagrees ? 1 : 0;
        }
        ordered_derivative.record_slack(r.ordered_derivative, r.ordered_derivative >= -kHypothesisSlackTolerance);
        trace.record_slack(r.trace_slack, r.trace_slack >= -kHypothesisSlackTolerance);
        for (std::size_t a = 0; a < holder.size(); ++a) {
            holder[a].record_slack(r.holder_slacks[a], r.holder_slacks[a] >= -kHypothesisSlackTolerance);
        }
        n_pi.record_slack(r.n_pi_slack, r.n_pi_slack > 0.0);
        range.record_slack(r.range_slack, r.range_slack > 0.0);
        detform.record_residual(r.detform, r.detform <= kAlgebraicResidualTolerance);
        if (r.calculus) {
            fd.record_residual(r.fd_error, r.fd_error <= kFiniteDifferenceTolerance);
            (r.fine_quadrature ? integral_fine : integral)
                .record_residual(r.integral, r.integral <= kQuadratureResidualTolerance);
        }
    }

    // Fixed branch-stress cases: |F| well beyond pi once n >= 3.
    HypothesisReport branch;
    double branch_max_angle = 0.0;
    for (double c : {2.0, 10.0, 100.0, -10.0}) {
        const SymMat m = c * SymMat::identity(o.n);
        const double res = detform_residual(m);
        branch.record_residual(res, res <= kAlgebraicResidualTolerance);
        branch_max_angle = std::max(branch_max_angle, std::abs(lagrangian_angle(m)));
    }

    rep.info("trials", static_cast<double>(all.size()));
    rep.check("h1.precondition_failures", static_cast<double>(precondition_failures), Bound::AtMost, 0.0);
    rep.check("h1.violations", static_cast<double>(h1.violations), Bound::AtMost, 0.0);
    rep.check("h1.worst_slack", h1.worst_margin, Bound::AtLeast, -kHypothesisSlackTolerance);
    rep.check("h2_trace.violations", static_cast<double>(trace.violations), Bound::AtMost, 0.0);
    rep.check("h2_trace.worst_slack", trace.worst_margin, Bound::AtLeast, -kHypothesisSlackTolerance);
    for (std::size_t a = 0; a < holder.size(); ++a) {
        const std::string key = "h2_holder_alpha" + format_short(o.alphas[a]);
        rep.check(key + ".violations", static_cast<double>(holder[a].violations), Bound::AtMost, 0.0);
        rep.check(key + ".worst_slack", holder[a].worst_margin, Bound::AtLeast, -kHypothesisSlackTolerance);
    }
    rep.check("gap_below_n_pi.worst_slack", n_pi.worst_margin, Bound::Above, 0.0);
    rep.check("range.worst_slack", range.worst_margin, Bound::Above, 0.0);
    rep.check("detform.max_residual", detform.max_residual, Bound::AtMost, kAlgebraicResidualTolerance);
    rep.check("detform_branch.max_residual", branch.max_residual, Bound::AtMost, kAlgebraicResidualTolerance);
    rep.info("detform_branch.max_abs_angle", branch_max_angle);
    rep.check("path_derivative_ordered.worst", ordered_derivative.worst_margin, Bound::AtLeast,
              -kHypothesisSlackTolerance);
    if (fd.trials > 0) {
        rep.check("path_fd.max_rel_error", fd.max_residual, Bound::AtMost, kFiniteDifferenceTolerance);
    }
    if (integral.trials > 0) {
        rep.check("integral.max_residual", integral.max_residual, Bound::AtMost, kQuadratureResidualTolerance);
        rep.info("integral.pairs", static_cast<double>(integral.trials));
    }
    if (integral_fine.trials > 0) {
        rep.check("integral_fine.max_residual", integral_fine.max_residual, Bound::AtMost,
                  kQuadratureResidualTolerance);
        rep.info("integral_fine.pairs", static_cast<double>(integral_fine.trials));
    }
    rep.check("weyl.violations", static_cast<double>(weyl.violations), Bound::AtMost, 0.0);
    rep.check("weyl.worst_gap", weyl.worst_margin, Bound::AtLeast, -kWeylGapTolerance);
    rep.check("weyl_h1.disagreements", static_cast<double>(joint_disagreements), Bound::AtMost, 0.0);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

// ----------------------------------------------------------- PDE experiments

double quadratic_form(const SymMat& a, const Point& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.order(); ++i) {
        for (std::size_t j = 0; j < a.order(); ++j) {
            s += x[i] * a(i, j) * x[j];
        }
    }
    return 0.5 * s;
}

ExperimentReport quadratic_exactness_experiment(const SymMat& a, const Grid& grid, double horizon,
                                                double cfl_fraction) {
    const auto start = Clock::now();
    if (a.order() != static_cast<std::size_t>(grid.dim())) {
        throw PreconditionError("quadratic_exactness_experiment: matrix order must equal grid dimension");
    }
    const double rate = lagrangian_angle(a);
    auto exact = [a, rate](const Point& x, double t) { return quadratic_form(a, x) + t * rate; };

    ProblemSpec spec{grid, BoundaryCondition::dirichlet(exact), [exact](const Point& x) { return exact(x, 0.0); },
                     horizon, cfl_fraction};
    const Trajectory traj = solve(spec);

    double err = 0.0;
    const Field& u = traj.final();
    for (std::size_t k = 0; k < u.values().size(); ++k) {
        if (!grid.on_boundary(k)) {
            err = std::max(err, std::abs(u[k] - exact(grid.point(k), horizon)));
        }
    }

    ExperimentReport rep;
    rep.experiment_id = "quadratic_" + std::to_string(grid.dim()) + "d";
    rep.parameter("dim", static_cast<double>(grid.dim()));
    rep.parameter("h", grid.spacing());
    rep.parameter("T", horizon);
    rep.parameter("c", cfl_fraction);
    {
        std::string s;
        for (double v : a.matrix().data()) {
            s += (s.empty() ? "" : ";") + format_number(v);
        }
        rep.parameter("A", s);
    }
    rep.info("angle_rate", rate);
    rep.info("steps", static_cast<double>(traj.steps));
    rep.check("max_interior_error", err, Bound::AtMost, kExactSolutionTolerance);
    rep.check("drift", traj.max_drift, Bound::AtMost, drift_bound(grid.dim(), horizon));
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

namespace {

struct GapHistory {
    double initial = 0.0;
    double min_over_time = 0.0;
    double worst_drift_slack = 0.0;
};

GapHistory evolve_pair(const ComparisonSetup& s) {
    if (!s.lower || !s.upper) {
        throw PreconditionError("comparison: both initial conditions are required");
    }
    const Field u0 = Field::sample(s.grid, s.lower);
    const Field v0 = Field::sample(s.grid, s.upper);
    GapHistory g;
    g.initial = comparison_gap(u0, v0);
    if (g.initial < 0.0) {
        std::ostringstream msg;
        msg << "comparison: initial data are not ordered (min gap " << g.initial << ")";
        throw PreconditionError(msg.str());
    }
    ProblemSpec pu{s.grid, s.bc, s.lower, s.horizon, s.cfl_fraction, 1};
    ProblemSpec pv{s.grid, s.bc, s.upper, s.horizon, s.cfl_fraction, 1};
    const Trajectory tu = solve(pu);
    const Trajectory tv = solve(pv);
    g.min_over_time = g.initial;
    for (std::size_t k = 0; k < tu.snapshots.size(); ++k) {
        g.min_over_time = std::min(g.min_over_time, comparison_gap(tu.snapshots[k], tv.snapshots[k]));
    }
    const double bound = drift_bound(s.grid.dim(), s.horizon);
    g.worst_drift_slack = std::min(bound - tu.max_drift, bound - tv.max_drift);
    return g;
}

double comparison_tolerance(int dim) {
    return dim == 1 ? kComparisonTolerance1D : kComparisonTolerance2D;
}

void label_evidence(ExperimentReport& rep, int dim) {
    if (dim == 1) {
        rep.parameter("evidence", "monotone-scheme");
    } else {
        rep.parameter("evidence", "empirical");
        rep.notes.push_back(
            "2D comparison is empirical evidence only: the narrow cross stencil is not monotone in general");
    }
}

} // namespace

ExperimentReport comparison_experiment(const ComparisonSetup& setup) {
    const auto start = Clock::now();
    const GapHistory g = evolve_pair(setup);
    ExperimentReport rep;
    rep.experiment_id = setup.experiment_id;
    rep.seed = setup.seed;
    rep.parameter("dim", static_cast<double>(setup.grid.dim()));
    rep.parameter("h", setup.grid.spacing());
    rep.parameter("T", setup.horizon);
    rep.parameter("c", setup.cfl_fraction);
    rep.parameter("bc", setup.bc.kind == BoundaryKind::Periodic ? "periodic" : "dirichlet");
    label_evidence(rep, setup.grid.dim());
    rep.info("initial_gap", g.initial);
    rep.info("min_gap", g.min_over_time);
    rep.check("min_gap_minus_initial", g.min_over_time - g.initial, Bound::AtLeast,
              -comparison_tolerance(setup.grid.dim()));
    rep.check("drift.worst_slack", g.worst_drift_slack, Bound::AtLeast, 0.0);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

std::function<double(const Point&)> random_periodic_function(const Grid& grid, CounterRng& rng) {
    struct Mode {
        int axis;
        int k;
        double amplitude;
        double phase;
    };
    std::vector<Mode> modes;
    for (int axis = 0; axis < grid.dim(); ++axis) {
        for (int k = 1; k <= 3; ++k) {
            modes.push_back({axis, k, rng.normal() / (k * k), rng.uniform(0.0, 2.0 * std::numbers::pi)});
        }
    }
    const Point origin = grid.origin();
    const std::array<double, 2> length{grid.count(0) * grid.spacing(), grid.count(1) * grid.spacing()};
    return [modes, origin, length](const Point& x) {
        double s = 0.0;
        for (const Mode& m : modes) {
            s += m.amplitude *
                 std::sin(2.0 * std::numbers::pi * m.k * (x[m.axis] - origin[m.axis]) / length[m.axis] + m.phase);
        }
        return s;
    };
}

std::function<double(const Point&)> random_bump(CounterRng& rng) {
    const double cx = rng.uniform(0.35, 0.65);
    const double cy = rng.uniform(0.35, 0.65);
    const double w = rng.uniform(0.15, 0.3);
    const double a = rng.uniform(0.5, 2.0);
    return [=](const Point& x) {
        const double r2 = ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / (w * w);
        if (r2 >= 1.0) {
            return 0.0;
        }
        const double s = 1.0 - r2;
        return a * s * s * s;
    };
}

ExperimentReport comparison_suite_1d(std::size_t pairs, std::uint64_t seed, double cfl_fraction, double horizon) {
    const auto start = Clock::now();
    const Grid grid = Grid::line(64, 2.0 * std::numbers::pi / 64.0);
    double worst_drop = 0.0;
    double worst_drift = std::numeric_limits<double>::infinity();
    double min_initial = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs; ++p) {
        CounterRng rng(seed, p);
        auto u0 = random_periodic_function(grid, rng);
        auto w = random_periodic_function(grid, rng);
        const double offset = p % 2 == 0 ? 0.0 : rng.uniform(0.0, 0.2);
        double wmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
            wmin = std::min(wmin, w(grid.point(k)));
        }
        ComparisonSetup s;
        s.grid = grid;
        s.bc = BoundaryCondition::periodic();
        s.lower = u0;
        s.upper = [u0, w, wmin, offset](const Point& x) { return u0(x) + (w(x) - wmin) + offset; };
        s.horizon = horizon;
        s.cfl_fraction = cfl_fraction;
        const GapHistory g = evolve_pair(s);
        worst_drop = std::min(worst_drop, g.min_over_time - g.initial);
        worst_drift = std::min(worst_drift, g.worst_drift_slack);
        min_initial = std::min(min_initial, g.initial);
    }
    ExperimentReport rep;
    rep.experiment_id = "comparison_1d_periodic";
    rep.seed = seed;
    rep.parameter("pairs", static_cast<double>(pairs));
    rep.parameter("h", grid.spacing());
    rep.parameter("nodes", static_cast<double>(grid.node_count()));
    rep.parameter("T", horizon);
    rep.parameter("c", cfl_fraction);
    label_evidence(rep, 1);
    rep.info("min_initial_gap", min_initial);
    rep.check("min_gap_minus_initial", worst_drop, Bound::AtLeast, -kComparisonTolerance1D);
    rep.check("drift.worst_slack", worst_drift, Bound::AtLeast, 0.0);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

ExperimentReport comparison_suite_2d(std::size_t runs, std::uint64_t seed, double horizon) {
    const auto start = Clock::now();
    const Grid grid = Grid::square(21, 0.05);
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_drift = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs; ++r) {
        CounterRng rng(seed, r);
        auto lower_bump = random_bump(rng);
        auto upper_bump = random_bump(rng);
        ComparisonSetup s;
        s.grid = grid;
        s.bc = BoundaryCondition::zero_dirichlet();
        s.lower = [lower_bump](const Point& x) { return -lower_bump(x); };
        s.upper = upper_bump;
        s.horizon = horizon;
        const GapHistory g = evolve_pair(s);
        worst_gap = std::min(worst_gap, g.min_over_time);
        worst_drift = std::min(worst_drift, g.worst_drift_slack);
    }
    ExperimentReport rep;
    rep.experiment_id = "comparison_2d_dirichlet";
    rep.seed = seed;
    rep.parameter("runs", static_cast<double>(runs));
    rep.parameter("h", grid.spacing());
    rep.parameter("T", horizon);
    rep.parameter("c", 0.9);
    label_evidence(rep, 2);
    rep.check("min_gap", worst_gap, Bound::AtLeast, -kComparisonTolerance2D);
    rep.check("drift.worst_slack", worst_drift, Bound::AtLeast, 0.0);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

std::function<double(const Point&)> periodic_sine(const Grid& grid) {
    const double x0 = grid.origin()[0];
    const double length = grid.count(0) * grid.spacing();
    return [x0, length](const Point& x) { return std::sin(2.0 * std::numbers::pi * (x[0] - x0) / length); };
}

ExperimentReport self_convergence_study(const ConvergenceSetup& s) {
    const auto start = Clock::now();
    if (s.levels < 3) {
        throw PreconditionError("self_convergence_study: need at least 3 levels");
    }
    if (!s.initial) {
        throw PreconditionError("self_convergence_study: missing initial condition");
    }
    const int dim = s.coarse.dim();
    const double bound = drift_bound(dim, s.horizon);

    ExperimentReport rep;
    rep.experiment_id = s.experiment_id;
    rep.seed = s.seed;
    rep.parameter("dim", static_cast<double>(dim));
    rep.parameter("h0", s.coarse.spacing());
    rep.parameter("levels", static_cast<double>(s.levels));
    rep.parameter("T", s.horizon);
    rep.parameter("c", s.cfl_fraction);

    auto level_grid = [&](std::size_t level) {
        const std::size_t f = std::size_t{1} << level;
        return Grid(dim, {s.coarse.count(0) * f, dim == 2 ? s.coarse.count(1) * f : 1},
                    s.coarse.spacing() / static_cast<double>(f), s.coarse.origin());
    };

    double worst_drift = std::numeric_limits<double>::infinity();
    std::vector<Field> finals;
    for (std::size_t level = 0; level < s.levels; ++level) {
        ProblemSpec spec{level_grid(level), BoundaryCondition::periodic(), s.initial, s.horizon, s.cfl_fraction};
        Trajectory t = solve(spec);
        worst_drift = std::min(worst_drift, bound - t.max_drift);
        finals.push_back(t.final());
    }

    // Difference between consecutive levels, sampled on the coarse nodes.
    std::vector<double> diffs;
    for (std::size_t level = 0; level + 1 < s.levels; ++level) {
        const Grid& gc = finals[level].grid();
        const Grid& gf = finals[level + 1].grid();
        const std::size_t stride_c = std::size_t{1} << level;
        double d = 0.0;
        for (std::size_t node = 0; node < s.coarse.node_count(); ++node) {
            const auto [i, j] = s.coarse.multi_index(node);
            const double a = finals[level][gc.index(i * stride_c, j * stride_c)];
            const double b = finals[level + 1][gf.index(2 * i * stride_c, 2 * j * stride_c)];
            d = std::max(d, std::abs(a - b));
        }
        diffs.push_back(d);
        rep.info("diff_level" + std::to_string(level), d);
    }

    const double largest = *std::max_element(diffs.begin(), diffs.end());
    if (largest < 1e-12) {
        rep.notes.push_back("level differences at roundoff level; order test skipped");
    } else {
        for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
            const double order = std::log2(diffs[k] / diffs[k + 1]);
            rep.check("order_level" + std::to_string(k), order, Bound::Within, kConvergenceOrderMin,
                      kConvergenceOrderMax);
        }
    }

    if (s.cross_fractions.size() >= 2) {
        const Grid finest = level_grid(s.levels - 1);
        std::vector<Field> cross;
        for (double c : s.cross_fractions) {
            ProblemSpec spec{finest, BoundaryCondition::periodic(), s.initial, s.horizon, c};
            Trajectory t = solve(spec);
            worst_drift = std::min(worst_drift, bound - t.max_drift);
            cross.push_back(t.final());
        }
        double disagreement = 0.0;
        for (std::size_t a = 1; a < cross.size(); ++a) {
            for (std::size_t k = 0; k < finest.node_count(); ++k) {
                disagreement = std::max(disagreement, std::abs(cross[a][k] - cross[0][k]));
            }
        }
        rep.check("cfl_fraction_disagreement", disagreement, Bound::AtMost,
                  kUniquenessProxyFactor * finest.spacing() * finest.spacing());
    }
    rep.check("drift.worst_slack", worst_drift, Bound::AtLeast, 0.0);
    rep.runtime_ms = elapsed_ms(start);
    return rep;
}

} // namespace lagflow
