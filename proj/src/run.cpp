#include "lagflow/run.hpp"

#include <cmath>
#include <cstdio>

#include "lagflow/angle_operator.hpp"
#include "lagflow/error.hpp"
#include "lagflow/output.hpp"
#include "lagflow/thresholds.hpp"

namespace lagflow {

namespace {

BoundaryKind kind_of(BoundaryChoice bc) {
    return bc == BoundaryChoice::Periodic ? BoundaryKind::Periodic : BoundaryKind::Dirichlet;
}

BoundaryCondition make_bc(BoundaryChoice bc, const std::function<double(const Point&)>& initial,
                          const std::optional<SymMat>& quadratic) {
    switch (bc) {
    case BoundaryChoice::Periodic:
        return BoundaryCondition::periodic();
    case BoundaryChoice::DirichletZero:
        return BoundaryCondition::zero_dirichlet();
    case BoundaryChoice::DirichletInitial:
        return BoundaryCondition::dirichlet([initial](const Point& x, double) { return initial(x); });
    case BoundaryChoice::DirichletExact: {
        const SymMat a = *quadratic;
        const double rate = lagrangian_angle(a);
        return BoundaryCondition::dirichlet(
            [a, rate](const Point& x, double t) { return quadratic_form(a, x) + t * rate; });
    }
    }
    throw PreconditionError("unknown boundary choice");
}

std::vector<ExperimentReport> run_hypotheses(const RunConfig& cfg, const HypothesesParams& p) {
    std::vector<ExperimentReport> out;
    for (std::size_t n : p.orders) {
        HypothesisSuiteOptions o;
        o.n = n;
        o.trials = p.trials;
        o.seed = cfg.seed;
        o.scales = p.scales;
        o.alphas = p.alphas;
        o.calculus_trials = p.calculus_trials;
        o.panels = p.panels;
        o.fine_panels = p.fine_panels;
        o.threads = p.threads;
        out.push_back(run_hypothesis_suite(o));
    }
    return out;
}

ExperimentReport run_solve(const RunConfig& cfg, const SolveParams& p, std::vector<Field>* trajectory) {
    const Grid grid = p.grid.make();
    const BoundaryKind kind = kind_of(p.bc);
    const auto initial = p.initial.build(grid, kind);
    ProblemSpec spec{grid, make_bc(p.bc, initial, p.initial.a), initial, p.horizon, p.cfl_fraction,
                     p.snapshot_every};
    const Trajectory traj = solve(spec);

    ExperimentReport rep;
    rep.experiment_id = "solve_" + std::to_string(grid.dim()) + "d";
    rep.seed = cfg.seed;
    rep.parameter("h", grid.spacing());
    rep.parameter("T", p.horizon);
    rep.parameter("c", p.cfl_fraction);
    rep.info("steps", static_cast<double>(traj.steps));
    rep.info("dt", traj.dt);
    rep.check("drift", traj.max_drift, Bound::AtMost, grid.dim() * (std::numbers::pi / 2.0) * p.horizon + kDriftSlack);
    if (p.bc == BoundaryChoice::DirichletExact) {
        const SymMat& a = *p.initial.a;
        const double rate = lagrangian_angle(a);
        double err = 0.0;
        const Field& u = traj.final();
        for (std::size_t k = 0; k < grid.node_count(); ++k) {
            if (!grid.on_boundary(k)) {
                err = std::max(err, std::abs(u[k] - (quadratic_form(a, grid.point(k)) + p.horizon * rate)));
            }
        }
        rep.check("max_interior_error", err, Bound::AtMost, kExactSolutionTolerance);
    }
    if (trajectory) {
        *trajectory = traj.snapshots;
    }
    return rep;
}

ExperimentReport run_compare(const RunConfig& cfg, const CompareParams& p) {
    ComparisonSetup s;
    s.experiment_id = "compare";
    s.seed = cfg.seed;
    s.grid = p.grid.make();
    const BoundaryKind kind = kind_of(p.bc);
    s.bc = make_bc(p.bc, {}, std::nullopt);
    s.lower = p.lower.build(s.grid, kind);
    if (p.upper) {
        s.upper = p.upper->build(s.grid, kind);
    } else {
        const auto lower = s.lower;
        const double shift = p.shift;
        s.upper = [lower, shift](const Point& x) { return lower(x) + shift; };
    }
    s.horizon = p.horizon;
    s.cfl_fraction = p.cfl_fraction;
    return comparison_experiment(s);
}

ExperimentReport run_converge(const RunConfig& cfg, const ConvergeParams& p) {
    ConvergenceSetup s;
    s.seed = cfg.seed;
    s.coarse = p.grid.make();
    s.initial = p.initial.build(s.coarse, BoundaryKind::Periodic);
    s.horizon = p.horizon;
    s.levels = p.levels;
    s.cfl_fraction = p.cfl_fraction;
    s.cross_fractions = p.cross_fractions;
    return self_convergence_study(s);
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", t);
    return buf;
}

} // namespace

std::vector<ExperimentReport> run_experiments(const RunConfig& config, std::vector<Field>* trajectory) {
    return std::visit(
        [&](const auto& p) -> std::vector<ExperimentReport> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, HypothesesParams>) {
                return run_hypotheses(config, p);
            } else if constexpr (std::is_same_v<P, SolveParams>) {
                return {run_solve(config, p, trajectory)};
            } else if constexpr (std::is_same_v<P, CompareParams>) {
                return {run_compare(config, p)};
            } else if constexpr (std::is_same_v<P, ConvergeParams>) {
                return {run_converge(config, p)};
            } else {
                ExperimentReport r =
                    quadratic_exactness_experiment(p.a, p.grid.make(), p.horizon, p.cfl_fraction);
                r.seed = config.seed;
                return {r};
            }
        },
        config.params);
}

int run(const RunConfig& config, const RunOptions& options, std::ostream& log) {
    const std::string provenance = provenance_line(config_hash(config), config.seed);
    if (!options.quiet) {
        log << "lagflow " << to_string(config.command) << " seed=" << config.seed << "\n";
        for (const std::string& d : config.defaults) {
            log << "default: " << d << "\n";
        }
    }

    std::vector<ExperimentReport> reports;
    std::vector<Field> trajectory;
    try {
        reports = run_experiments(config, &trajectory);
    } catch (const PreconditionError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericalError& e) {
        ExperimentReport failed;
        failed.experiment_id = to_string(config.command);
        failed.seed = config.seed;
        failed.notes.push_back(e.what());
        failed.check("aborted", 1.0, Bound::AtMost, 0.0);
        reports.push_back(failed);
        log << "error: " << e.what() << "\n";
    }

    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(options.out_dir);
        const auto csv = options.out_dir / "report.csv";
        write_file(csv, report_csv(reports, provenance));
        written.push_back(csv);
        const auto json = options.out_dir / "report.json";
        write_file(json, report_json(reports, provenance));
        written.push_back(json);

        if (!trajectory.empty()) {
            const auto traj = options.out_dir / "trajectory.csv";
            write_file(traj, trajectory_csv(trajectory, provenance));
            written.push_back(traj);
            const auto* solve = std::get_if<SolveParams>(&config.params);
            if (solve && solve->heatmaps && trajectory.front().grid().dim() == 2) {
                const BoundaryKind kind = kind_of(solve->bc);
                for (const Field& f : trajectory) {
                    const auto u_path = options.out_dir / ("heatmap_" + time_tag(f.time()) + ".ppm");
                    emit_heatmap(f.values(), f.grid(), u_path, provenance);
                    written.push_back(u_path);
                    const std::vector<double> angle = rhs(f, kind);
                    const auto a_path = options.out_dir / ("angle_" + time_tag(f.time()) + ".ppm");
                    emit_heatmap(angle, f.grid(), a_path, provenance);
                    written.push_back(a_path);
                }
            }
        }
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kExitIoError;
    }

    bool pass = true;
    for (const ExperimentReport& r : reports) {
        pass = pass && r.pass;
        if (!options.quiet) {
            log << r.experiment_id << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
            for (const Metric& m : r.metrics) {
                if (!m.pass) {
                    log << "  failed " << m.name << " = " << m.value << " (" << m.threshold_text() << ")\n";
                }
            }
        }
    }
    if (!options.quiet) {
        for (const auto& p : written) {
            log << "wrote " << p.string() << "\n";
        }
    }
    return pass ? kExitPass : kExitExperimentFailure;
}

} // namespace lagflow
