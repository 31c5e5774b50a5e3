#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lagflow/angle_operator.hpp"
#include "lagflow/error.hpp"
#include "lagflow/harness.hpp"
#include "lagflow/pde.hpp"

using namespace lagflow;
using std::numbers::pi;

namespace {

double sup_diff(const Field& a, const Field& b, double shift = 0.0) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.grid().node_count(); ++k) {
        d = std::max(d, std::abs(a[k] - b[k] - shift));
    }
    return d;
}

} // namespace

TEST_CASE("grid construction and validation") {
    const Grid g = Grid::square(6, 0.5, {1.0, -1.0});
    CHECK(g.node_count() == 36);
    CHECK(g.point(g.index(2, 3)) == Point{2.0, 0.5});
    CHECK(g.multi_index(g.index(4, 1)) == std::array<std::size_t, 2>{4, 1});
    CHECK(g.on_boundary(g.index(0, 3)));
    CHECK(g.on_boundary(g.index(5, 5)));
    CHECK_FALSE(g.on_boundary(g.index(2, 2)));

    CHECK_THROWS_AS(Grid::line(4, 0.1), PreconditionError);
    CHECK_THROWS_AS(Grid::line(10, 0.0), PreconditionError);
    CHECK_THROWS_AS(Grid::line(10, -0.1), PreconditionError);
    CHECK_THROWS_AS(Grid(3, {5, 5}, 0.1), PreconditionError);
}

TEST_CASE("field validation") {
    const Grid g = Grid::line(5, 0.1);
    CHECK_THROWS_AS(Field(g, std::vector<double>(4, 0.0)), PreconditionError);
    CHECK_THROWS_AS(Field(g, std::vector<double>(5, 0.0), -1.0), PreconditionError);
    CHECK_THROWS_AS(Field(g, {0, 0, NAN, 0, 0}), NumericalError);
}

TEST_CASE("discrete_hessian examples") {
    const Grid line = Grid::line(11, 0.1, -0.3);
    const Field sq = Field::sample(line, [](const Point& x) { return x[0] * x[0]; });
    for (std::size_t i = 1; i + 1 < 11; ++i) {
        CHECK(discrete_hessian(sq, i, BoundaryKind::Dirichlet)(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    }

    const Grid plane = Grid::square(7, 0.25, {-0.5, -0.5});
    const Field xy = Field::sample(plane, [](const Point& x) { return x[0] * x[1]; });
    const SymMat hxy = discrete_hessian(xy, plane.index(3, 2), BoundaryKind::Dirichlet);
    CHECK(hxy(0, 0) == 0.0);
    CHECK(hxy(1, 1) == 0.0);
    CHECK(hxy(0, 1) == 1.0);

    const Grid fine = Grid::line(101, 0.01, -0.5);
    const Field s = Field::sample(fine, [](const Point& x) { return std::sin(x[0]); });
    const double h0 = discrete_hessian(s, 50, BoundaryKind::Dirichlet)(0, 0);
    CHECK(std::abs(h0) <= 1e-5);

    CHECK_THROWS_AS(discrete_hessian(sq, 0, BoundaryKind::Dirichlet), PreconditionError);
    CHECK_THROWS_AS(discrete_hessian(xy, plane.index(0, 3), BoundaryKind::Dirichlet), PreconditionError);
}

TEST_CASE("discrete_hessian wraps periodic indices") {
    const Grid g = Grid::line(16, 2 * pi / 16);
    const Field s = Field::sample(g, [](const Point& x) { return std::cos(x[0]); });
    const double h = g.spacing();
    const double factor = 2 * (std::cos(h) - 1) / (h * h); // discrete symbol of the second difference
    CHECK(discrete_hessian(s, 0, BoundaryKind::Periodic)(0, 0) == doctest::Approx(factor).epsilon(1e-12));
    CHECK(discrete_hessian(s, 15, BoundaryKind::Periodic)(0, 0) ==
          doctest::Approx(factor * std::cos(15 * h)).epsilon(1e-12));
}

TEST_CASE("rhs examples") {
    const Grid line = Grid::line(9, 0.1);
    const Field c(line, std::vector<double>(9, 3.5));
    for (double v : rhs(c, BoundaryKind::Periodic)) {
        CHECK(v == 0.0);
    }
    const Field half_sq = Field::sample(line, [](const Point& x) { return 0.5 * x[0] * x[0]; });
    const std::vector<double> r1 = rhs(half_sq, BoundaryKind::Dirichlet);
    CHECK(r1.front() == 0.0);
    CHECK(r1.back() == 0.0);
    for (std::size_t i = 1; i + 1 < 9; ++i) {
        CHECK(r1[i] == doctest::Approx(pi / 4).epsilon(1e-12));
    }

    const Grid plane = Grid::square(6, 0.2);
    const Field bowl = Field::sample(plane, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
    const std::vector<double> r2 = rhs(bowl, BoundaryKind::Dirichlet);
    for (std::size_t k = 0; k < plane.node_count(); ++k) {
        if (!plane.on_boundary(k)) {
            CHECK(r2[k] == doctest::Approx(pi / 2).epsilon(1e-12));
        }
    }
}

TEST_CASE("rhs stays inside the arctan range") {
    CounterRng rng(17, 0);
    const Grid plane = Grid::square(12, 0.05);
    std::vector<double> v(plane.node_count());
    for (double& x : v) {
        x = 10.0 * rng.normal();
    }
    for (double r : rhs(Field(plane, v), BoundaryKind::Periodic)) {
        CHECK(std::abs(r) < pi);
    }
}

TEST_CASE("cfl_max_dt examples") {
    CHECK(cfl_max_dt(0.1, 1) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(cfl_max_dt(0.1, 2) == doctest::Approx(0.0025).epsilon(1e-15));
    CHECK(cfl_max_dt(0.2, 1) == doctest::Approx(4 * cfl_max_dt(0.1, 1)).epsilon(1e-15));
    CHECK(cfl_max_dt(0.2, 2) == doctest::Approx(4 * cfl_max_dt(0.1, 2)).epsilon(1e-15));
    CHECK_THROWS_AS(cfl_max_dt(0.0, 1), PreconditionError);
    CHECK_THROWS_AS(cfl_max_dt(0.1, 3), PreconditionError);
}

TEST_CASE("step examples and errors") {
    const Grid g = Grid::line(11, 0.1);
    const Field c(g, std::vector<double>(11, 2.0));
    const BoundaryCondition match = BoundaryCondition::dirichlet([](const Point&, double) { return 2.0; });
    const Field c1 = step(c, 0.004, match);
    CHECK(sup_diff(c1, c) == 0.0);
    CHECK(c1.time() == doctest::Approx(0.004));

    // 1/2 x^2 + 3x - 1 with exact boundary data
    auto exact = [](const Point& x, double t) { return 0.5 * x[0] * x[0] + 3 * x[0] - 1 + t * pi / 4; };
    const Field u = Field::sample(g, [&](const Point& x) { return exact(x, 0.0); });
    const double dt = 0.9 * cfl_max_dt(0.1, 1);
    const Field u1 = step(u, dt, BoundaryCondition::dirichlet(exact));
    for (std::size_t k = 0; k < 11; ++k) {
        CHECK(std::abs(u1[k] - exact(g.point(k), dt)) <= 1e-13);
    }

    CHECK_THROWS_AS(step(u, 0.0, match), PreconditionError);
    CHECK_THROWS_AS(step(u, cfl_max_dt(0.1, 1) * 1.001, match), PreconditionError);
    CHECK_NOTHROW(step(u, cfl_max_dt(0.1, 1), match));
}

TEST_CASE("step preserves nodewise order of a 1D pair") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CounterRng rng(seed, 0);
        const Grid g = Grid::line(40, 0.05);
        std::vector<double> u(40), v(40);
        for (std::size_t k = 0; k < 40; ++k) {
            u[k] = rng.normal();
            v[k] = u[k] + std::abs(rng.normal()) * (k % 3 == 0 ? 0.0 : 1.0);
        }
        const Field fu(g, u), fv(g, v);
        const double dt = cfl_max_dt(0.05, 1);
        const auto bc = BoundaryCondition::periodic();
        CHECK(comparison_gap(step(fu, dt, bc), step(fv, dt, bc)) >= -1e-15);
    }
}

TEST_CASE("parallel step equals serial step bit for bit") {
    CounterRng rng(23, 0);
    const Grid g = Grid::square(33, 0.03);
    std::vector<double> v(g.node_count());
    for (double& x : v) {
        x = rng.normal();
    }
    const Field f(g, v);
    const double dt = 0.9 * cfl_max_dt(0.03, 2);
    const Field serial = step(f, dt, BoundaryCondition::periodic(), {1});
    const Field parallel = step(f, dt, BoundaryCondition::periodic(), {4});
    CHECK(std::equal(serial.values().begin(), serial.values().end(), parallel.values().begin()));
}

TEST_CASE("solve: horizon zero returns the initial field") {
    ProblemSpec spec{Grid::line(10, 0.1), BoundaryCondition::periodic(),
                     [](const Point& x) { return std::sin(x[0]); }, 0.0};
    const Trajectory t = solve(spec);
    CHECK(t.snapshots.size() == 1);
    CHECK(t.steps == 0);
    CHECK(t.max_drift == 0.0);
}

TEST_CASE("solve lands exactly on the horizon with the snapshot cadence") {
    ProblemSpec spec{Grid::line(21, 0.05), BoundaryCondition::periodic(),
                     [](const Point& x) { return std::sin(2 * pi * x[0] / 1.05); }, 0.01, 0.9, 3};
    const Trajectory t = solve(spec);
    CHECK(t.final().time() == 0.01);
    CHECK(t.initial().time() == 0.0);
    CHECK(t.dt == doctest::Approx(0.9 * 0.05 * 0.05 / 2));
    // ceil(0.01 / 0.001125) = 9 steps, snapshots at 0, 3, 6, 9
    CHECK(t.steps == 9);
    CHECK(t.snapshots.size() == 4);
    CHECK(t.max_drift <= (pi / 2) * 0.01 + kDriftSlack);
}

TEST_CASE("solve rejects bad specs") {
    ProblemSpec spec{Grid::line(10, 0.1), BoundaryCondition::periodic(), [](const Point&) { return 0.0; }, 1.0, 0.0};
    CHECK_THROWS_AS(solve(spec), PreconditionError);
    spec.cfl_fraction = 1.5;
    CHECK_THROWS_AS(solve(spec), PreconditionError);
    spec.cfl_fraction = 0.5;
    spec.horizon = -1.0;
    CHECK_THROWS_AS(solve(spec), PreconditionError);
}

TEST_CASE("solve aborts on non-finite values") {
    ProblemSpec spec{Grid::line(10, 0.1), BoundaryCondition::dirichlet([](const Point&, double t) {
                         return t > 0.01 ? INFINITY : 0.0;
                     }),
                     [](const Point&) { return 0.0; }, 0.1};
    CHECK_THROWS_AS(solve(spec), NumericalError);
}

TEST_CASE("solve: quadratic data with exact boundary values") {
    const SymMat a{{1.0, 0.5}, {0.5, -1.0}};
    const double rate = lagrangian_angle(a);
    CHECK(std::abs(rate) <= 1e-15);
    ProblemSpec spec{Grid::square(21, 0.05),
                     BoundaryCondition::dirichlet([&](const Point& x, double t) { return quadratic_form(a, x) + t * rate; }),
                     [&](const Point& x) { return quadratic_form(a, x); }, 0.1};
    const Trajectory t = solve(spec);
    const Field exact = Field::sample(spec.grid, [&](const Point& x) { return quadratic_form(a, x) + 0.1 * rate; }, 0.1);
    CHECK(sup_diff(t.final(), exact) <= 1e-10);
}

TEST_CASE("constant-shift equivariance") {
    const Grid g = Grid::line(40, 0.05);
    auto u0 = [](const Point& x) { return std::sin(2 * pi * x[0] / 2.0) + 0.3 * std::cos(6 * pi * x[0] / 2.0); };
    const Trajectory base = solve({g, BoundaryCondition::periodic(), u0, 0.2});
    const Trajectory shifted =
        solve({g, BoundaryCondition::periodic(), [&](const Point& x) { return u0(x) + 1.75; }, 0.2});
    CHECK(sup_diff(shifted.final(), base.final(), 1.75) <= 1e-12);
}

TEST_CASE("linear-function addition with adjusted Dirichlet data") {
    const Grid g = Grid::square(15, 0.07);
    auto u0 = [](const Point& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]); };
    auto ell = [](const Point& x) { return 0.8 * x[0] - 1.3 * x[1]; };
    const Trajectory base = solve({g, BoundaryCondition::dirichlet([&](const Point& x, double) { return u0(x); }), u0, 0.05});
    const Trajectory moved =
        solve({g, BoundaryCondition::dirichlet([&](const Point& x, double) { return u0(x) + ell(x); }),
               [&](const Point& x) { return u0(x) + ell(x); }, 0.05});
    const Field lin = Field::sample(g, ell, 0.05);
    double d = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        d = std::max(d, std::abs(moved.final()[k] - base.final()[k] - lin[k]));
    }
    CHECK(d <= 1e-10);
}

TEST_CASE("comparison_gap examples") {
    const Grid g = Grid::line(6, 0.2);
    const Field u = Field::sample(g, [](const Point& x) { return x[0] * x[0]; });
    const Field v = Field::sample(g, [](const Point& x) { return x[0] * x[0] + 0.3; });
    CHECK(comparison_gap(u, u) == 0.0);
    CHECK(comparison_gap(u, v) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_THROWS_AS(comparison_gap(u, Field::sample(Grid::line(7, 0.2), [](const Point&) { return 0.0; })),
                    PreconditionError);
    CHECK_THROWS_AS(comparison_gap(u, Field(g, std::vector<double>(6, 0.0), 1.0)), PreconditionError);
}

TEST_CASE("solve is deterministic across thread counts") {
    const Grid g = Grid::square(21, 0.05);
    auto u0 = [](const Point& x) { return std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]); };
    ProblemSpec serial{g, BoundaryCondition::zero_dirichlet(), u0, 0.02};
    ProblemSpec parallel = serial;
    parallel.threads = 3;
    const Trajectory a = solve(serial);
    const Trajectory b = solve(parallel);
    CHECK(std::equal(a.final().values().begin(), a.final().values().end(), b.final().values().begin()));
}
