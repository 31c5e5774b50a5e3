#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lagflow/angle_operator.hpp"
#include "lagflow/error.hpp"
#include "lagflow/harness.hpp"
#include "lagflow/rng.hpp"

using namespace lagflow;
using std::numbers::pi;

TEST_CASE("counter generator: frozen outputs") {
    // reference values from an independent Python transcription of the documented formulas
    CHECK(mix64(0) == 0);
    CHECK(mix64(1) == 0x5692161d100b05e5ULL);
    CounterRng a(42, 7), b(42, 7), c(42, 8);
    const std::uint64_t first = a.next_u64();
    CHECK(first == 0xae4f2d52c5429394ULL);
    CHECK(a.next_u64() == 0x8477082796b17dd6ULL);
    CHECK(a.next_u64() == 0x60bb9a2728418d73ULL);
    CHECK(a.counter() == 3);
    CHECK(b.uniform() == 0.6808956458164721);
    CHECK(first != c.next_u64());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("counter generator: normal moments") {
    CounterRng rng(1, 2);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("random_symmetric") {
    CounterRng r0(5, 0);
    CHECK_THROWS_AS(random_symmetric(3, 0.0, r0), PreconditionError);
    CHECK_THROWS_AS(random_symmetric(0, 1.0, r0), PreconditionError);

    CounterRng r1(5, 1), r2(5, 1);
    CHECK(random_symmetric(4, 1.0, r1) == random_symmetric(4, 1.0, r2));

    // mean of entries over 10^4 draws within 3 standard errors of zero
    CounterRng rng(77, 0);
    const int draws = 10000;
    double sum = 0.0;
    for (int d = 0; d < draws; ++d) {
        const SymMat x = random_symmetric(4, 1.0, rng);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i; j < 4; ++j) {
                sum += x(i, j);
            }
        }
    }
    const double count = draws * 10.0;
    CHECK(std::abs(sum / count) <= 3.0 / std::sqrt(count));
}

TEST_CASE("random_ordered_pair is ordered and Weyl-consistent") {
    for (std::uint64_t k = 0; k < 2000; ++k) {
        CounterRng rng(8, k);
        const double scale = k % 3 == 0 ? 0.1 : (k % 3 == 1 ? 1.0 : 10.0);
        const OrderedPair p = random_ordered_pair(1 + k % 6, scale, rng);
        REQUIRE(loewner_geq(p.x, p.y, kLoewnerPreconditionTolerance));
        CHECK(weyl_monotonicity_check(p.x, p.y).pass);
    }
}

TEST_CASE("metric bounds and threshold text") {
    ExperimentReport r;
    r.check("a", 1e-11, Bound::AtMost, 1e-10);
    r.check("b", -1e-13, Bound::AtLeast, -1e-12);
    r.check("c", 2.0, Bound::Within, 1.7, 2.3);
    r.check("d", 0.0, Bound::Above, 0.0);
    r.info("e", 42.0);
    CHECK(r.metric("a").threshold_text() == "<=1e-10");
    CHECK(r.metric("b").threshold_text() == ">=-1e-12");
    CHECK(r.metric("c").threshold_text() == "in[1.7,2.3]");
    CHECK(r.metric("d").threshold_text() == ">0");
    CHECK(r.metric("e").threshold_text().empty());
    CHECK_FALSE(r.metric("d").pass);
    CHECK_FALSE(r.pass);
    CHECK_THROWS_AS(r.metric("missing"), PreconditionError);

    ExperimentReport nan;
    nan.check("x", NAN, Bound::AtMost, 1.0);
    CHECK_FALSE(nan.pass);
}

TEST_CASE("hypothesis suite: forced equal pairs give zero slack") {
    HypothesisSuiteOptions o;
    o.n = 3;
    o.trials = 1;
    o.seed = 9;
    o.equal_pairs = true;
    const ExperimentReport r = run_hypothesis_suite(o);
    CHECK(r.pass);
    CHECK(r.metric("h1.worst_slack").value == 0.0);
    CHECK(r.metric("weyl.worst_gap").value == 0.0);
}

TEST_CASE("hypothesis suite: reproducible and schedule independent") {
    HypothesisSuiteOptions o;
    o.n = 4;
    o.trials = 200;
    o.calculus_trials = 50;
    o.seed = 123;
    const ExperimentReport a = run_hypothesis_suite(o);
    o.threads = 3;
    const ExperimentReport b = run_hypothesis_suite(o);
    CHECK(a.pass);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].name == b.metrics[i].name);
        CHECK(a.metrics[i].value == b.metrics[i].value);
    }
    CHECK(a.seed == 123);
    CHECK(a.experiment_id == "hypotheses_n4");
}

TEST_CASE("quadratic exactness examples") {
    const ExperimentReport zero = quadratic_exactness_experiment(SymMat::zero(1), Grid::line(21, 0.05), 1.0, 0.9);
    CHECK(zero.metric("max_interior_error").value <= 1e-14);

    const ExperimentReport one = quadratic_exactness_experiment(SymMat::identity(1), Grid::line(21, 0.05), 1.0, 0.9);
    CHECK(one.pass);
    CHECK(one.metric("angle_rate").value == doctest::Approx(pi / 4));

    const ExperimentReport saddle =
        quadratic_exactness_experiment(SymMat{{1.0, 0.5}, {0.5, -1.0}}, Grid::square(21, 0.05), 0.5, 0.9);
    CHECK(saddle.pass);
    CHECK(std::abs(saddle.metric("angle_rate").value) <= 1e-15);

    CHECK_THROWS_AS(quadratic_exactness_experiment(SymMat::identity(2), Grid::line(21, 0.05), 1.0, 0.9),
                    PreconditionError);
}

TEST_CASE("comparison experiment examples") {
    const Grid g = Grid::line(64, 2 * pi / 64);
    auto sine = [](const Point& x) { return std::sin(x[0]); };

    ComparisonSetup same;
    same.grid = g;
    same.lower = sine;
    same.upper = sine;
    const ExperimentReport r0 = comparison_experiment(same);
    CHECK(r0.pass);
    CHECK(std::abs(r0.metric("min_gap").value) <= 1e-12);

    ComparisonSetup shifted = same;
    shifted.upper = [&](const Point& x) { return sine(x) + 0.1; };
    const ExperimentReport r1 = comparison_experiment(shifted);
    CHECK(r1.pass);
    CHECK(r1.metric("min_gap").value >= 0.1 - 1e-12);

    ComparisonSetup bad = same;
    bad.upper = [&](const Point& x) { return sine(x) - 0.1; };
    CHECK_THROWS_AS(comparison_experiment(bad), PreconditionError);
}

TEST_CASE("2D comparison suite is labelled empirical") {
    const ExperimentReport r = comparison_suite_2d(3, 11);
    CHECK(r.pass);
    CHECK(r.parameters.at("evidence") == "empirical");
}

TEST_CASE("self-convergence on exactly resolved data skips the order test") {
    // the periodic box cannot hold a non-constant quadratic; a constant is the exact case here
    ConvergenceSetup s;
    s.coarse = Grid::line(16, 0.1);
    s.initial = [](const Point&) { return 2.0; };
    s.horizon = 0.05;
    s.levels = 3;
    s.cross_fractions = {};
    const ExperimentReport r = self_convergence_study(s);
    CHECK(r.pass);
    CHECK_FALSE(r.notes.empty());
    s.levels = 2;
    CHECK_THROWS_AS(self_convergence_study(s), PreconditionError);
}
