#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lagflow/angle_operator.hpp"
#include "lagflow/error.hpp"
#include "lagflow/harness.hpp"

using namespace lagflow;
using std::numbers::pi;

TEST_CASE("lagrangian_angle examples") {
    CHECK(lagrangian_angle(SymMat::zero(3)) == 0.0);
    CHECK(lagrangian_angle(SymMat::identity(2)) == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(lagrangian_angle(SymMat::diagonal({1.0, -1.0})) == 0.0);
    // numpy eigenvalues, arctan summed in Python
    const SymMat a{{4.0, 1.0, 0.0}, {1.0, -2.0, 3.0}, {0.0, 3.0, 1.0}};
    CHECK(std::abs(lagrangian_angle(a) - 1.2304143881529896) <= 1e-13);
}

TEST_CASE("complex_determinant against hand-computed values") {
    using C = std::complex<double>;
    // det [[1+i, 2], [3, 4-i]] = (1+i)(4-i) - 6 = 5 + 3i - 6 = -1 + 3i
    const std::vector<C> a{C(1, 1), C(2, 0), C(3, 0), C(4, -1)};
    const C d = complex_determinant(a, 2);
    CHECK(std::abs(d - C(-1, 3)) <= 1e-14);
    // a zero leading pivot forces a row swap: det [[0,1],[1,0]] = -1
    const std::vector<C> swap{C(0), C(1), C(1), C(0)};
    CHECK(std::abs(complex_determinant(swap, 2) - C(-1)) <= 1e-15);
    CHECK_THROWS_AS(complex_determinant(swap, 3), PreconditionError);
}

TEST_CASE("detform_residual examples") {
    CHECK(detform_residual(SymMat::zero(3)) == 0.0);
    CHECK(detform_residual(SymMat::identity(1)) <= 1e-14);
    // branch stress: F(10 I) at n = 4 is 4 atan 10 > pi
    const SymMat big = 10.0 * SymMat::identity(4);
    CHECK(lagrangian_angle(big) == doctest::Approx(5.884510697214939).epsilon(1e-14));
    CHECK(detform_residual(big) <= 1e-10);
}

TEST_CASE("path_value examples") {
    const SymMat x{{1.0, 2.0}, {2.0, -1.0}};
    CHECK(path_value(x, x, 0.3) == doctest::Approx(lagrangian_angle(x)).epsilon(1e-15));
    CHECK(path_value(SymMat::identity(1), SymMat::zero(1), 0.7) == doctest::Approx(std::atan(0.7)).epsilon(1e-15));
    CHECK(std::abs(path_value(SymMat::identity(3), SymMat::zero(3), 0.5) - 1.3909428270024182) <= 1e-14);
    const SymMat y = SymMat::diagonal({3.0, 0.5});
    CHECK(path_value(x, y, 0.0) == doctest::Approx(lagrangian_angle(y)).epsilon(1e-15));
    CHECK(path_value(x, y, 1.0) == doctest::Approx(lagrangian_angle(x)).epsilon(1e-15));
    CHECK_THROWS_AS(path_value(x, y, -0.01), PreconditionError);
    CHECK_THROWS_AS(path_value(x, y, 1.01), PreconditionError);
}

TEST_CASE("path_derivative examples") {
    const SymMat x{{1.0, 2.0}, {2.0, -1.0}};
    CHECK(path_derivative(x, x, 0.4) == 0.0);
    for (double t : {0.0, 0.25, 0.5, 1.0}) {
        CHECK(std::abs(path_derivative(SymMat::identity(2), SymMat::zero(2), t) - 2.0 / (1.0 + t * t)) <= 1e-14);
    }
}

TEST_CASE("path_derivative: diagonal closed form") {
    // diagonal segment: sum_j (x_j - y_j) / (1 + (t x_j + (1 - t) y_j)^2)
    const std::vector<double> xd{2.0, -1.0, 0.5}, yd{-3.0, 0.25, 4.0};
    for (double t : {0.1, 0.6, 0.9}) {
        double expected = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            const double m = t * xd[j] + (1 - t) * yd[j];
            expected += (xd[j] - yd[j]) / (1.0 + m * m);
        }
        CHECK(std::abs(path_derivative(SymMat::diagonal(xd), SymMat::diagonal(yd), t) - expected) <= 1e-14);
    }
}

TEST_CASE("path_derivative against central differences") {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 200; ++k) {
        CounterRng rng(31, k);
        const std::size_t n = 1 + k % 6;
        const SymMat x = random_symmetric(n, 1.0, rng);
        const SymMat y = random_symmetric(n, 1.0, rng);
        const double t = rng.uniform(kFiniteDifferenceStep, 1.0 - kFiniteDifferenceStep);
        const double fd = (path_value(x, y, t + kFiniteDifferenceStep) - path_value(x, y, t - kFiniteDifferenceStep)) /
                          (2 * kFiniteDifferenceStep);
        const double d = path_derivative(x, y, t);
        worst = std::max(worst, std::abs(d - fd) / (1.0 + std::abs(d)));
    }
    CHECK(worst <= kFiniteDifferenceTolerance);
}

TEST_CASE("integral_identity_residual examples") {
    const SymMat x{{1.0, 2.0}, {2.0, -1.0}};
    CHECK(integral_identity_residual(x, x, 2) <= 1e-14);
    CHECK(integral_identity_residual(SymMat::identity(1), SymMat::zero(1), 256) <= 1e-10);
    CHECK_THROWS_AS(integral_identity_residual(x, x, 3), PreconditionError);
    CHECK_THROWS_AS(integral_identity_residual(x, x, 0), PreconditionError);
}

TEST_CASE("h1_monotonicity_check examples") {
    const SymMat y{{0.5, -1.0}, {-1.0, 2.0}};
    CHECK(h1_monotonicity_check(y, y).slack == 0.0);
    CHECK(h1_monotonicity_check(y, y).pass);
    CHECK(h1_monotonicity_check(y + SymMat::identity(2), y).slack > 0.0);
    const MonotonicityOutcome m = h1_monotonicity_check(SymMat::diagonal({10.0, 0.0}), SymMat::diagonal({0.0, -10.0}));
    CHECK(std::abs(m.slack - 2.9422553486074694) <= 1e-14);
    CHECK_THROWS_AS(h1_monotonicity_check(SymMat::diagonal({1.0, 0.0}), SymMat::diagonal({0.0, 1.0})),
                    PreconditionError);
}

TEST_CASE("h2_bound_check examples") {
    const SymMat y{{0.5, -1.0}, {-1.0, 2.0}};
    const BoundOutcome same = h2_bound_check(y, y, 0.5);
    CHECK(same.trace_slack >= 0.0);
    CHECK(same.holder_slack >= 0.0);

    const BoundOutcome b = h2_bound_check(SymMat::identity(2), SymMat::zero(2), 0.5);
    CHECK(b.gap == doctest::Approx(pi / 2));
    CHECK(b.trace_plus == doctest::Approx(2.0));
    CHECK(b.trace_slack == doctest::Approx(2.0 - pi / 2));
    CHECK(b.holder_slack == doctest::Approx(2 * pi * std::sqrt(2.0) - pi / 2));
    CHECK(b.pass);

    CHECK_THROWS_AS(h2_bound_check(y, y, 0.0), PreconditionError);
    CHECK_THROWS_AS(h2_bound_check(y, y, 1.0), PreconditionError);
}

TEST_CASE("property: oddness and orthogonal invariance") {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        CounterRng rng(47, k);
        const std::size_t n = 1 + k % 8;
        const SymMat x = random_symmetric(n, k % 2 ? 10.0 : 1.0, rng);
        CHECK(std::abs(lagrangian_angle(-x) + lagrangian_angle(x)) <= 1e-12);
        const SquareMatrix q = eigen_decompose(random_symmetric(n, 1.0, rng)).basis;
        CHECK(std::abs(lagrangian_angle(congruence(q, x)) - lagrangian_angle(x)) <= 1e-10);
    }
}

TEST_CASE("property: range and gap bound") {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        CounterRng rng(53, k);
        const std::size_t n = 1 + k % 6;
        const SymMat x = random_symmetric(n, 10.0, rng);
        const SymMat y = random_symmetric(n, 10.0, rng);
        const double bound = static_cast<double>(n) * pi / 2;
        CHECK(std::abs(lagrangian_angle(x)) < bound);
        CHECK(lagrangian_angle(x) - lagrangian_angle(y) < static_cast<double>(n) * pi);
    }
}

TEST_CASE("property: path derivative is non-negative along ordered segments") {
    for (std::uint64_t k = 0; k < 1000; ++k) {
        CounterRng rng(59, k);
        const OrderedPair p = random_ordered_pair(1 + k % 6, 1.0, rng);
        CHECK(path_derivative(p.x, p.y, rng.uniform()) >= -kHypothesisSlackTolerance);
    }
}

TEST_CASE("HypothesisReport bookkeeping") {
    HypothesisReport r;
    r.record_slack(0.5, true);
    r.record_slack(-2.0, false);
    r.record_residual(1e-12, true);
    CHECK(r.trials == 3);
    CHECK(r.violations == 1);
    CHECK(r.worst_margin == -2.0);
    CHECK(r.max_residual == 1e-12);
}
