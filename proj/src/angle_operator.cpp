#include "lagflow/angle_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lagflow/error.hpp"

namespace lagflow {

namespace {

void require_same_order(const SymMat& x, const SymMat& y, const char* what) {
    if (x.order() != y.order()) {
        std::ostringstream msg;
        msg << what << ": order mismatch (" << x.order() << " vs " << y.order() << ")";
        throw PreconditionError(msg.str());
    }
}

SymMat segment(const SymMat& x, const SymMat& y, double t) {
    return t * x + (1.0 - t) * y;
}

void require_unit_interval(double t, const char* what) {
    if (!(t >= 0.0 && t <= 1.0)) {
        std::ostringstream msg;
        msg << what << ": t = " << t << " is outside [0, 1]";
        throw PreconditionError(msg.str());
    }
}

} // namespace

double lagrangian_angle(const SymMat& x) {
    double f = 0.0;
    for (double l : eigenvalues(x)) {
        f += std::atan(l);
    }
    return f;
}

std::complex<double> complex_determinant(std::span<const std::complex<double>> a, std::size_t n) {
    if (a.size() != n * n) {
        throw PreconditionError("complex_determinant: storage does not match n*n");
    }
    std::vector<std::complex<double>> lu(a.begin(), a.end());
    std::complex<double> det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu[i * n + k]) > std::abs(lu[pivot * n + k])) {
                pivot = i;
            }
        }
        if (lu[pivot * n + k] == 0.0) {
            return 0.0;
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(lu[k * n + j], lu[pivot * n + j]);
            }
            det = -det;
        }
        const std::complex<double> d = lu[k * n + k];
        det *= d;
        for (std::size_t i = k + 1; i < n; ++i) {
            const std::complex<double> m = lu[i * n + k] / d;
            for (std::size_t j = k + 1; j < n; ++j) {
                lu[i * n + j] -= m * lu[k * n + j];
            }
        }
    }
    return det;
}

std::complex<double> det_identity_plus_i(const SymMat& x, double s) {
    const std::size_t n = x.order();
    std::vector<std::complex<double>> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = {i == j ? 1.0 : 0.0, s * x(i, j)};
        }
    }
    return complex_determinant(a, n);
}

double detform_residual(const SymMat& x) {
    const double f = lagrangian_angle(x);
    const std::complex<double> plus = det_identity_plus_i(x, 1.0);
    const std::complex<double> minus = det_identity_plus_i(x, -1.0);
    const std::complex<double> rotation = std::polar(1.0, 2.0 * f);
    return std::abs(rotation * minus - plus) / std::abs(plus);
}

double path_value(const SymMat& x, const SymMat& y, double t) {
    require_same_order(x, y, "path_value");
    require_unit_interval(t, "path_value");
    return lagrangian_angle(segment(x, y, t));
}

double path_derivative(const SymMat& x, const SymMat& y, double t) {
    require_same_order(x, y, "path_derivative");
    require_unit_interval(t, "path_derivative");
    const SymMat m = segment(x, y, t);
    const SymMat c = SymMat::identity(m.order()) + symmetric_square(m);
    SquareMatrix z;
    try {
        z = spd_solve(c, (x - y).matrix());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("path_derivative: I + M^2 failed to factor, ") + e.what());
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < z.order(); ++i) {
        tr += z(i, i);
    }
    return tr;
}

double integral_identity_residual(const SymMat& x, const SymMat& y, int panels) {
    require_same_order(x, y, "integral_identity_residual");
    if (panels < 2 || panels % 2 != 0) {
        throw PreconditionError("integral_identity_residual: panel count must be even and at least 2");
    }
    const double h = 1.0 / panels;
    double odd = 0.0;
    double even = 0.0;
    for (int k = 1; k < panels; ++k) {
        const double v = path_derivative(x, y, k * h);
        (k % 2 == 1 ? odd : even) += v;
    }
    const double q =
        h / 3.0 * (path_derivative(x, y, 0.0) + 4.0 * odd + 2.0 * even + path_derivative(x, y, 1.0));
    return std::abs(lagrangian_angle(x) - lagrangian_angle(y) - q);
}

MonotonicityOutcome h1_monotonicity_check(const SymMat& x, const SymMat& y) {
    require_same_order(x, y, "h1_monotonicity_check");
    if (!loewner_geq(x, y, kLoewnerPreconditionTolerance)) {
        throw PreconditionError("h1_monotonicity_check: requires X >= Y in the Loewner order");
    }
    MonotonicityOutcome out;
    out.slack = lagrangian_angle(x) - lagrangian_angle(y);
    out.pass = out.slack >= -kHypothesisSlackTolerance;
    return out;
}

BoundOutcome h2_bound_check(const SymMat& x, const SymMat& y, double alpha) {
    require_same_order(x, y, "h2_bound_check");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("h2_bound_check: alpha must lie in (0, 1)");
    }
    const double n = static_cast<double>(x.order());
    BoundOutcome out;
    out.gap = lagrangian_angle(x) - lagrangian_angle(y);
    out.trace_plus = trace_positive_part(x - y);
    out.trace_slack = out.trace_plus - out.gap;
    out.holder_slack = n * std::numbers::pi * std::pow(out.trace_plus, alpha) - out.gap;
    out.pass = out.trace_slack >= -kHypothesisSlackTolerance && out.holder_slack >= -kHypothesisSlackTolerance;
    return out;
}

void HypothesisReport::record_slack(double slack, bool pass) {
    worst_margin = trials == 0 ? slack : std::min(worst_margin, slack);
    ++trials;
    if (!pass) {
        ++violations;
    }
}

void HypothesisReport::record_residual(double residual, bool pass) {
    max_residual = trials == 0 ? residual : std::max(max_residual, residual);
    ++trials;
    if (!pass) {
        ++violations;
    }
}

} // namespace lagflow
