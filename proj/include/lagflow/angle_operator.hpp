#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lagflow/symmat.hpp"
#include "lagflow/thresholds.hpp"

namespace lagflow {

/// F(X) = sum_j arctan(lambda_j(X)), the Lagrangian angle of a Hessian.
/// Always strictly inside (-n pi/2, n pi/2).
double lagrangian_angle(const SymMat& x);

/// Determinant of a dense complex n-by-n matrix (row-major) by LU with partial
/// pivoting. Independent of any eigenvalue computation.
std::complex<double> complex_determinant(std::span<const std::complex<double>> a, std::size_t n);

/// det(I + s*i*X) via complex_determinant, s = +1 or -1.
std::complex<double> det_identity_plus_i(const SymMat& x, double s);

/// |exp(2i F(X)) det(I - iX) - det(I + iX)| / |det(I + iX)|.
///
/// F comes from the eigenvalues, the determinants from complex LU, so the two
/// sides are computed along unrelated paths. The exponential form sidesteps
/// the branch of the complex logarithm, which the log-determinant expression
/// of F would need once |F| exceeds pi.
double detform_residual(const SymMat& x);

/// F(tX + (1-t)Y), t in [0, 1].
double path_value(const SymMat& x, const SymMat& y, double t);

/// d/dt F(tX + (1-t)Y) = tr((I + M^2)^{-1} (X - Y)) with M = tX + (1-t)Y.
double path_derivative(const SymMat& x, const SymMat& y, double t);

/// |F(X) - F(Y) - Q| where Q is composite Simpson quadrature of path_derivative
/// over [0, 1] with `panels` (even, >= 2) subintervals.
double integral_identity_residual(const SymMat& x, const SymMat& y, int panels = kQuadraturePanels);

struct MonotonicityOutcome {
    double slack = 0.0; // F(X) - F(Y)
    bool pass = false;
};

/// F(X) >= F(Y) given X >= Y. Throws PreconditionError when X >= Y fails,
/// so a bad pair is never mistaken for a violation.
MonotonicityOutcome h1_monotonicity_check(const SymMat& x, const SymMat& y);

struct BoundOutcome {
    double gap = 0.0;          // F(X) - F(Y)
    double trace_plus = 0.0;   // tr (X - Y)^+
    double trace_slack = 0.0;  // tr(X-Y)^+ - gap
    double holder_slack = 0.0; // n pi (tr(X-Y)^+)^alpha - gap
    bool pass = false;
};

/// Trace bound F(X) - F(Y) <= tr(X-Y)^+ and the Holder form with constant n pi.
BoundOutcome h2_bound_check(const SymMat& x, const SymMat& y, double alpha);

/// Aggregate of one family of checks.
struct HypothesisReport {
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    double worst_margin = 0.0; // minimum slack seen; meaningless while trials == 0
    double max_residual = 0.0;
    std::uint64_t seed = 0;

    void record_slack(double slack, bool pass);
    void record_residual(double residual, bool pass);
};

} // namespace lagflow
