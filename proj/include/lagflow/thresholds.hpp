#pragma once

// Every pass/fail threshold used by checks, experiments and reports.
//
//   name                          value    meaning
//   kLoewnerPreconditionTolerance 1e-12    X >= Y accepted when lambda_min(X-Y) >= -tol
//   kWeylGapTolerance             1e-10    sorted eigenvalue gaps lambda_j(X)-mu_j(Y)
//   kHypothesisSlackTolerance     1e-10    slack of monotonicity / trace / Holder bounds
//   kAlgebraicResidualTolerance   1e-10    determinant-form residual
//   kFiniteDifferenceTolerance    1e-6     |F' - central diff| / (1 + |F'|), step 1e-5
//   kFiniteDifferenceStep         1e-5
//   kQuadratureResidualTolerance  1e-8     integral identity residual, Simpson
//   kQuadraturePanels             256
//   kExactSolutionTolerance       1e-10    quadratic exact solutions, interior sup error
//   kComparisonTolerance1D        1e-12    min gap may drop this far below its start (1D)
//   kComparisonTolerance2D        1e-8     same, 2D (empirical, narrow stencil)
//   kDriftSlack                   1e-8     sup|u(T)-u0| <= dim*pi/2*T + slack
//   kShiftEquivarianceTolerance   1e-12
//   kLinearAdditionTolerance      1e-10
//   kConvergenceOrderMin/Max      1.7/2.3  observed order for smooth 1D data
//   kUniquenessProxyFactor        10       disagreement <= factor*h^2 across CFL fractions

namespace lagflow {

inline constexpr double kLoewnerPreconditionTolerance = 1e-12;
inline constexpr double kWeylGapTolerance = 1e-10;
inline constexpr double kHypothesisSlackTolerance = 1e-10;
inline constexpr double kAlgebraicResidualTolerance = 1e-10;
inline constexpr double kFiniteDifferenceTolerance = 1e-6;
inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kQuadratureResidualTolerance = 1e-8;
inline constexpr int kQuadraturePanels = 256;
inline constexpr double kExactSolutionTolerance = 1e-10;
inline constexpr double kComparisonTolerance1D = 1e-12;
inline constexpr double kComparisonTolerance2D = 1e-8;
inline constexpr double kDriftSlack = 1e-8;
inline constexpr double kShiftEquivarianceTolerance = 1e-12;
inline constexpr double kLinearAdditionTolerance = 1e-10;
inline constexpr double kConvergenceOrderMin = 1.7;
inline constexpr double kConvergenceOrderMax = 2.3;
inline constexpr double kUniquenessProxyFactor = 10.0;

} // namespace lagflow
