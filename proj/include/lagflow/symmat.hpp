#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "lagflow/thresholds.hpp"

namespace lagflow {

/// Dense square matrix of doubles, row-major. General (not necessarily symmetric)
/// companion of SymMat; used for orthogonal factors and solve right-hand sides.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0);
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix identity(std::size_t n);

    std::size_t order() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    std::span<const double> data() const { return a_; }

    double max_abs() const;
    SquareMatrix transpose() const;

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);
    friend SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b);
    friend SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b);
    friend SquareMatrix operator*(double s, const SquareMatrix& a);
    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Real symmetric n-by-n matrix. Entries (i,j) and (j,i) are bitwise equal.
///
/// Construction from a general matrix accepts asymmetry up to kSymmetryTolerance
/// (absolute, per entry pair) and averages it away; anything larger throws
/// PreconditionError.
class SymMat {
public:
    static constexpr double kSymmetryTolerance = 1e-12;

    explicit SymMat(const SquareMatrix& m);
    SymMat(std::initializer_list<std::initializer_list<double>> rows);

    static SymMat zero(std::size_t n);
    static SymMat identity(std::size_t n);
    static SymMat diagonal(std::span<const double> d);
    static SymMat diagonal(std::initializer_list<double> d);

    std::size_t order() const { return m_.order(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const SquareMatrix& matrix() const { return m_; }

    double trace() const;
    double max_abs() const { return m_.max_abs(); }

    friend SymMat operator+(const SymMat& a, const SymMat& b);
    friend SymMat operator-(const SymMat& a, const SymMat& b);
    friend SymMat operator-(const SymMat& a);
    friend SymMat operator*(double s, const SymMat& a);
    friend bool operator==(const SymMat&, const SymMat&) = default;

private:
    struct Trusted {};
    SymMat(SquareMatrix m, Trusted) : m_(std::move(m)) {}

    friend SymMat symmetric_square(const SymMat&);
    friend SymMat gram(const SquareMatrix&);
    friend SymMat congruence(const SquareMatrix&, const SymMat&);

    SquareMatrix m_;
};

/// M*M, exactly symmetric.
SymMat symmetric_square(const SymMat& m);
/// L*L^T, exactly symmetric and positive semidefinite up to roundoff.
SymMat gram(const SquareMatrix& l);
/// Q*X*Q^T, mirrored from the upper triangle.
SymMat congruence(const SquareMatrix& q, const SymMat& x);

struct EigenDecomp {
    SquareMatrix basis;              // columns are unit eigenvectors
    std::vector<double> eigenvalues; // descending
    int sweeps = 0;
    double off_diagonal_residual = 0.0;

    SquareMatrix reconstruct() const;
};

inline constexpr double kDefaultEigenTolerance = 1e-12;
inline constexpr int kJacobiSweepLimit = 100;

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over all (p,q) pairs in row order, annihilating each off-diagonal
/// entry with a Rutishauser-form rotation, until the off-diagonal Frobenius norm
/// drops below tol * max(1, max|X|). Eigenvalues come back in descending order
/// (stable for ties) and each eigenvector is signed so its largest-magnitude
/// component (first one on ties) is positive. Throws NumericalError naming the
/// residual if kJacobiSweepLimit sweeps are not enough.
EigenDecomp eigen_decompose(const SymMat& x, double tol = kDefaultEigenTolerance);

/// Descending eigenvalues only.
std::vector<double> eigenvalues(const SymMat& x);

/// X+ = P diag(max(lambda, 0)) P^T.
SymMat positive_part(const SymMat& x);
double trace_positive_part(const SymMat& x);

/// True iff lambda_min(X - Y) >= -tol.
bool loewner_geq(const SymMat& x, const SymMat& y, double tol);

/// Solves C Z = M by Cholesky factorization. Throws NumericalError when a pivot
/// is not strictly positive.
SquareMatrix spd_solve(const SymMat& c, const SquareMatrix& m);

struct WeylReport {
    std::vector<double> gaps; // lambda_j(X) - mu_j(Y), both spectra descending
    double worst_gap = 0.0;
    bool pass = false;
};

/// Checks that X >= Y forces every sorted eigenvalue of X above its partner in Y.
/// X >= Y is a precondition (PreconditionError otherwise).
WeylReport weyl_monotonicity_check(const SymMat& x, const SymMat& y);

} // namespace lagflow
