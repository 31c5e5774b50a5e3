#include "lagflow/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lagflow/error.hpp"

namespace lagflow {

namespace {

void require_same_order(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream msg;
        msg << what << ": order mismatch (" << a << " vs " << b << ")";
        throw PreconditionError(msg.str());
    }
}

SquareMatrix rows_to_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    return SquareMatrix(rows);
}

} // namespace

// ---------------------------------------------------------------- SquareMatrix

SquareMatrix::SquareMatrix(std::size_t n, double fill) : n_(n), a_(n * n, fill) {}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), a_() {
    a_.reserve(n_ * n_);
    for (const auto& row : rows) {
        if (row.size() != n_) {
            throw PreconditionError("SquareMatrix: every row must have as many entries as there are rows");
        }
        a_.insert(a_.end(), row.begin(), row.end());
    }
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

double SquareMatrix::max_abs() const {
    double r = 0.0;
    for (double v : a_) {
        r = std::max(r, std::abs(v));
    }
    return r;
}

SquareMatrix SquareMatrix::transpose() const {
    SquareMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_order(a.n_, b.n_, "matrix product");
    const std::size_t n = a.n_;
    SquareMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += a(i, k) * b(k, j);
            }
            c(i, j) = s;
        }
    }
    return c;
}

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_order(a.n_, b.n_, "matrix sum");
    SquareMatrix c = a;
    for (std::size_t k = 0; k < c.a_.size(); ++k) {
        c.a_[k] += b.a_[k];
    }
    return c;
}

SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_order(a.n_, b.n_, "matrix difference");
    SquareMatrix c = a;
    for (std::size_t k = 0; k < c.a_.size(); ++k) {
        c.a_[k] -= b.a_[k];
    }
    return c;
}

SquareMatrix operator*(double s, const SquareMatrix& a) {
    SquareMatrix c = a;
    for (double& v : c.a_) {
        v *= s;
    }
    return c;
}

// ---------------------------------------------------------------------- SymMat

SymMat::SymMat(const SquareMatrix& m) : m_(m) {
    const std::size_t n = m.order();
    if (n == 0) {
        throw PreconditionError("SymMat: order must be at least 1");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (!(std::abs(a - b) <= kSymmetryTolerance)) {
                std::ostringstream msg;
                msg << "SymMat: entries (" << i << "," << j << ") and (" << j << "," << i
                    << ") differ by " << std::abs(a - b);
                throw PreconditionError(msg.str());
            }
            const double mid = 0.5 * (a + b);
            m_(i, j) = mid;
            m_(j, i) = mid;
        }
    }
    for (double v : m_.data()) {
        if (!std::isfinite(v)) {
            throw PreconditionError("SymMat: entries must be finite");
        }
    }
}

SymMat::SymMat(std::initializer_list<std::initializer_list<double>> rows)
    : SymMat(rows_to_matrix(rows)) {}

SymMat SymMat::zero(std::size_t n) {
    if (n == 0) {
        throw PreconditionError("SymMat: order must be at least 1");
    }
    return SymMat(SquareMatrix(n), Trusted{});
}

SymMat SymMat::identity(std::size_t n) {
    if (n == 0) {
        throw PreconditionError("SymMat: order must be at least 1");
    }
    return SymMat(SquareMatrix::identity(n), Trusted{});
}

SymMat SymMat::diagonal(std::span<const double> d) {
    SquareMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return SymMat(m);
}

SymMat SymMat::diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
}

double SymMat::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < order(); ++i) {
        t += m_(i, i);
    }
    return t;
}

SymMat operator+(const SymMat& a, const SymMat& b) {
    return SymMat(a.m_ + b.m_, SymMat::Trusted{});
}

SymMat operator-(const SymMat& a, const SymMat& b) {
    return SymMat(a.m_ - b.m_, SymMat::Trusted{});
}

SymMat operator-(const SymMat& a) {
    return SymMat(-1.0 * a.m_, SymMat::Trusted{});
}

SymMat operator*(double s, const SymMat& a) {
    return SymMat(s * a.m_, SymMat::Trusted{});
}

SymMat symmetric_square(const SymMat& m) {
    const std::size_t n = m.order();
    SquareMatrix p(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += m(i, k) * m(k, j);
            }
            p(i, j) = s;
            p(j, i) = s;
        }
    }
    return SymMat(std::move(p), SymMat::Trusted{});
}

SymMat gram(const SquareMatrix& l) {
    const std::size_t n = l.order();
    if (n == 0) {
        throw PreconditionError("gram: order must be at least 1");
    }
    SquareMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += l(i, k) * l(j, k);
            }
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return SymMat(std::move(g), SymMat::Trusted{});
}

SymMat congruence(const SquareMatrix& q, const SymMat& x) {
    require_same_order(q.order(), x.order(), "congruence");
    const SquareMatrix qx = q * x.matrix();
    const std::size_t n = x.order();
    SquareMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += qx(i, k) * q(j, k);
            }
            r(i, j) = s;
            r(j, i) = s;
        }
    }
    return SymMat(std::move(r), SymMat::Trusted{});
}

// ------------------------------------------------------------------ eigen

SquareMatrix EigenDecomp::reconstruct() const {
    const std::size_t n = eigenvalues.size();
    SquareMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s += basis(i, k) * eigenvalues[k] * basis(j, k);
            }
            r(i, j) = s;
        }
    }
    return r;
}

namespace {

double off_diagonal_norm(const SquareMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.order(); ++i) {
        for (std::size_t j = i + 1; j < a.order(); ++j) {
            s += 2.0 * a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

// Annihilates a(p,q) with a Jacobi rotation applied as A <- J^T A J, V <- V J.
void rotate(SquareMatrix& a, SquareMatrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const std::size_t n = a.order();

    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) {
            continue;
        }
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(p, k) = a(k, p);
        a(k, q) = s * akp + c * akq;
        a(q, k) = a(k, q);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

} // namespace

EigenDecomp eigen_decompose(const SymMat& x, double tol) {
    if (!(tol > 0.0)) {
        throw PreconditionError("eigen_decompose: tolerance must be positive");
    }
    const std::size_t n = x.order();
    SquareMatrix a = x.matrix();
    SquareMatrix v = SquareMatrix::identity(n);
    const double threshold = tol * std::max(1.0, x.max_abs());

    int sweeps = 0;
    auto sweep = [&] {
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Entries below roundoff of both diagonals are dropped outright.
                const double g = 100.0 * std::abs(apq);
                if (sweeps > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
            }
        }
    };

    double residual = off_diagonal_norm(a);
    while (residual >= threshold) {
        if (sweeps == kJacobiSweepLimit) {
            std::ostringstream msg;
            msg << "eigen_decompose: no convergence after " << kJacobiSweepLimit
                << " sweeps, off-diagonal residual " << residual << " (threshold " << threshold << ")";
            throw NumericalError(msg.str());
        }
        sweep();
        residual = off_diagonal_norm(a);
    }
    // The leftover off-diagonal mass perturbs eigenvectors to first order; one
    // more sweep squares it away (convergence is quadratic by now).
    if (residual > 0.0 && sweeps < kJacobiSweepLimit) {
        sweep();
        residual = off_diagonal_norm(a);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomp out{SquareMatrix(n), std::vector<double>(n), sweeps, residual};
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        out.eigenvalues[col] = a(src, src);
        std::size_t lead = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs(v(k, src)) > std::abs(v(lead, src))) {
                lead = k;
            }
        }
        const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            out.basis(k, col) = sign * v(k, src);
        }
    }
    return out;
}

std::vector<double> eigenvalues(const SymMat& x) {
    return eigen_decompose(x).eigenvalues;
}

SymMat positive_part(const SymMat& x) {
    EigenDecomp d = eigen_decompose(x);
    for (double& l : d.eigenvalues) {
        l = std::max(l, 0.0);
    }
    SquareMatrix r = d.reconstruct();
    // reconstruct() is symmetric only up to summation order; mirror the upper triangle.
    for (std::size_t i = 0; i < r.order(); ++i) {
        for (std::size_t j = i + 1; j < r.order(); ++j) {
            r(j, i) = r(i, j);
        }
    }
    return SymMat(r);
}

double trace_positive_part(const SymMat& x) {
    double s = 0.0;
    for (double l : eigenvalues(x)) {
        s += std::max(l, 0.0);
    }
    return s;
}

bool loewner_geq(const SymMat& x, const SymMat& y, double tol) {
    require_same_order(x.order(), y.order(), "loewner_geq");
    return eigenvalues(x - y).back() >= -tol;
}

SquareMatrix spd_solve(const SymMat& c, const SquareMatrix& m) {
    require_same_order(c.order(), m.order(), "spd_solve");
    const std::size_t n = c.order();

    // Lower Cholesky factor, stored densely.
    SquareMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = c(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        if (!(d > 0.0)) {
            std::ostringstream msg;
            msg << "spd_solve: matrix is not positive definite (pivot " << j << " = " << d << ")";
            throw NumericalError(msg.str());
        }
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = c(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / l(j, j);
        }
    }

    SquareMatrix z = m;
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = z(i, col);
            for (std::size_t k = 0; k < i; ++k) {
                s -= l(i, k) * z(k, col);
            }
            z(i, col) = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = z(ii, col);
            for (std::size_t k = ii + 1; k < n; ++k) {
                s -= l(k, ii) * z(k, col);
            }
            z(ii, col) = s / l(ii, ii);
        }
    }
    return z;
}

WeylReport weyl_monotonicity_check(const SymMat& x, const SymMat& y) {
    require_same_order(x.order(), y.order(), "weyl_monotonicity_check");
    if (!loewner_geq(x, y, kLoewnerPreconditionTolerance)) {
        throw PreconditionError("weyl_monotonicity_check: requires X >= Y in the Loewner order");
    }
    const std::vector<double> lx = eigenvalues(x);
    const std::vector<double> ly = eigenvalues(y);
    WeylReport r;
    r.gaps.resize(lx.size());
    r.worst_gap = lx[0] - ly[0];
    for (std::size_t j = 0; j < lx.size(); ++j) {
        r.gaps[j] = lx[j] - ly[j];
        r.worst_gap = std::min(r.worst_gap, r.gaps[j]);
    }
    r.pass = r.worst_gap >= -kWeylGapTolerance;
    return r;
}

} // namespace lagflow
