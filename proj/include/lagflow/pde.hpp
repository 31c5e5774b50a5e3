#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "lagflow/symmat.hpp"

namespace lagflow {

using Point = std::array<double, 2>;

/// Uniform lattice in one or two dimensions. Node (i, j) sits at
/// origin + (i*h, j*h); flat index is i + counts[0]*j. In 1D only axis 0 is used.
class Grid {
public:
    static constexpr std::size_t kMinCount = 5;

    Grid(int dim, std::array<std::size_t, 2> counts, double h, Point origin = {0.0, 0.0});

    static Grid line(std::size_t count, double h, double origin = 0.0);
    static Grid square(std::size_t count, double h, Point origin = {0.0, 0.0});

    int dim() const { return dim_; }
    std::size_t count(int axis) const { return counts_[axis]; }
    double spacing() const { return h_; }
    const Point& origin() const { return origin_; }

    std::size_t node_count() const { return dim_ == 1 ? counts_[0] : counts_[0] * counts_[1]; }
    std::size_t index(std::size_t i, std::size_t j = 0) const { return i + counts_[0] * j; }
    std::array<std::size_t, 2> multi_index(std::size_t node) const;
    double coordinate(int axis, std::size_t i) const { return origin_[axis] + static_cast<double>(i) * h_; }
    Point point(std::size_t node) const;

    /// Outer layer of nodes (ends in 1D, frame in 2D).
    bool on_boundary(std::size_t node) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int dim_;
    std::array<std::size_t, 2> counts_;
    double h_;
    Point origin_;
};

/// Nodal values of u on a grid at one time level. Values are finite.
class Field {
public:
    Field(Grid grid, std::vector<double> values, double time = 0.0);

    static Field sample(const Grid& grid, const std::function<double(const Point&)>& fn, double time = 0.0);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t node) const { return values_[node]; }
    double time() const { return time_; }

private:
    Grid grid_;
    std::vector<double> values_;
    double time_;
};

enum class BoundaryKind { Dirichlet, Periodic };

/// Dirichlet data is a function of (node coordinates, time); periodic has none.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Periodic;
    std::function<double(const Point&, double)> value;

    static BoundaryCondition periodic();
    static BoundaryCondition dirichlet(std::function<double(const Point&, double)> value);
    static BoundaryCondition zero_dirichlet();
};

/// Central-difference Hessian at a node; the mixed term uses the four diagonal
/// neighbours. Exact on polynomials of degree <= 2. Dirichlet boundary nodes are
/// rejected; periodic indices wrap.
SymMat discrete_hessian(const Field& f, std::size_t node, BoundaryKind kind);

/// Lagrangian angle of the discrete Hessian at every node where it is defined.
/// Dirichlet boundary entries are zero.
std::vector<double> rhs(const Field& f, BoundaryKind kind);

/// Largest explicit step for which the own-node coefficient of the update stays
/// non-negative: h^2/2 in 1D, h^2/4 in 2D. See docs/cfl.md for the derivation.
double cfl_max_dt(double h, int dim);

struct StepOptions {
    unsigned threads = 1;
};

/// One explicit Euler step u + dt*rhs(u), reading only the previous field; then
/// Dirichlet nodes are overwritten with the boundary data at t + dt.
/// Throws PreconditionError if dt is not in (0, cfl_max_dt], NumericalError on
/// non-finite output.
Field step(const Field& f, double dt, const BoundaryCondition& bc, const StepOptions& options = {});

struct ProblemSpec {
    Grid grid;
    BoundaryCondition bc;
    std::function<double(const Point&)> initial;
    double horizon = 0.0;
    double cfl_fraction = 0.9;
    /// Keep every k-th step; 0 keeps only the endpoints.
    std::size_t snapshot_every = 0;
    unsigned threads = 1;
};

struct Trajectory {
    std::vector<Field> snapshots; // first at t = 0, last at t = horizon
    std::size_t steps = 0;
    double dt = 0.0;              // nominal step; the last one may be shorter
    double max_drift = 0.0;       // sup |u(T) - u0| over all nodes

    const Field& initial() const { return snapshots.front(); }
    const Field& final() const { return snapshots.back(); }
};

/// Marches to the horizon with dt = cfl_fraction * cfl_max_dt, shortening the
/// last step to land on it exactly. Non-finite values abort with the step index.
Trajectory solve(const ProblemSpec& spec);

/// min over nodes of v - u. Grids and times must match.
double comparison_gap(const Field& u, const Field& v);

} // namespace lagflow
