#include "lagflow/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "lagflow/angle_operator.hpp"
#include "lagflow/error.hpp"

namespace lagflow {

// ------------------------------------------------------------------------ Grid

Grid::Grid(int dim, std::array<std::size_t, 2> counts, double h, Point origin)
    : dim_(dim), counts_(counts), h_(h), origin_(origin) {
    if (dim != 1 && dim != 2) {
        throw PreconditionError("Grid: dimension must be 1 or 2");
    }
    if (dim == 1) {
        counts_[1] = 1;
        origin_[1] = 0.0;
    }
    for (int axis = 0; axis < dim; ++axis) {
        if (counts_[axis] < kMinCount) {
            std::ostringstream msg;
            msg << "Grid: axis " << axis << " has " << counts_[axis] << " nodes, need at least " << kMinCount;
            throw PreconditionError(msg.str());
        }
        if (!std::isfinite(origin_[axis])) {
            throw PreconditionError("Grid: origin must be finite");
        }
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw PreconditionError("Grid: spacing h must be positive");
    }
}

Grid Grid::line(std::size_t count, double h, double origin) {
    return Grid(1, {count, 1}, h, {origin, 0.0});
}

Grid Grid::square(std::size_t count, double h, Point origin) {
    return Grid(2, {count, count}, h, origin);
}

std::array<std::size_t, 2> Grid::multi_index(std::size_t node) const {
    return {node % counts_[0], node / counts_[0]};
}

Point Grid::point(std::size_t node) const {
    const auto [i, j] = multi_index(node);
    return {coordinate(0, i), dim_ == 2 ? coordinate(1, j) : 0.0};
}

bool Grid::on_boundary(std::size_t node) const {
    const auto [i, j] = multi_index(node);
    if (i == 0 || i + 1 == counts_[0]) {
        return true;
    }
    return dim_ == 2 && (j == 0 || j + 1 == counts_[1]);
}

// ----------------------------------------------------------------------- Field

Field::Field(Grid grid, std::vector<double> values, double time)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
    if (values_.size() != grid_.node_count()) {
        std::ostringstream msg;
        msg << "Field: " << values_.size() << " values for " << grid_.node_count() << " nodes";
        throw PreconditionError(msg.str());
    }
    if (!(time_ >= 0.0)) {
        throw PreconditionError("Field: time must be non-negative");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            std::ostringstream msg;
            msg << "Field: non-finite value at node " << k;
            throw NumericalError(msg.str());
        }
    }
}

Field Field::sample(const Grid& grid, const std::function<double(const Point&)>& fn, double time) {
    std::vector<double> v(grid.node_count());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = fn(grid.point(k));
    }
    return Field(grid, std::move(v), time);
}

// ------------------------------------------------------------------ boundaries

BoundaryCondition BoundaryCondition::periodic() {
    return {BoundaryKind::Periodic, {}};
}

BoundaryCondition BoundaryCondition::dirichlet(std::function<double(const Point&, double)> value) {
    if (!value) {
        throw PreconditionError("BoundaryCondition: Dirichlet data must be provided");
    }
    return {BoundaryKind::Dirichlet, std::move(value)};
}

BoundaryCondition BoundaryCondition::zero_dirichlet() {
    return dirichlet([](const Point&, double) { return 0.0; });
}

// ------------------------------------------------------------------- operators

namespace {

std::size_t wrap(std::size_t i, std::ptrdiff_t offset, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(i) + offset) % m + m) % m);
}

double hessian_entry_1d(const Field& f, std::size_t i) {
    const Grid& g = f.grid();
    const std::size_t n = g.count(0);
    const double h2 = g.spacing() * g.spacing();
    return (f[wrap(i, 1, n)] - 2.0 * f[i] + f[wrap(i, -1, n)]) / h2;
}

// No bounds or boundary checks; callers have established the stencil is valid.
SymMat hessian_unchecked(const Field& f, std::size_t node) {
    const Grid& g = f.grid();
    if (g.dim() == 1) {
        return SymMat{{hessian_entry_1d(f, node)}};
    }
    const std::size_t nx = g.count(0);
    const std::size_t ny = g.count(1);
    const auto [i, j] = g.multi_index(node);
    const std::size_t ip = wrap(i, 1, nx);
    const std::size_t im = wrap(i, -1, nx);
    const std::size_t jp = wrap(j, 1, ny);
    const std::size_t jm = wrap(j, -1, ny);
    const double h2 = g.spacing() * g.spacing();
    auto u = [&](std::size_t a, std::size_t b) { return f[g.index(a, b)]; };

    const double c = u(i, j);
    const double uxx = (u(ip, j) - 2.0 * c + u(im, j)) / h2;
    const double uyy = (u(i, jp) - 2.0 * c + u(i, jm)) / h2;
    const double uxy = (u(ip, jp) + u(im, jm) - u(ip, jm) - u(im, jp)) / (4.0 * h2);
    return SymMat{{uxx, uxy}, {uxy, uyy}};
}

void check_node(const Field& f, std::size_t node, BoundaryKind kind) {
    if (node >= f.grid().node_count()) {
        throw PreconditionError("discrete_hessian: node index out of range");
    }
    if (kind == BoundaryKind::Dirichlet && f.grid().on_boundary(node)) {
        std::ostringstream msg;
        msg << "discrete_hessian: node " << node << " lies on the Dirichlet boundary";
        throw PreconditionError(msg.str());
    }
}

bool updated(const Grid& g, std::size_t node, BoundaryKind kind) {
    return kind == BoundaryKind::Periodic || !g.on_boundary(node);
}

template <typename Fn>
void for_each_node(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count < 2 * threads) {
        for (std::size_t k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t k = begin; k < end; ++k) {
                fn(k);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

Field advance(const Field& f, double dt, double t_new, const BoundaryCondition& bc, unsigned threads) {
    const Grid& g = f.grid();
    std::vector<double> next(g.node_count());
    for_each_node(next.size(), threads, [&](std::size_t k) {
        if (updated(g, k, bc.kind)) {
            next[k] = f[k] + dt * lagrangian_angle(hessian_unchecked(f, k));
        } else {
            next[k] = bc.value(g.point(k), t_new);
        }
    });
    for (std::size_t k = 0; k < next.size(); ++k) {
        if (!std::isfinite(next[k])) {
            std::ostringstream msg;
            msg << "step: non-finite value at node " << k;
            throw NumericalError(msg.str());
        }
    }
    return Field(g, std::move(next), t_new);
}

} // namespace

SymMat discrete_hessian(const Field& f, std::size_t node, BoundaryKind kind) {
    check_node(f, node, kind);
    return hessian_unchecked(f, node);
}

std::vector<double> rhs(const Field& f, BoundaryKind kind) {
    const Grid& g = f.grid();
    std::vector<double> out(g.node_count(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (updated(g, k, kind)) {
            out[k] = lagrangian_angle(hessian_unchecked(f, k));
        }
    }
    return out;
}

double cfl_max_dt(double h, int dim) {
    if (!(h > 0.0)) {
        throw PreconditionError("cfl_max_dt: h must be positive");
    }
    if (dim != 1 && dim != 2) {
        throw PreconditionError("cfl_max_dt: dimension must be 1 or 2");
    }
    return h * h / (2.0 * dim);
}

Field step(const Field& f, double dt, const BoundaryCondition& bc, const StepOptions& options) {
    const double limit = cfl_max_dt(f.grid().spacing(), f.grid().dim());
    if (!(dt > 0.0) || dt > limit) {
        std::ostringstream msg;
        msg << "step: dt = " << dt << " outside (0, " << limit << "]";
        throw PreconditionError(msg.str());
    }
    if (bc.kind == BoundaryKind::Dirichlet && !bc.value) {
        throw PreconditionError("step: Dirichlet boundary without data");
    }
    return advance(f, dt, f.time() + dt, bc, options.threads);
}

Trajectory solve(const ProblemSpec& spec) {
    if (!(spec.horizon >= 0.0) || !std::isfinite(spec.horizon)) {
        throw PreconditionError("solve: horizon must be non-negative");
    }
    if (!(spec.cfl_fraction > 0.0 && spec.cfl_fraction <= 1.0)) {
        throw PreconditionError("solve: CFL fraction must lie in (0, 1]");
    }
    if (!spec.initial) {
        throw PreconditionError("solve: missing initial condition");
    }
    if (spec.bc.kind == BoundaryKind::Dirichlet && !spec.bc.value) {
        throw PreconditionError("solve: Dirichlet boundary without data");
    }

    Trajectory out;
    out.dt = spec.cfl_fraction * cfl_max_dt(spec.grid.spacing(), spec.grid.dim());
    out.snapshots.push_back(Field::sample(spec.grid, spec.initial, 0.0));

    const auto total = static_cast<std::size_t>(std::ceil(spec.horizon / out.dt));
    Field current = out.snapshots.front();
    for (std::size_t k = 0; k < total; ++k) {
        const bool last = k + 1 == total;
        const double dt = last ? std::min(out.dt, spec.horizon - current.time()) : out.dt;
        const double t_new = last ? spec.horizon : static_cast<double>(k + 1) * out.dt;
        try {
            current = advance(current, dt, t_new, spec.bc, spec.threads);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "solve: aborted at step " << k + 1 << ": " << e.what();
            throw NumericalError(msg.str());
        }
        ++out.steps;
        if (last || (spec.snapshot_every > 0 && (k + 1) % spec.snapshot_every == 0)) {
            out.snapshots.push_back(current);
        }
    }

    const Field& u0 = out.snapshots.front();
    for (std::size_t k = 0; k < u0.values().size(); ++k) {
        out.max_drift = std::max(out.max_drift, std::abs(current[k] - u0[k]));
    }
    return out;
}

double comparison_gap(const Field& u, const Field& v) {
    if (!(u.grid() == v.grid())) {
        throw PreconditionError("comparison_gap: fields live on different grids");
    }
    if (u.time() != v.time()) {
        throw PreconditionError("comparison_gap: fields are at different times");
    }
    double gap = v[0] - u[0];
    for (std::size_t k = 1; k < u.values().size(); ++k) {
        gap = std::min(gap, v[k] - u[k]);
    }
    return gap;
}

} // namespace lagflow
