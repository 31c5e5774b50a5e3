#include "lagflow/config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "lagflow/error.hpp"

namespace lagflow {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Command c) {
    switch (c) {
    case Command::Hypotheses:
        return "hypotheses";
    case Command::Solve:
        return "solve";
    case Command::Compare:
        return "compare";
    case Command::Converge:
        return "converge";
    case Command::Quadratic:
        return "quadratic";
    }
    return "";
}

std::optional<Command> parse_command(const std::string& name) {
    for (Command c : {Command::Hypotheses, Command::Solve, Command::Compare, Command::Converge, Command::Quadratic}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Reads one JSON object, tracking consumed keys so leftovers can be rejected,
// and mirrors every value (explicit or defaulted) into `out`.
class Section {
public:
    Section(const json& j, std::string path, std::vector<std::string>& defaults)
        : j_(j), path_(std::move(path)), defaults_(defaults) {
        if (!j_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }

    const std::string& path() const { return path_; }
    std::string field(const std::string& key) const { return join(path_, key); }
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const { throw ConfigError(field(key), msg); }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* take(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const json* v = take(key);
        if (!v) {
            return defaulted(key, required_default(key, fallback));
        }
        if (!v->is_number()) {
            fail(key, "expected a number");
        }
        const double d = v->get<double>();
        if (!std::isfinite(d)) {
            fail(key, "must be finite");
        }
        out[key] = d;
        return d;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double d = number(key, fallback);
        if (!(d > 0.0)) {
            fail(key, "must be positive");
        }
        return d;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
        const json* v = take(key);
        if (!v) {
            if (!fallback) {
                fail(key, "required");
            }
            out[key] = *fallback;
            note_default(key, std::to_string(*fallback));
            return *fallback;
        }
        if (v->is_number_unsigned()) {
            out[key] = v->get<std::uint64_t>();
            return v->get<std::uint64_t>();
        }
        if (v->is_number_integer()) {
            fail(key, "must be non-negative");
        }
        fail(key, "expected an integer");
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const json* v = take(key);
        if (!v) {
            if (!fallback) {
                fail(key, "required");
            }
            out[key] = *fallback;
            note_default(key, *fallback);
            return *fallback;
        }
        if (!v->is_string()) {
            fail(key, "expected a string");
        }
        out[key] = v->get<std::string>();
        return v->get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = take(key);
        if (!v) {
            out[key] = fallback;
            note_default(key, fallback ? "true" : "false");
            return fallback;
        }
        if (!v->is_boolean()) {
            fail(key, "expected true or false");
        }
        out[key] = v->get<bool>();
        return v->get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback) {
        const json* v = take(key);
        if (!v) {
            if (!fallback) {
                fail(key, "required");
            }
            out[key] = *fallback;
            note_default(key, ordered_json(*fallback).dump());
            return *fallback;
        }
        if (!v->is_array() || v->empty()) {
            fail(key, "expected a non-empty array of numbers");
        }
        std::vector<double> r;
        for (const json& e : *v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(key, "expected a non-empty array of numbers");
            }
            r.push_back(e.get<double>());
        }
        out[key] = r;
        return r;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(field(it.key()), "unknown key");
            }
        }
    }

    void note_default(const std::string& key, const std::string& value) {
        defaults_.push_back(field(key) + " = " + value);
    }

    ordered_json out = ordered_json::object();

private:
    double required_default(const std::string& key, std::optional<double> fallback) const {
        if (!fallback) {
            fail(key, "required");
        }
        return *fallback;
    }

    double defaulted(const std::string& key, double value) {
        out[key] = value;
        std::ostringstream s;
        s << value;
        note_default(key, s.str());
        return value;
    }

    const json& j_;
    std::string path_;
    std::vector<std::string>& defaults_;
    std::set<std::string> seen_;
};

double fraction(Section& s, const std::string& key) {
    const double c = s.number(key, 0.9);
    if (!(c > 0.0 && c <= 1.0)) {
        s.fail(key, "must lie in (0, 1]");
    }
    return c;
}

SymMat parse_matrix(const json& v, const std::string& field) {
    if (v.is_number()) {
        return SymMat{{v.get<double>()}};
    }
    if (!v.is_array() || v.empty()) {
        throw ConfigError(field, "expected a number or a square array of numbers");
    }
    const std::size_t n = v.size();
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i].is_array() || v[i].size() != n) {
            throw ConfigError(field, "expected a square array of numbers");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!v[i][j].is_number()) {
                throw ConfigError(field, "expected a square array of numbers");
            }
            m(i, j) = v[i][j].get<double>();
        }
    }
    try {
        return SymMat(m);
    } catch (const std::exception& e) {
        throw ConfigError(field, e.what());
    }
}

ordered_json matrix_json(const SymMat& a) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < a.order(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < a.order(); ++j) {
            row.push_back(a(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

GridConfig parse_grid(Section& parent, const std::string& key, std::vector<std::string>& defaults) {
    const json* g = parent.take(key);
    if (!g) {
        parent.fail(key, "required");
    }
    Section s(*g, parent.field(key), defaults);
    GridConfig c;
    const std::uint64_t dim = s.unsigned_integer("dim", 1);
    if (dim != 1 && dim != 2) {
        s.fail("dim", "must be 1 or 2");
    }
    c.dim = static_cast<int>(dim);

    const json* counts = s.take("counts");
    if (!counts) {
        s.fail("counts", "required");
    }
    std::vector<std::uint64_t> cv;
    if (counts->is_number_unsigned()) {
        cv.assign(c.dim, counts->get<std::uint64_t>());
    } else if (counts->is_array() && counts->size() == static_cast<std::size_t>(c.dim)) {
        for (const json& e : *counts) {
            if (!e.is_number_unsigned()) {
                s.fail("counts", "expected non-negative integers");
            }
            cv.push_back(e.get<std::uint64_t>());
        }
    } else {
        s.fail("counts", "expected an integer or one integer per axis");
    }
    for (std::size_t a = 0; a < cv.size(); ++a) {
        if (cv[a] < Grid::kMinCount) {
            s.fail("counts", "every axis needs at least " + std::to_string(Grid::kMinCount) + " nodes");
        }
        c.counts[a] = cv[a];
    }
    s.out["counts"] = cv;

    c.h = s.positive("h");
    std::vector<double> origin = s.numbers("origin", std::vector<double>(c.dim, 0.0));
    if (origin.size() != static_cast<std::size_t>(c.dim)) {
        s.fail("origin", "needs one coordinate per axis");
    }
    for (std::size_t a = 0; a < origin.size(); ++a) {
        c.origin[a] = origin[a];
    }
    s.finish();
    parent.out[key] = s.out;
    return c;
}

InitialCondition parse_initial(Section& parent, const std::string& key, const GridConfig& grid,
                               std::vector<std::string>& defaults) {
    const json* j = parent.take(key);
    if (!j) {
        parent.fail(key, "required");
    }
    Section s(*j, parent.field(key), defaults);
    InitialCondition ic;
    const std::string kind = s.string("kind");
    if (kind == "zero") {
        ic.kind = InitialCondition::Kind::Zero;
    } else if (kind == "quadratic") {
        ic.kind = InitialCondition::Kind::Quadratic;
        const json* a = s.take("A");
        if (!a) {
            s.fail("A", "required");
        }
        ic.a = parse_matrix(*a, s.field("A"));
        if (ic.a->order() != static_cast<std::size_t>(grid.dim)) {
            s.fail("A", "order must equal the grid dimension");
        }
        s.out["A"] = matrix_json(*ic.a);
    } else if (kind == "sine") {
        ic.kind = InitialCondition::Kind::Sine;
        ic.amplitude = s.number("amplitude", 1.0);
        const std::vector<double> modes = s.numbers("modes", std::vector<double>(grid.dim, 1.0));
        if (modes.size() != static_cast<std::size_t>(grid.dim)) {
            s.fail("modes", "needs one wave number per axis");
        }
        for (std::size_t a = 0; a < modes.size(); ++a) {
            if (modes[a] != std::floor(modes[a]) || modes[a] < 0) {
                s.fail("modes", "wave numbers must be non-negative integers");
            }
            ic.modes[a] = static_cast<int>(modes[a]);
        }
    } else if (kind == "bump") {
        ic.kind = InitialCondition::Kind::Bump;
        ic.amplitude = s.number("amplitude", 1.0);
        const std::vector<double> c = s.numbers("center", std::vector<double>(grid.dim, 0.5));
        if (c.size() != static_cast<std::size_t>(grid.dim)) {
            s.fail("center", "needs one coordinate per axis");
        }
        for (std::size_t a = 0; a < c.size(); ++a) {
            ic.center[a] = c[a];
        }
        ic.width = s.positive("width", 0.25);
    } else if (kind == "table") {
        ic.kind = InitialCondition::Kind::Table;
        ic.values = s.numbers("values", std::nullopt);
        const std::size_t nodes = grid.dim == 1 ? grid.counts[0] : grid.counts[0] * grid.counts[1];
        if (ic.values.size() != nodes) {
            s.fail("values", "expected " + std::to_string(nodes) + " node values");
        }
    } else {
        s.fail("kind", "unknown initial condition '" + kind + "' (zero, quadratic, sine, bump, table)");
    }
    s.finish();
    parent.out[key] = s.out;
    return ic;
}

BoundaryChoice parse_bc(Section& s, const std::string& fallback) {
    const std::string v = s.string("bc", fallback);
    if (v == "periodic") {
        return BoundaryChoice::Periodic;
    }
    if (v == "dirichlet_zero") {
        return BoundaryChoice::DirichletZero;
    }
    if (v == "dirichlet_initial") {
        return BoundaryChoice::DirichletInitial;
    }
    if (v == "dirichlet_exact") {
        return BoundaryChoice::DirichletExact;
    }
    s.fail("bc", "expected periodic, dirichlet_zero, dirichlet_initial or dirichlet_exact");
}

std::size_t count_at_least(Section& s, const std::string& key, std::uint64_t fallback, std::uint64_t min) {
    const std::uint64_t v = s.unsigned_integer(key, fallback);
    if (v < min) {
        s.fail(key, "must be at least " + std::to_string(min));
    }
    return static_cast<std::size_t>(v);
}

HypothesesParams parse_hypotheses(Section& s) {
    HypothesesParams p;
    const json* n = s.take("n");
    if (!n) {
        s.fail("n", "required");
    }
    std::vector<std::uint64_t> orders;
    if (n->is_number_unsigned()) {
        orders.push_back(n->get<std::uint64_t>());
    } else if (n->is_array() && !n->empty()) {
        for (const json& e : *n) {
            if (!e.is_number_unsigned()) {
                s.fail("n", "expected matrix orders between 1 and 8");
            }
            orders.push_back(e.get<std::uint64_t>());
        }
    } else {
        s.fail("n", "expected an order or a list of orders");
    }
    p.orders.clear();
    for (std::uint64_t o : orders) {
        if (o < 1 || o > 8) {
            s.fail("n", "matrix orders must lie between 1 and 8");
        }
        p.orders.push_back(static_cast<std::size_t>(o));
    }
    s.out["n"] = *n;
    p.trials = count_at_least(s, "trials", 1000, 1);
    p.scales = s.numbers("scales", p.scales);
    for (double v : p.scales) {
        if (!(v > 0.0)) {
            s.fail("scales", "scales must be positive");
        }
    }
    p.alphas = s.numbers("alphas", p.alphas);
    for (double v : p.alphas) {
        if (!(v > 0.0 && v < 1.0)) {
            s.fail("alphas", "every alpha must lie in (0, 1)");
        }
    }
    p.calculus_trials = static_cast<std::size_t>(s.unsigned_integer("calculus_trials", 1000));
    p.panels = static_cast<int>(count_at_least(s, "panels", 256, 2));
    p.fine_panels = static_cast<int>(count_at_least(s, "fine_panels", 4096, 2));
    if (p.panels % 2 != 0) {
        s.fail("panels", "must be even");
    }
    if (p.fine_panels % 2 != 0) {
        s.fail("fine_panels", "must be even");
    }
    p.threads = static_cast<unsigned>(count_at_least(s, "threads", 1, 1));
    return p;
}

SolveParams parse_solve(Section& s, std::vector<std::string>& defaults) {
    SolveParams p;
    p.grid = parse_grid(s, "grid", defaults);
    p.initial = parse_initial(s, "initial", p.grid, defaults);
    const bool quadratic = p.initial.kind == InitialCondition::Kind::Quadratic;
    p.bc = parse_bc(s, quadratic ? "dirichlet_exact" : "dirichlet_zero");
    if (p.bc == BoundaryChoice::DirichletExact && !quadratic) {
        s.fail("bc", "dirichlet_exact needs quadratic initial data");
    }
    p.horizon = s.number("T");
    if (p.horizon < 0.0) {
        s.fail("T", "must be non-negative");
    }
    p.cfl_fraction = fraction(s, "c");
    p.snapshot_every = static_cast<std::size_t>(s.unsigned_integer("snapshot_every", 0));
    p.heatmaps = s.boolean("heatmaps", p.grid.dim == 2);
    return p;
}

CompareParams parse_compare(Section& s, std::vector<std::string>& defaults) {
    CompareParams p;
    p.grid = parse_grid(s, "grid", defaults);
    p.bc = parse_bc(s, "periodic");
    if (p.bc == BoundaryChoice::DirichletExact || p.bc == BoundaryChoice::DirichletInitial) {
        s.fail("bc", "comparison needs one boundary treatment for both data: periodic or dirichlet_zero");
    }
    p.lower = parse_initial(s, "lower", p.grid, defaults);
    if (s.has("upper") && s.has("shift")) {
        s.fail("upper", "give either upper or shift, not both");
    }
    if (s.has("upper")) {
        p.upper = parse_initial(s, "upper", p.grid, defaults);
    } else {
        p.shift = s.number("shift", 0.0);
    }
    p.horizon = s.number("T");
    if (p.horizon < 0.0) {
        s.fail("T", "must be non-negative");
    }
    p.cfl_fraction = fraction(s, "c");
    return p;
}

ConvergeParams parse_converge(Section& s, std::vector<std::string>& defaults) {
    ConvergeParams p;
    p.grid = parse_grid(s, "grid", defaults);
    if (s.has("initial")) {
        p.initial = parse_initial(s, "initial", p.grid, defaults);
    } else {
        s.take("initial");
        p.initial.kind = InitialCondition::Kind::Sine;
        s.out["initial"] = {{"kind", "sine"}, {"amplitude", 1.0}, {"modes", std::vector<int>(p.grid.dim, 1)}};
        s.note_default("initial", "sine");
    }
    if (p.initial.kind == InitialCondition::Kind::Table) {
        s.fail("initial", "table data cannot be refined");
    }
    p.horizon = s.positive("T", 0.5);
    p.levels = count_at_least(s, "levels", 4, 3);
    p.cfl_fraction = fraction(s, "c");
    p.cross_fractions = s.numbers("cross_fractions", p.cross_fractions);
    for (double c : p.cross_fractions) {
        if (!(c > 0.0 && c <= 1.0)) {
            s.fail("cross_fractions", "every fraction must lie in (0, 1]");
        }
    }
    return p;
}

QuadraticParams parse_quadratic(Section& s, std::vector<std::string>& defaults) {
    QuadraticParams p;
    p.grid = parse_grid(s, "grid", defaults);
    const json* a = s.take("A");
    if (!a) {
        s.fail("A", "required");
    }
    p.a = parse_matrix(*a, "A");
    if (p.a.order() != static_cast<std::size_t>(p.grid.dim)) {
        s.fail("A", "order must equal the grid dimension");
    }
    s.out["A"] = matrix_json(p.a);
    p.horizon = s.number("T");
    if (p.horizon < 0.0) {
        s.fail("T", "must be non-negative");
    }
    p.cfl_fraction = fraction(s, "c");
    return p;
}

} // namespace

std::function<double(const Point&)> InitialCondition::build(const Grid& grid, BoundaryKind bkind) const {
    switch (kind) {
    case Kind::Zero:
        return [](const Point&) { return 0.0; };
    case Kind::Quadratic: {
        const SymMat m = *a;
        return [m](const Point& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < m.order(); ++i) {
                for (std::size_t j = 0; j < m.order(); ++j) {
                    s += x[i] * m(i, j) * x[j];
                }
            }
            return 0.5 * s;
        };
    }
    case Kind::Sine: {
        const int dim = grid.dim();
        const Point o = grid.origin();
        const double pad = bkind == BoundaryKind::Periodic ? 0.0 : 1.0;
        const std::array<double, 2> len{(grid.count(0) - pad) * grid.spacing(),
                                        (grid.count(1) - pad) * grid.spacing()};
        const auto k = modes;
        const double amp = amplitude;
        return [=](const Point& x) {
            double v = amp;
            for (int ax = 0; ax < dim; ++ax) {
                v *= std::sin(2.0 * std::numbers::pi * k[ax] * (x[ax] - o[ax]) / len[ax]);
            }
            return v;
        };
    }
    case Kind::Bump: {
        const int dim = grid.dim();
        const Point c = center;
        const double w = width;
        const double amp = amplitude;
        return [=](const Point& x) {
            double r2 = 0.0;
            for (int ax = 0; ax < dim; ++ax) {
                r2 += (x[ax] - c[ax]) * (x[ax] - c[ax]);
            }
            r2 /= w * w;
            if (r2 >= 1.0) {
                return 0.0;
            }
            const double s = 1.0 - r2;
            return amp * s * s * s;
        };
    }
    case Kind::Table: {
        const std::vector<double> v = values;
        const Grid g = grid;
        return [v, g](const Point& x) {
            const auto i = static_cast<std::size_t>(std::lround((x[0] - g.origin()[0]) / g.spacing()));
            const auto j = g.dim() == 2 ? static_cast<std::size_t>(std::lround((x[1] - g.origin()[1]) / g.spacing()))
                                        : std::size_t{0};
            return v.at(g.index(i, j));
        };
    }
    }
    throw PreconditionError("InitialCondition: unknown kind");
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }

    RunConfig cfg;
    Section s(root, "", cfg.defaults);
    const json* version = s.take("version");
    if (!version) {
        s.fail("version", "required");
    }
    if (!version->is_number_integer() || version->get<std::int64_t>() != kConfigVersion) {
        throw ConfigError("version", "unsupported config version " + version->dump() + " (this build reads version " +
                                         std::to_string(kConfigVersion) + ")");
    }
    s.out["version"] = kConfigVersion;

    const std::string command = s.string("command");
    const auto parsed = parse_command(command);
    if (!parsed) {
        s.fail("command", "unknown command '" + command + "' (hypotheses, solve, compare, converge, quadratic)");
    }
    cfg.command = *parsed;
    cfg.seed = s.unsigned_integer("seed", 0);

    switch (cfg.command) {
    case Command::Hypotheses:
        cfg.params = parse_hypotheses(s);
        break;
    case Command::Solve:
        cfg.params = parse_solve(s, cfg.defaults);
        break;
    case Command::Compare:
        cfg.params = parse_compare(s, cfg.defaults);
        break;
    case Command::Converge:
        cfg.params = parse_converge(s, cfg.defaults);
        break;
    case Command::Quadratic:
        cfg.params = parse_quadratic(s, cfg.defaults);
        break;
    }
    s.finish();

    // Grid-level validation the schema cannot express.
    try {
        std::visit(
            [](const auto& p) {
                if constexpr (requires { p.grid; }) {
                    (void)p.grid.make();
                }
            },
            cfg.params);
    } catch (const PreconditionError& e) {
        throw ConfigError("grid", e.what());
    }

    cfg.normalized = std::move(s.out);
    return cfg;
}

void override_seed(RunConfig& config, std::uint64_t seed) {
    config.seed = seed;
    config.normalized["seed"] = seed;
}

std::uint64_t config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.normalized.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace lagflow
