#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lagflow/pde.hpp"
#include "lagflow/symmat.hpp"

namespace lagflow {

/// Schema violation; `field` is a JSON-pointer-like path ("grid.h"), empty for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline constexpr int kConfigVersion = 1;

enum class Command { Hypotheses, Solve, Compare, Converge, Quadratic };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct GridConfig {
    int dim = 1;
    std::array<std::size_t, 2> counts{21, 1};
    double h = 0.05;
    Point origin{0.0, 0.0};

    Grid make() const { return Grid(dim, counts, h, origin); }
};

/// Named initial conditions: zero | quadratic(A) | sine | bump | table.
struct InitialCondition {
    enum class Kind { Zero, Quadratic, Sine, Bump, Table };
    Kind kind = Kind::Zero;
    std::optional<SymMat> a;             // quadratic
    double amplitude = 1.0;              // sine, bump
    std::array<int, 2> modes{1, 1};      // sine: wave numbers per axis
    Point center{0.5, 0.5};              // bump
    double width = 0.25;                 // bump
    std::vector<double> values;          // table, flat node order

    /// Sine uses the periodic box (count*h) or, for Dirichlet, the closed box
    /// ((count-1)*h) so it vanishes on the boundary.
    std::function<double(const Point&)> build(const Grid& grid, BoundaryKind kind) const;
};

enum class BoundaryChoice { Periodic, DirichletZero, DirichletInitial, DirichletExact };

struct HypothesesParams {
    std::vector<std::size_t> orders{2};
    std::size_t trials = 1000;
    std::vector<double> scales{0.1, 1.0, 10.0};
    std::vector<double> alphas{0.25, 0.5, 0.9};
    std::size_t calculus_trials = 1000;
    int panels = 256;
    int fine_panels = 4096;
    unsigned threads = 1;
};

struct SolveParams {
    GridConfig grid;
    BoundaryChoice bc = BoundaryChoice::DirichletZero;
    InitialCondition initial;
    double horizon = 0.1;
    double cfl_fraction = 0.9;
    std::size_t snapshot_every = 0;
    bool heatmaps = true;
};

struct CompareParams {
    GridConfig grid;
    BoundaryChoice bc = BoundaryChoice::Periodic;
    InitialCondition lower;
    std::optional<InitialCondition> upper;
    double shift = 0.0; // used when `upper` is absent: v0 = u0 + shift
    double horizon = 1.0;
    double cfl_fraction = 0.9;
};

struct ConvergeParams {
    GridConfig grid;
    InitialCondition initial;
    double horizon = 0.5;
    std::size_t levels = 4;
    double cfl_fraction = 0.9;
    std::vector<double> cross_fractions{0.5, 0.9};
};

struct QuadraticParams {
    GridConfig grid;
    SymMat a = SymMat::identity(1);
    double horizon = 1.0;
    double cfl_fraction = 0.9;
};

struct RunConfig {
    int version = kConfigVersion;
    Command command = Command::Hypotheses;
    std::uint64_t seed = 0;
    std::variant<HypothesesParams, SolveParams, CompareParams, ConvergeParams, QuadraticParams> params;

    nlohmann::ordered_json normalized;  // input with every default filled in
    std::vector<std::string> defaults;  // "key = value" for each default applied
};

/// Parses and validates a JSON run configuration. Unknown keys, a version other
/// than 1, wrong types and out-of-range values all throw ConfigError.
RunConfig parse_config(const std::string& text);

/// Replaces the seed (command-line override) and keeps `normalized` in sync.
void override_seed(RunConfig& config, std::uint64_t seed);

/// FNV-1a 64 of the normalized configuration's compact JSON text.
std::uint64_t config_hash(const RunConfig& config);

} // namespace lagflow
