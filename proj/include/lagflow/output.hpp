#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagflow/harness.hpp"
#include "lagflow/pde.hpp"

namespace lagflow {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// First line of every emitted file: "# lagflow config_hash=<16 hex> seed=<u64>".
std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed);

/// report.csv: provenance line, then "experiment_id,metric,value,threshold,pass",
/// one row per (experiment, metric) in report order. Values print with %.17g.
std::string report_csv(const std::vector<ExperimentReport>& reports, const std::string& provenance);

/// Same content as JSON, plus parameters, notes and runtimes.
std::string report_json(const std::vector<ExperimentReport>& reports, const std::string& provenance);

/// trajectory.csv: provenance line, then "t,node,x,u" (1D) or "t,node,x,y,u" (2D).
std::string trajectory_csv(const std::vector<Field>& snapshots, const std::string& provenance);

using Rgb = std::array<std::uint8_t, 3>;

/// 256-entry viridis-like colormap. Entry i interpolates red and blue linearly
/// between the anchors (68,1,84) (59,82,139) (33,145,140) (94,201,98)
/// (253,231,37) placed at i = 0, 64, 128, 192, 255 (rounded to nearest);
/// green is i itself, so every entry is distinct and green decodes the index.
const std::array<Rgb, 256>& colormap();

/// Index of a value in the colormap: floor(256 (v - lo) / (hi - lo)) clamped to
/// 255; 0 everywhere when hi == lo.
std::uint8_t colormap_index(double v, double lo, double hi);

struct Heatmap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgb> pixels; // row-major, top row first
    double lo = 0.0;
    double hi = 0.0;
};

/// Renders a 2D field: column i is x-index i, the top row is the largest y.
/// 1D fields are rejected.
Heatmap render_heatmap(std::span<const double> values, const Grid& grid);

/// Binary P6 bytes with the provenance line as a header comment.
std::string encode_ppm(const Heatmap& map, const std::string& provenance);
/// Parses P6 bytes (comments allowed) back into pixels; lo/hi are left at zero.
Heatmap decode_ppm(const std::string& bytes);
/// Colormap index of a pixel, or -1 if the colour is not in the map.
int invert_colormap(const Rgb& pixel);

/// Writes <path> (P6) and the sidecar <stem>.minmax.txt with the field's range.
void emit_heatmap(std::span<const double> values, const Grid& grid, const std::filesystem::path& path,
                  const std::string& provenance);

/// Writes a text file, throwing IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

} // namespace lagflow
