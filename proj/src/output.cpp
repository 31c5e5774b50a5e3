#include "lagflow/output.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lagflow/error.hpp"

namespace lagflow {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# lagflow config_hash=%016llx seed=%llu",
                  static_cast<unsigned long long>(config_hash), static_cast<unsigned long long>(seed));
    return buf;
}

std::string report_csv(const std::vector<ExperimentReport>& reports, const std::string& provenance) {
    std::ostringstream out;
    out << provenance << "\n";
    out << "experiment_id,metric,value,threshold,pass\n";
    for (const ExperimentReport& r : reports) {
        for (const Metric& m : r.metrics) {
            out << r.experiment_id << ',' << m.name << ',' << num(m.value) << ',' << m.threshold_text() << ','
                << (m.pass ? "true" : "false") << '\n';
        }
    }
    return out.str();
}

std::string report_json(const std::vector<ExperimentReport>& reports, const std::string& provenance) {
    nlohmann::ordered_json root;
    root["provenance"] = provenance;
    root["pass"] = std::all_of(reports.begin(), reports.end(), [](const ExperimentReport& r) { return r.pass; });
    root["experiments"] = nlohmann::ordered_json::array();
    for (const ExperimentReport& r : reports) {
        nlohmann::ordered_json e;
        e["experiment_id"] = r.experiment_id;
        e["seed"] = r.seed;
        e["parameters"] = r.parameters;
        nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
        for (const Metric& m : r.metrics) {
            metrics[m.name] = {{"value", m.value}, {"threshold", m.threshold_text()}, {"pass", m.pass}};
        }
        e["metrics"] = metrics;
        e["notes"] = r.notes;
        e["pass"] = r.pass;
        e["runtime_ms"] = r.runtime_ms;
        root["experiments"].push_back(e);
    }
    return root.dump(2) + "\n";
}

std::string trajectory_csv(const std::vector<Field>& snapshots, const std::string& provenance) {
    std::ostringstream out;
    out << provenance << "\n";
    if (snapshots.empty()) {
        out << "t,node,x,u\n";
        return out.str();
    }
    const bool two_d = snapshots.front().grid().dim() == 2;
    out << (two_d ? "t,node,x,y,u\n" : "t,node,x,u\n");
    for (const Field& f : snapshots) {
        const Grid& g = f.grid();
        for (std::size_t k = 0; k < g.node_count(); ++k) {
            const Point p = g.point(k);
            out << num(f.time()) << ',' << k << ',' << num(p[0]) << ',';
            if (two_d) {
                out << num(p[1]) << ',';
            }
            out << num(f[k]) << '\n';
        }
    }
    return out.str();
}

const std::array<Rgb, 256>& colormap() {
    static const std::array<Rgb, 256> table = [] {
        constexpr std::array<int, 5> at{0, 64, 128, 192, 255};
        constexpr std::array<std::array<double, 3>, 5> anchor{{
            {68, 1, 84},
            {59, 82, 139},
            {33, 145, 140},
            {94, 201, 98},
            {253, 231, 37},
        }};
        std::array<Rgb, 256> t{};
        for (int i = 0; i < 256; ++i) {
            std::size_t seg = 0;
            while (seg + 2 < at.size() && i > at[seg + 1]) {
                ++seg;
            }
            const double w = static_cast<double>(i - at[seg]) / (at[seg + 1] - at[seg]);
            auto lerp = [&](int c) {
                return static_cast<std::uint8_t>(std::lround(anchor[seg][c] + w * (anchor[seg + 1][c] - anchor[seg][c])));
            };
            t[i] = {lerp(0), static_cast<std::uint8_t>(i), lerp(2)};
        }
        return t;
    }();
    return table;
}

std::uint8_t colormap_index(double v, double lo, double hi) {
    if (!(hi > lo)) {
        return 0;
    }
    const double x = std::floor(256.0 * (v - lo) / (hi - lo));
    return static_cast<std::uint8_t>(std::clamp(x, 0.0, 255.0));
}

Heatmap render_heatmap(std::span<const double> values, const Grid& grid) {
    if (grid.dim() != 2) {
        throw PreconditionError("render_heatmap: heatmaps need a 2D field; 1D data goes to CSV");
    }
    if (values.size() != grid.node_count()) {
        throw PreconditionError("render_heatmap: value count does not match the grid");
    }
    Heatmap map;
    map.width = grid.count(0);
    map.height = grid.count(1);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    map.lo = *lo;
    map.hi = *hi;
    map.pixels.resize(map.width * map.height);
    for (std::size_t row = 0; row < map.height; ++row) {
        const std::size_t j = map.height - 1 - row;
        for (std::size_t i = 0; i < map.width; ++i) {
            map.pixels[row * map.width + i] = colormap()[colormap_index(values[grid.index(i, j)], map.lo, map.hi)];
        }
    }
    return map;
}

std::string encode_ppm(const Heatmap& map, const std::string& provenance) {
    std::string out = "P6\n" + provenance + "\n" + std::to_string(map.width) + " " + std::to_string(map.height) +
                      "\n255\n";
    out.reserve(out.size() + 3 * map.pixels.size());
    for (const Rgb& p : map.pixels) {
        out.push_back(static_cast<char>(p[0]));
        out.push_back(static_cast<char>(p[1]));
        out.push_back(static_cast<char>(p[2]));
    }
    return out;
}

Heatmap decode_ppm(const std::string& bytes) {
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto token = [&] {
        skip();
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
            ++pos;
        }
        return bytes.substr(start, pos - start);
    };
    if (token() != "P6") {
        throw IoError("decode_ppm: not a binary PPM");
    }
    Heatmap map;
    try {
        map.width = std::stoul(token());
        map.height = std::stoul(token());
        if (token() != "255") {
            throw IoError("decode_ppm: only 8-bit PPM is supported");
        }
    } catch (const std::logic_error&) {
        throw IoError("decode_ppm: malformed header");
    }
    ++pos; // single whitespace byte before the raster
    if (bytes.size() - pos != 3 * map.width * map.height) {
        throw IoError("decode_ppm: raster size does not match header");
    }
    map.pixels.resize(map.width * map.height);
    for (Rgb& p : map.pixels) {
        for (auto& c : p) {
            c = static_cast<std::uint8_t>(bytes[pos++]);
        }
    }
    return map;
}

int invert_colormap(const Rgb& pixel) {
    const Rgb& candidate = colormap()[pixel[1]];
    return candidate == pixel ? pixel[1] : -1;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) {
        throw IoError("failed writing " + path.string());
    }
}

void emit_heatmap(std::span<const double> values, const Grid& grid, const std::filesystem::path& path,
                  const std::string& provenance) {
    const Heatmap map = render_heatmap(values, grid);
    write_file(path, encode_ppm(map, provenance));
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".minmax.txt");
    write_file(sidecar, provenance + "\nmin " + num(map.lo) + "\nmax " + num(map.hi) + "\n");
}

} // namespace lagflow
