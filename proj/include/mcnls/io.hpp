#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcnls/grid.hpp"
#include "mcnls/propagator.hpp"
#include "mcnls/symmetry.hpp"

namespace mcnls {

/// Snapshot container: "MCNL", version u16, dim u16, n u32, L f64, then
/// n^d little-endian (f64 re, f64 im) pairs in row-major order.
void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

nlohmann::json group_to_json(const GroupElement& g, int dim);
nlohmann::json enlarged_to_json(const EnlargedElement& g, int dim);
GroupElement group_from_json(const nlohmann::json& j);
EnlargedElement enlarged_from_json(const nlohmann::json& j);

/// One row per entry; fixed shortest-round-trip formatting so identical runs
/// serialize identically.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

/// Polyline chart; one curve per series, shared x axis.
struct SvgSeries {
    std::string name;
    std::vector<double> x, y;
};
void write_svg_lines(const std::filesystem::path& path, const std::string& title,
                     const std::vector<SvgSeries>& series, bool log_y = false);

/// 8-bit grayscale-to-viridis-ish PNG of a row-major matrix (rows x cols).
void write_png_heatmap(const std::filesystem::path& path, const std::vector<double>& data,
                       int rows, int cols);

/// Trajectory manifest (config echo, per-snapshot stats) plus binary
/// snapshots under <dir>/snapshots/.  Writes at most max_snapshots fields,
/// evenly thinned.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& u,
                      int max_snapshots = 64);

}  // namespace mcnls
