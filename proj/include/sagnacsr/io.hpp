#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sagnacsr {

struct Column {
    std::string label;
    std::vector<double> values;
};

/// Header row of labels, then one row per index. Reals use the shortest
/// round-trip decimal form.
std::string csv_text(std::span<const Column> columns);

struct CsvTable {
    std::vector<Column> columns;

    const Column& column(const std::string& label) const;
};

/// Reads a numeric CSV written by csv_text. Throws Error on malformed input.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained line chart: frame, axis extents, one polyline per series, legend.
std::string svg_chart(const std::string& title, std::span<const SvgSeries> series,
                      const std::string& x_label = "zeta (rad)", const std::string& y_label = "intensity");

/// Writes text, creating parent directories. Throws Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Reads a whole file. Throws Error("cannot read ...") on failure.
std::string read_text(const std::filesystem::path& path);

}  // namespace sagnacsr
