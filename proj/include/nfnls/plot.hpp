#pragma once

// CSV tables and SVG line plots.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nfnls::cli {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws DomainError when absent.
    std::size_t column(const std::string& name) const;
};

/// RFC 4180: fields with a comma, quote or line break are quoted.
std::string csv_field(const std::string& s);
std::string csv_line(const std::vector<std::string>& fields);

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

struct PlotOptions {
    bool log_x = false;
    bool log_y = false;
    std::string title;
};

/// 800x600 canvas, one polyline per y column. Non-finite cells and, on
/// log axes, non-positive cells are skipped.
std::string render_svg(const CsvTable& table, const std::string& x_col, const std::vector<std::string>& y_cols,
                       const PlotOptions& opts);

}  // namespace nfnls::cli
