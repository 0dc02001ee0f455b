#include "nfnls/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "nfnls/errors.hpp"

namespace nfnls::cli {

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DomainError("CSV has no column '" + name + "'", "missing_column");
    return static_cast<std::size_t>(it - header.begin());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) out += ',';
        out += csv_field(fields[k]);
    }
    return out + "\r\n";
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                record.push_back(std::move(field));
                records.push_back(std::move(record));
            }
            record.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw DomainError("CSV ends inside a quoted field", "invalid_csv");
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    CsvTable table;
    if (records.empty()) throw DomainError("CSV has no header row", "invalid_csv");
    table.header = std::move(records.front());
    for (std::size_t k = 1; k < records.size(); ++k) {
        if (records[k].size() != table.header.size()) {
            throw DomainError("CSV row " + std::to_string(k + 1) + " has " + std::to_string(records[k].size()) +
                                  " fields, header has " + std::to_string(table.header.size()),
                              "invalid_csv");
        }
        table.rows.push_back(std::move(records[k]));
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open CSV file: " + path.string(), "file_not_found");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

bool cell_value(const std::string& s, bool log, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return false;
    if (log && !(v > 0.0)) return false;
    out = log ? std::log10(v) : v;
    return true;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    void fit(double a, double b) {
        lo = a;
        hi = b;
        if (log) {
            lo = std::floor(lo);
            hi = std::ceil(hi);
            if (hi <= lo) hi = lo + 1;
        } else if (hi <= lo) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= pad;
            hi += pad;
        }
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8)));
            for (double d = lo; d <= hi + 1e-9; d += step) out.push_back(d);
        } else {
            for (int k = 0; k <= 5; ++k) out.push_back(lo + (hi - lo) * k / 5.0);
        }
        return out;
    }

    std::string label(double v) const { return log ? "1e" + fmt("%.0f", v) : fmt("%.3g", v); }
};

}  // namespace

std::string render_svg(const CsvTable& table, const std::string& x_col, const std::vector<std::string>& y_cols,
                       const PlotOptions& opts) {
    if (y_cols.empty()) throw DomainError("plot needs at least one y column", "invalid_config");
    const std::size_t xi = table.column(x_col);
    std::vector<std::size_t> yi;
    for (const auto& y : y_cols) yi.push_back(table.column(y));

    std::vector<std::vector<std::pair<double, double>>> series(yi.size());
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
    for (const auto& row : table.rows) {
        double x = 0.0;
        if (!cell_value(row[xi], opts.log_x, x)) continue;
        for (std::size_t k = 0; k < yi.size(); ++k) {
            double y = 0.0;
            if (!cell_value(row[yi[k]], opts.log_y, y)) continue;
            series[k].emplace_back(x, y);
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    Axis ax{0.0, 1.0, opts.log_x}, ay{0.0, 1.0, opts.log_y};
    if (x_lo <= x_hi) {
        ax.fit(x_lo, x_hi);
        ay.fit(y_lo, y_hi);
    }
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    if (!opts.title.empty()) {
        os << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
           << xml_escape(opts.title) << "</text>\n";
    }
    os << "<g stroke=\"#999\" stroke-width=\"0.5\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : ax.ticks()) {
        const std::string x = fmt("%.2f", px(t));
        os << "<line x1=\"" << x << "\" y1=\"" << fmt("%.2f", kTop) << "\" x2=\"" << x << "\" y2=\""
           << fmt("%.2f", kTop + ph) << "\"/>\n"
           << "<text x=\"" << x << "\" y=\"" << fmt("%.2f", kTop + ph + 16)
           << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">" << ax.label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const std::string y = fmt("%.2f", py(t));
        os << "<line x1=\"" << fmt("%.2f", kLeft) << "\" y1=\"" << y << "\" x2=\"" << fmt("%.2f", kLeft + pw)
           << "\" y2=\"" << y << "\"/>\n"
           << "<text x=\"" << fmt("%.2f", kLeft - 6) << "\" y=\"" << y
           << "\" text-anchor=\"end\" dominant-baseline=\"middle\" stroke=\"none\" fill=\"black\">" << ay.label(t)
           << "</text>\n";
    }
    os << "</g>\n"
       << "<rect x=\"" << fmt("%.2f", kLeft) << "\" y=\"" << fmt("%.2f", kTop) << "\" width=\"" << fmt("%.2f", pw)
       << "\" height=\"" << fmt("%.2f", ph) << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << fmt("%.2f", kLeft + pw / 2) << "\" y=\"" << fmt("%.2f", kHeight - 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(x_col) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kColors[k % std::size(kColors)];
        if (!series[k].empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < series[k].size(); ++i) {
                if (i) os << ' ';
                os << fmt("%.2f", px(series[k][i].first)) << ',' << fmt("%.2f", py(series[k][i].second));
            }
            os << "\"/>\n";
        }
        const double ly = kTop + 16 + 16 * double(k);
        os << "<line x1=\"" << fmt("%.2f", kLeft + pw - 150) << "\" y1=\"" << fmt("%.2f", ly) << "\" x2=\""
           << fmt("%.2f", kLeft + pw - 130) << "\" y2=\"" << fmt("%.2f", ly) << "\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n"
           << "<text x=\"" << fmt("%.2f", kLeft + pw - 124) << "\" y=\"" << fmt("%.2f", ly)
           << "\" dominant-baseline=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(y_cols[k])
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace nfnls::cli
