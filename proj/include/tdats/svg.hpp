#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "tdats/ucr.hpp"

namespace tdats {

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

}  // namespace detail

/// Static bar chart of per-dataset accuracy residuals: one bar per dataset in
/// alphabetical order, wins above the zero axis, losses below.
inline void write_residual_svg(const ResidualReport& report, std::ostream& out) {
    const int bar_width = 10;
    const int gap = 4;
    const int margin = 40;
    const int plot_height = 240;
    const int n = static_cast<int>(report.rows.size());
    const int width = 2 * margin + std::max(1, n) * (bar_width + gap);
    const int height = 2 * margin + plot_height;
    const double mid_y = margin + plot_height / 2.0;

    double max_abs = 0.0;
    for (const ResidualRow& row : report.rows) {
        max_abs = std::max(max_abs, std::abs(row.residual));
    }
    if (max_abs == 0.0) {
        max_abs = 1.0;
    }
    const double scale = (plot_height / 2.0 - 4.0) / max_abs;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "  <line x1=\"" << margin - 8 << "\" y1=\"" << mid_y << "\" x2=\"" << width - margin + 8
        << "\" y2=\"" << mid_y << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "  <text x=\"" << margin - 8 << "\" y=\"" << margin - 12
        << "\" font-family=\"sans-serif\" font-size=\"12\">accuracy residual (ours - reference); "
        << "wins=" << report.wins << " ties=" << report.ties << " losses=" << report.losses
        << "</text>\n";

    int k = 0;
    for (const ResidualRow& row : report.rows) {
        const double h = std::abs(row.residual) * scale;
        const double x = margin + k * (bar_width + gap);
        const double y = row.residual >= 0.0 ? mid_y - h : mid_y;
        const char* color = row.residual > 0.0 ? "#2e7d32" : (row.residual < 0.0 ? "#c62828" : "#9e9e9e");
        out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_width
            << "\" height=\"" << std::max(h, 1.0) << "\" fill=\"" << color << "\">"
            << "<title>" << detail::xml_escape(row.dataset) << ": " << row.residual
            << "</title></rect>\n";
        ++k;
    }
    out << "</svg>\n";
}

}  // namespace tdats
