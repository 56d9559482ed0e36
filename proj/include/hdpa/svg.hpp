#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hdpa::svg {

/// Minimal self-contained SVG 1.1 line/point chart with a fixed 800x600
/// viewport. No timestamps or external assets, so output is byte-stable.
class LinePlot {
public:
    LinePlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string name, std::vector<std::pair<double, double>> points,
                    std::string color, bool draw_line, bool draw_points) {
        series_.push_back({std::move(name), std::move(points), std::move(color), draw_line,
                           draw_points});
    }

    std::string render() const {
        double x_min = std::numeric_limits<double>::infinity();
        double x_max = -x_min;
        double y_min = x_min;
        double y_max = -x_min;
        for (const auto& series : series_) {
            for (const auto& [x, y] : series.points) {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
        if (!(x_min < x_max)) {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if (!(y_min < y_max)) {
            y_min -= 0.5;
            y_max += 0.5;
        }

        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
               "viewBox=\"0 0 800 600\">\n";
        out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
        out << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
               "font-family=\"sans-serif\">"
            << escape(title_) << "</text>\n";

        const auto to_px = [&](double x, double y) {
            const double px = kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
            const double py = kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
            return std::pair<double, double>{px, py};
        };

        // Axes and ticks.
        out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
            << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
            << kBottom << "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= kTicks; ++i) {
            const double fx = x_min + (x_max - x_min) * i / kTicks;
            const double fy = y_min + (y_max - y_min) * i / kTicks;
            const auto [px, unused_y] = to_px(fx, y_min);
            const auto [unused_x, py] = to_px(x_min, fy);
            out << "<line x1=\"" << px << "\" y1=\"" << kBottom << "\" x2=\"" << px << "\" y2=\""
                << kBottom + 6 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << px << "\" y=\"" << kBottom + 22
                << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
                << tick_label(fx) << "</text>\n";
            out << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << py << "\" x2=\"" << kLeft
                << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << kLeft - 10 << "\" y=\"" << py + 4
                << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">"
                << tick_label(fy) << "</text>\n";
        }
        out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kBottom + 45
            << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
            << escape(x_label_) << "</text>\n";
        out << "<text x=\"20\" y=\"" << (kTop + kBottom) / 2
            << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
               "transform=\"rotate(-90 20 "
            << (kTop + kBottom) / 2 << ")\">" << escape(y_label_) << "</text>\n";

        int legend_row = 0;
        for (const auto& series : series_) {
            if (series.draw_line && series.points.size() > 1) {
                out << "<polyline fill=\"none\" stroke=\"" << series.color
                    << "\" stroke-width=\"2\" points=\"";
                for (const auto& [x, y] : series.points) {
                    const auto [px, py] = to_px(x, y);
                    out << px << ',' << py << ' ';
                }
                out << "\"/>\n";
            }
            if (series.draw_points) {
                for (const auto& [x, y] : series.points) {
                    const auto [px, py] = to_px(x, y);
                    out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"4\" fill=\""
                        << series.color << "\"/>\n";
                }
            }
            const double ly = kTop + 10 + 18 * legend_row++;
            out << "<line x1=\"" << kRight - 150 << "\" y1=\"" << ly << "\" x2=\"" << kRight - 120
                << "\" y2=\"" << ly << "\" stroke=\"" << series.color
                << "\" stroke-width=\"3\"/>\n";
            out << "<text x=\"" << kRight - 114 << "\" y=\"" << ly + 4
                << "\" font-size=\"12\" font-family=\"sans-serif\">" << escape(series.name)
                << "</text>\n";
        }
        out << "</svg>\n";
        return out.str();
    }

private:
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
        std::string color;
        bool draw_line;
        bool draw_points;
    };

    static constexpr double kLeft = 70;
    static constexpr double kRight = 770;
    static constexpr double kTop = 50;
    static constexpr double kBottom = 540;
    static constexpr int kTicks = 8;

    static std::string tick_label(double value) {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.4g", value);
        return buffer;
    }

    static std::string escape(const std::string& text) {
        std::string out;
        for (char c : text) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                default: out += c;
            }
        }
        return out;
    }

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<Series> series_;
};

}  // namespace hdpa::svg
