#include "dse/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dse/errors.hpp"
#include "dse/metrics.hpp"

namespace dse::plot {

namespace {

constexpr double kWidth = 960.0, kHeight = 540.0;
constexpr double kLeft = 80.0, kRight = 40.0, kTop = 40.0, kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string format_tick(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", v);
    return buffer;
}

}  // namespace

void plot_csvs(const std::vector<std::filesystem::path>& csv_paths,
               const std::string& metric_column,
               const std::filesystem::path& out_path, bool log_y) {
    if (csv_paths.empty()) throw ContractViolation("plot: no input CSVs");

    struct Series {
        std::string name;
        std::vector<double> t, v;
    };
    std::vector<Series> series;
    double t_min = std::numeric_limits<double>::infinity(), t_max = -t_min;
    double v_min = std::numeric_limits<double>::infinity(), v_max = -v_min;
    for (const auto& path : csv_paths) {
        const metrics::CsvColumn column =
            metrics::read_csv_column(path, metric_column);
        Series s;
        s.name = path.stem().string();
        for (std::size_t k = 0; k < column.values.size(); ++k) {
            double value = column.values[k];
            if (log_y) {
                if (!(value > 0.0)) continue;
                value = std::log10(value);
            }
            if (!std::isfinite(value)) continue;
            s.t.push_back(column.t[k]);
            s.v.push_back(value);
            t_min = std::min(t_min, column.t[k]);
            t_max = std::max(t_max, column.t[k]);
            v_min = std::min(v_min, value);
            v_max = std::max(v_max, value);
        }
        series.push_back(std::move(s));
    }
    if (!(t_min <= t_max) || !(v_min <= v_max))
        throw ContractViolation("plot: no finite data points for column `" +
                                metric_column + "`");
    if (t_max == t_min) t_max = t_min + 1.0;
    if (v_max == v_min) v_max = v_min + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto sx = [&](double t) { return kLeft + (t - t_min) / (t_max - t_min) * plot_w; };
    const auto sy = [&](double v) {
        return kTop + (1.0 - (v - v_min) / (v_max - v_min)) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    constexpr int kTicks = 5;
    for (int k = 0; k <= kTicks; ++k) {
        const double ft = static_cast<double>(k) / kTicks;
        const double tx = t_min + ft * (t_max - t_min);
        const double x = sx(tx);
        svg << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x
            << "\" y2=\"" << kTop + plot_h + 6 << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 22
            << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << format_tick(tx) << "</text>\n";
        const double vy = v_min + ft * (v_max - v_min);
        const double y = sy(vy);
        svg << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << y << "\" x2=\"" << kLeft
            << "\" y2=\"" << y << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << kLeft - 10 << "\" y=\"" << y + 4
            << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << format_tick(log_y ? std::pow(10.0, vy) : vy) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
        << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">t</text>\n";
    svg << "<text x=\"20\" y=\"" << kTop + plot_h / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 20 "
        << kTop + plot_h / 2 << ")\">" << metric_column
        << (log_y ? " (log scale)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].t.size(); ++k) {
            char point[64];
            std::snprintf(point, sizeof point, "%.2f,%.2f ", sx(series[s].t[k]),
                          sy(series[s].v[k]));
            svg << point;
        }
        svg << "\"/>\n";
        const double ly = kTop + 18 + 18 * static_cast<double>(s);
        svg << "<line x1=\"" << kLeft + plot_w - 150 << "\" y1=\"" << ly
            << "\" x2=\"" << kLeft + plot_w - 130 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kLeft + plot_w - 124 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[s].name
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + out_path.string());
    out << svg.str();
    if (!out) throw IoError("write failed: " + out_path.string());
}

}  // namespace dse::plot
