#include "conncoord/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace conncoord {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> y;
};

class Chart {
public:
    Chart(std::vector<double> t, double y_lo, double y_hi) : t_(std::move(t)) {
        t_lo_ = t_.empty() ? 0.0 : t_.front();
        t_hi_ = t_.empty() ? 1.0 : t_.back();
        if (!(t_hi_ > t_lo_)) t_hi_ = t_lo_ + 1.0;
        if (!(y_hi > y_lo)) {
            y_lo -= 0.5;
            y_hi += 0.5;
        }
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo_ = y_lo - pad;
        y_hi_ = y_hi + pad;
    }

    double px(double t) const { return kLeft + (t - t_lo_) / (t_hi_ - t_lo_) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y - y_lo_) / (y_hi_ - y_lo_) * (kHeight - kTop - kBottom);
    }

    std::string render(const std::string& title, const std::string& y_label,
                       const std::vector<Series>& series, const std::string& extra) const {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
          << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
          << "</text>\n";
        axes(s, y_label);
        for (std::size_t k = 0; k < series.size(); ++k) {
            const char* colour = kPalette[k % kPalette.size()];
            s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < t_.size() && i < series[k].y.size(); ++i) {
                if (!std::isfinite(series[k].y[i])) continue;
                s << fmt(px(t_[i])) << ',' << fmt(py(series[k].y[i])) << ' ';
            }
            s << "\"/>\n";
            s << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * static_cast<double>(k + 1)
              << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << series[k].label << "</text>\n";
        }
        s << extra;
        s << "</svg>\n";
        return s.str();
    }

    std::string hline(double y, const std::string& label) const {
        std::ostringstream s;
        s << "<line x1=\"" << fmt(kLeft) << "\" x2=\"" << fmt(kWidth - kRight) << "\" y1=\"" << fmt(py(y))
          << "\" y2=\"" << fmt(py(y)) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
        s << "<text x=\"" << fmt(kLeft + 6) << "\" y=\"" << fmt(py(y) - 4) << "\">" << label << "</text>\n";
        return s.str();
    }

private:
    void axes(std::ostringstream& s, const std::string& y_label) const {
        const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
        s << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
          << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int k = 0; k <= 5; ++k) {
            const double tv = t_lo_ + (t_hi_ - t_lo_) * k / 5.0;
            const double yv = y_lo_ + (y_hi_ - y_lo_) * k / 5.0;
            s << "<text x=\"" << fmt(px(tv)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << fmt(tv)
              << "</text>\n";
            s << "<text x=\"" << x0 - 6 << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
              << "</text>\n";
            s << "<line x1=\"" << x0 << "\" x2=\"" << x1 << "\" y1=\"" << fmt(py(yv)) << "\" y2=\"" << fmt(py(yv))
              << "\" stroke=\"#eee\"/>\n";
        }
        s << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">time [s]</text>\n";
        s << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
          << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
    }

    std::vector<double> t_;
    double t_lo_ = 0.0, t_hi_ = 1.0, y_lo_ = 0.0, y_hi_ = 1.0;
};

std::vector<Series> columns_with_prefix(const CsvTable& table, const std::string& prefix) {
    std::vector<Series> out;
    for (const auto& name : table.header) {
        if (name.rfind(prefix, 0) == 0) out.push_back({name, table.series(name)});
    }
    return out;
}

std::pair<double, double> range(const std::vector<Series>& series) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    return {lo, hi};
}

}  // namespace

std::string positions_svg(const CsvTable& table, const std::string& title) {
    const auto series = columns_with_prefix(table, "x[");
    const auto [lo, hi] = range(series);
    const Chart chart(table.series("time"), lo, hi);
    return chart.render(title, "position", series, "");
}

std::string distances_svg(const CsvTable& table, double r, const std::string& title) {
    const auto series = columns_with_prefix(table, "d[");
    auto [lo, hi] = range(series);
    lo = std::min(lo, 0.0);
    hi = std::max(hi, r);
    const Chart chart(table.series("time"), lo, hi);
    return chart.render(title, "link distance", series, chart.hline(r, "r = " + fmt(r)));
}

}  // namespace conncoord
