#include "hydrolstm/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hydrolstm::svg {

namespace {

constexpr double kWidth = 900.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kGap = 36.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

std::string header(double height) {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return o.str();
}

}  // namespace

std::string stacked_panels(const std::string& title, const XAxis& axis, const std::vector<Panel>& panels) {
    double total = kTop + kBottom;
    for (const auto& p : panels) total += p.height + kGap;
    std::ostringstream o;
    o << header(total);
    o << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";

    Range xr;
    for (double v : axis.x) xr.add(v);
    xr.settle();
    const double plot_w = kWidth - kLeft - kRight;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };

    double top = kTop;
    for (const auto& panel : panels) {
        Range yr;
        for (const auto& l : panel.lines) for (double v : l.y) yr.add(v);
        for (const auto& b : panel.bands) {
            for (double v : b.lower) yr.add(v);
            for (double v : b.upper) yr.add(v);
        }
        for (const auto& b : panel.bars) {
            for (double v : b.y) yr.add(v);
            yr.add(0.0);
        }
        if (panel.zero_line) yr.add(0.0);
        yr.settle();
        const double h = panel.height;
        auto py = [&](double y) { return top + h - (y - yr.lo) / (yr.hi - yr.lo) * h; };

        o << "<g>\n<rect x=\"" << num(kLeft) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
          << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        o << "<text x=\"" << num(kLeft + 4) << "\" y=\"" << num(top - 6) << "\">" << escape(panel.title) << "</text>\n";
        o << "<text transform=\"translate(" << num(16) << ',' << num(top + h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
          << escape(panel.y_label) << "</text>\n";
        for (double v : {yr.lo, (yr.lo + yr.hi) / 2, yr.hi})
            o << "<text x=\"" << num(kLeft - 4) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
              << label_num(v) << "</text>\n";
        for (const auto& [x, text] : axis.ticks)
            o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px(x)) << "\" y2=\""
              << num(top + h) << "\" stroke=\"#ddd\"/>\n";
        if (panel.zero_line && yr.lo < 0.0 && yr.hi > 0.0)
            o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(kLeft + plot_w)
              << "\" y2=\"" << num(py(0)) << "\" stroke=\"#888\" stroke-dasharray=\"2,2\"/>\n";

        for (const auto& band : panel.bands) {
            o << "<polygon fill=\"" << band.color << "\" fill-opacity=\"0.3\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < axis.x.size() && i < band.upper.size(); ++i)
                o << num(px(axis.x[i])) << ',' << num(py(band.upper[i])) << ' ';
            for (std::size_t i = std::min(axis.x.size(), band.lower.size()); i-- > 0;)
                o << num(px(axis.x[i])) << ',' << num(py(band.lower[i])) << ' ';
            o << "\"/>\n";
        }
        const double bar_w = axis.x.size() > 1 ? std::max(0.5, plot_w / static_cast<double>(axis.x.size())) : 2.0;
        for (const auto& bars : panel.bars) {
            o << "<g fill=\"" << bars.color << "\">\n";
            for (std::size_t i = 0; i < axis.x.size() && i < bars.y.size(); ++i) {
                if (!std::isfinite(bars.y[i]) || bars.y[i] == 0.0) continue;
                const double y0 = py(0.0);
                const double y1 = py(bars.y[i]);
                o << "<rect x=\"" << num(px(axis.x[i]) - bar_w / 2) << "\" y=\"" << num(std::min(y0, y1))
                  << "\" width=\"" << num(bar_w) << "\" height=\"" << num(std::abs(y0 - y1)) << "\"/>\n";
            }
            o << "</g>\n";
        }
        for (const auto& line : panel.lines) {
            std::string pts;
            auto flush = [&] {
                if (pts.empty()) return;
                o << "<polyline fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\"1.2\""
                  << (line.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << pts << "\"/>\n";
                pts.clear();
            };
            for (std::size_t i = 0; i < axis.x.size() && i < line.y.size(); ++i) {
                if (!std::isfinite(line.y[i])) {
                    flush();
                    continue;
                }
                pts += num(px(axis.x[i])) + ',' + num(py(line.y[i])) + ' ';
            }
            flush();
        }

        // Legend
        double ly = top + 12;
        auto legend = [&](const std::string& label, const std::string& color, bool dashed) {
            if (label.empty()) return;
            o << "<line x1=\"" << num(kLeft + plot_w + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
              << num(kLeft + plot_w + 30) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
              << "\" stroke-width=\"3\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
            o << "<text x=\"" << num(kLeft + plot_w + 34) << "\" y=\"" << num(ly) << "\">" << escape(label)
              << "</text>\n";
            ly += 14;
        };
        for (const auto& b : panel.bands) legend(b.label, b.color, false);
        for (const auto& b : panel.bars) legend(b.label, b.color, false);
        for (const auto& l : panel.lines) legend(l.label, l.color, l.dashed);
        o << "</g>\n";
        top += h + kGap;
    }

    const double axis_y = top - kGap;
    for (const auto& [x, text] : axis.ticks)
        o << "<text x=\"" << num(px(x)) << "\" y=\"" << num(axis_y + 14) << "\" text-anchor=\"middle\">"
          << escape(text) << "</text>\n";
    o << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(axis_y + 32) << "\" text-anchor=\"middle\">"
      << escape(axis.label) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::vector<std::pair<double, std::string>> date_ticks(const std::vector<Date>& dates) {
    std::vector<std::pair<double, std::string>> ticks;
    if (dates.empty()) return ticks;
    const bool yearly = dates.size() > 730;
    const std::size_t every = std::max<std::size_t>(1, dates.size() / (yearly ? 365 * 12 : 400));
    std::size_t seen = 0;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const std::chrono::year_month_day ymd{dates[i]};
        if (unsigned(ymd.day()) != 1 || (yearly && unsigned(ymd.month()) != 1)) continue;
        if (seen++ % every != 0) continue;
        const std::string text = format_date(dates[i]);
        ticks.emplace_back(static_cast<double>(i), yearly ? text.substr(0, 4) : text.substr(0, 7));
    }
    return ticks;
}

std::string correlation_grid(const CorrelationReport& report, bool masked) {
    constexpr double kCell = 56.0;
    constexpr double kLeftMargin = 70.0;
    constexpr double kTopMargin = 60.0;
    const std::size_t H = report.mean.rows();
    const std::size_t K = report.state_names.size();
    const double width = kLeftMargin + static_cast<double>(K) * kCell + 160.0;
    const double height = kTopMargin + static_cast<double>(H) * kCell + 30.0;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kLeftMargin) << "\" y=\"20\" font-size=\"14\">Mean correlation of memory cells with states"
      << (masked ? " (|r| &gt; 0.5)" : "") << "</text>\n";
    for (std::size_t k = 0; k < K; ++k)
        o << "<text x=\"" << num(kLeftMargin + (static_cast<double>(k) + 0.5) * kCell) << "\" y=\""
          << num(kTopMargin - 8) << "\" text-anchor=\"middle\">" << escape(report.state_names[k]) << "</text>\n";
    for (std::size_t j = 0; j < H; ++j) {
        const double cy = kTopMargin + (static_cast<double>(j) + 0.5) * kCell;
        o << "<text x=\"" << num(kLeftMargin - 8) << "\" y=\"" << num(cy + 4) << "\" text-anchor=\"end\">cell "
          << j << "</text>\n";
        for (std::size_t k = 0; k < K; ++k) {
            const double cx = kLeftMargin + (static_cast<double>(k) + 0.5) * kCell;
            o << "<rect x=\"" << num(cx - kCell / 2) << "\" y=\"" << num(cy - kCell / 2) << "\" width=\"" << num(kCell)
              << "\" height=\"" << num(kCell) << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
            if (report.valid_count(j, k) == 0 || (masked && !report.shown(j, k))) continue;
            const double r = report.mean(j, k);
            const double a = std::abs(r);
            const double rx = 0.45 * kCell;
            const double ry = std::max(0.03, 1.0 - a) * 0.45 * kCell;
            const std::string color = r >= 0 ? "#b2182b" : "#2166ac";
            o << "<ellipse cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" rx=\"" << num(rx) << "\" ry=\""
              << num(ry) << "\" transform=\"rotate(" << (r >= 0 ? "-45" : "45") << ' ' << num(cx) << ' ' << num(cy)
              << ")\" fill=\"" << color << "\" fill-opacity=\"" << num(0.15 + 0.85 * a) << "\"/>\n";
            o << "<text x=\"" << num(cx) << "\" y=\"" << num(cy + 4) << "\" text-anchor=\"middle\" font-size=\"9\">"
              << num(r) << "</text>\n";
        }
    }
    const double lx = kLeftMargin + static_cast<double>(K) * kCell + 20;
    o << "<text x=\"" << num(lx) << "\" y=\"" << num(kTopMargin + 10) << "\">red: positive</text>\n";
    o << "<text x=\"" << num(lx) << "\" y=\"" << num(kTopMargin + 26) << "\">blue: negative</text>\n";
    o << "<text x=\"" << num(lx) << "\" y=\"" << num(kTopMargin + 42) << "\">narrow: strong</text>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace hydrolstm::svg
