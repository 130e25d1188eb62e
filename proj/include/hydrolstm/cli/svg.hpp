#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hydrolstm/analysis.hpp"
#include "hydrolstm/date.hpp"

namespace hydrolstm::svg {

struct Line {
    std::string label;
    std::vector<double> y;  // non-finite values break the line
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Band {
    std::string label;
    std::vector<double> lower;
    std::vector<double> upper;
    std::string color = "#1f77b4";
};

struct Panel {
    std::string title;
    std::string y_label;
    std::vector<Line> lines;
    std::vector<Band> bands;
    std::vector<Line> bars;  // drawn from zero
    bool zero_line = false;
    double height = 160.0;
};

struct XAxis {
    std::vector<double> x;  // shared by every series of every panel
    std::vector<std::pair<double, std::string>> ticks;
    std::string label;
};

/// Panels stacked vertically on one shared x axis.
std::string stacked_panels(const std::string& title, const XAxis& axis, const std::vector<Panel>& panels);

/// Ticks on the first day of each year, or of each month for spans under two years.
std::vector<std::pair<double, std::string>> date_ticks(const std::vector<Date>& dates);

/// Cells x states grid of ellipses: the narrower and darker, the stronger |rho|; the tilt gives the sign.
/// With `masked`, entries at or below the display threshold are left blank.
std::string correlation_grid(const CorrelationReport& report, bool masked);

}  // namespace hydrolstm::svg
