#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ppp::io {

// Shortest form that round-trips: 17 significant digits.
std::string num(double v);

std::string csv_row(const std::vector<std::string>& cells);

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::string color;
};

// Minimal polyline chart.
void write_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
               const std::vector<Series>& series);

}  // namespace ppp::io
