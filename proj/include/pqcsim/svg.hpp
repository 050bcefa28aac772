#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pqcsim::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Axes {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
    std::optional<double> hline;  // reference line (threshold, SLA, rho = 1)
    std::string hline_label;
};

void bar_chart(const std::string& path, const Axes& axes, const std::vector<std::string>& labels,
               const std::vector<double>& values);
void line_chart(const std::string& path, const Axes& axes, const std::vector<Series>& series);
// Box per label: whiskers at min/max, box at the quartiles, line at the median.
void box_chart(const std::string& path, const Axes& axes, const std::vector<std::string>& labels,
               const std::vector<std::vector<double>>& samples);

}  // namespace pqcsim::svg
