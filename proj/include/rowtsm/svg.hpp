// Minimal hand-emitted SVG line charts: axes, one polyline per series,
// optional highlighted average series. No plotting dependency.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rowtsm::svg {

struct Series {
    std::vector<double> values;  // y per integer x (frame index)
    bool highlight = false;      // drawn last, in red, thicker
};

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& y_label);

void write_line_chart(const std::vector<Series>& series, const std::string& title,
                      const std::string& y_label, const std::filesystem::path& path);

}  // namespace rowtsm::svg
