#include "rowtsm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rowtsm::svg {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 44;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& y_label) {
    std::size_t max_len = 0;
    double y_min = 0.0, y_max = 0.0;
    bool any = false;
    for (const Series& s : series) {
        max_len = std::max(max_len, s.values.size());
        for (double v : s.values) {
            if (!any) {
                y_min = y_max = v;
                any = true;
            } else {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
    }
    if (!any || max_len < 2) {
        max_len = std::max<std::size_t>(max_len, 2);
        y_min = -1.0;
        y_max = 1.0;
    }
    if (y_max - y_min < 1e-9) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double frame) {
        return kMarginLeft + plot_w * frame / static_cast<double>(max_len - 1);
    };
    const auto py = [&](double v) {
        return kMarginTop + plot_h * (y_max - v) / (y_max - y_min);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(kWidth / 2) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           title + "</text>\n";

    // Axes with a handful of ticks.
    out += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(kMarginTop) + "\" x2=\"" +
           fmt(kMarginLeft) + "\" y2=\"" + fmt(kMarginTop + plot_h) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(kMarginTop + plot_h) +
           "\" x2=\"" + fmt(kMarginLeft + plot_w) + "\" y2=\"" + fmt(kMarginTop + plot_h) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = y_min + (y_max - y_min) * i / 4.0;
        out += "<line x1=\"" + fmt(kMarginLeft - 4) + "\" y1=\"" + fmt(py(v)) + "\" x2=\"" +
               fmt(kMarginLeft) + "\" y2=\"" + fmt(py(v)) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(kMarginLeft - 8) + "\" y=\"" + fmt(py(v) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(v) +
               "</text>\n";
        const double f = (max_len - 1) * i / 4.0;
        out += "<line x1=\"" + fmt(px(f)) + "\" y1=\"" + fmt(kMarginTop + plot_h) + "\" x2=\"" +
               fmt(px(f)) + "\" y2=\"" + fmt(kMarginTop + plot_h + 4) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(px(f)) + "\" y=\"" + fmt(kMarginTop + plot_h + 17) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(f) + "</text>\n";
    }
    out += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" + std::to_string(kHeight - 8) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">frame</text>\n";
    out += "<text x=\"16\" y=\"" + std::to_string(kHeight / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " +
           std::to_string(kHeight / 2) + ")\">" + y_label + "</text>\n";

    const auto emit_polyline = [&](const Series& s) {
        if (s.values.size() < 2) return;
        out += s.highlight
                   ? std::string("<polyline fill=\"none\" stroke=\"red\" stroke-width=\"2\" points=\"")
                   : std::string(
                         "<polyline fill=\"none\" stroke=\"#9aa7b1\" stroke-width=\"1\" points=\"");
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            out += fmt(px(static_cast<double>(i))) + "," + fmt(py(s.values[i]));
            if (i + 1 < s.values.size()) out += " ";
        }
        out += "\"/>\n";
    };
    for (const Series& s : series)
        if (!s.highlight) emit_polyline(s);
    for (const Series& s : series)
        if (s.highlight) emit_polyline(s);

    out += "</svg>\n";
    return out;
}

void write_line_chart(const std::vector<Series>& series, const std::string& title,
                      const std::string& y_label, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open svg: " + path.string());
    out << line_chart(series, title, y_label);
}

}  // namespace rowtsm::svg
